#include <catch2/catch.hpp>

#include <cmath>
#include <string>

#include "gperc/experiment.hpp"

using namespace gperc;

namespace {

std::string data_path(const char* name) {
  return std::string(GPERC_DATA_DIR) + "/" + name;
}

ExperimentConfig wdbc_config(std::uint64_t seed = 1) {
  ExperimentConfig cfg;
  cfg.data_path = data_path("wdbc.csv");
  cfg.schema_name = "wdbc";
  cfg.model = ModelKind::gated;
  cfg.learning_rate = 0.5;
  cfg.epochs = 100;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("binary pipeline on the reference breast-cancer run") {
  BinaryRunResult r = run_binary(wdbc_config());
  CHECK(r.train_rows == 456);
  CHECK(r.test_rows == 113);
  CHECK(r.report.accuracy >= 0.94);
  CHECK(r.report.auc > 0.98);
  CHECK(r.report.counts.total() == 113);
  CHECK(r.trace.per_epoch_loss.size() == 100);
  CHECK(r.trace.per_epoch_loss.back() < r.trace.per_epoch_loss.front());
}

TEST_CASE("pipeline outputs are byte-identical under a fixed seed") {
  BinaryRunResult a = run_binary(wdbc_config(7));
  BinaryRunResult b = run_binary(wdbc_config(7));
  CHECK(metric_report_json(a.report) == metric_report_json(b.report));
  CHECK(roc_csv(a.roc) == roc_csv(b.roc));
  CHECK(loss_trace_csv(a.trace) == loss_trace_csv(b.trace));
  std::ostringstream ma, mb;
  save_gated_model(a.model, ma);
  save_gated_model(b.model, mb);
  CHECK(ma.str() == mb.str());
}

TEST_CASE("repro table mean row is the arithmetic mean of its runs") {
  ExperimentConfig cfg = wdbc_config();
  cfg.epochs = 30;  // keep the unit suite quick
  ReproReport rep = repro_binary(cfg, 5);
  REQUIRE(rep.runs.size() == 5);
  MeanRow again = mean_of_runs(rep.runs);
  CHECK(rep.mean.accuracy == Approx(again.accuracy).margin(1e-9));
  CHECK(rep.mean.fp == Approx(again.fp).margin(1e-9));
  CHECK(rep.mean.fn == Approx(again.fn).margin(1e-9));
  CHECK(rep.mean.auc == Approx(again.auc).margin(1e-9));

  double acc = 0;
  for (const MetricReport& r : rep.runs) acc += r.accuracy;
  CHECK(rep.mean.accuracy == Approx(acc / 5.0).margin(1e-12));

  const std::string json = repro_report_json(rep);
  CHECK(json.find("\"runs\":[") != std::string::npos);
  CHECK(json.find("\"mean\":{") != std::string::npos);
}

TEST_CASE("synthetic diabetes stand-in flows through the full pipeline") {
  ExperimentConfig cfg;
  cfg.data_path = data_path("pima_synthetic.csv");
  cfg.schema_name = "pima";
  cfg.model = ModelKind::gated;
  cfg.learning_rate = 0.5;
  cfg.epochs = 100;
  cfg.seed = 1;
  ReproReport rep = repro_binary(cfg, 10);
  CHECK(rep.mean.accuracy > 0.65);
  CHECK(rep.mean.accuracy < 0.90);
  CHECK(rep.mean.auc > 0.72);
  for (const MetricReport& r : rep.runs) {
    CHECK(std::isfinite(r.f1));
    CHECK(r.counts.total() == 153);  // 768 - ceil(768 * 0.8)
  }
}

TEST_CASE("softmax pipeline on the three-class iris task") {
  ExperimentConfig cfg;
  cfg.data_path = data_path("iris.csv");
  cfg.schema_name = "iris-multiclass";
  cfg.model = ModelKind::softmax;
  cfg.learning_rate = 0.01;
  cfg.epochs = 200;
  cfg.seed = 1;
  SoftmaxRunResult r = run_softmax(cfg);
  CHECK(r.train_rows == 120);
  CHECK(r.test_rows == 30);
  CHECK(r.confusion.total() == 30);
  CHECK(r.accuracy >= 0.80);
  CHECK(r.model.inputs == 5);  // four features plus the product column
  CHECK(r.trace.per_epoch_loss.back() < r.trace.per_epoch_loss.front());
}

TEST_CASE("schema/model pairing is validated") {
  ExperimentConfig cfg = wdbc_config();
  cfg.model = ModelKind::softmax;
  CHECK_THROWS_AS(run_binary(cfg), ConfigError);

  ExperimentConfig s;
  s.data_path = data_path("wdbc.csv");
  s.schema_name = "wdbc";
  s.model = ModelKind::softmax;
  CHECK_THROWS_AS(run_softmax(s), ConfigError);

  CHECK_THROWS_AS(model_kind_from_name("boosted"), ConfigError);
}

TEST_CASE("xor demo") {
  SECTION("gated training passes the four sign constraints") {
    XorRunResult r = run_xor(0.1, 4000, 1, true);
    CHECK(r.pass);
    CHECK(r.outputs[0] >= 0.0);
    CHECK(r.outputs[3] >= 0.0);
    CHECK(r.outputs[1] < 0.0);
    CHECK(r.outputs[2] < 0.0);
  }
  SECTION("the published reference weights trace out sign(x1) instead") {
    GatedModel reference;
    reference.input_weights = {0.1, -0.2};
    reference.gate_weight = 1.0;
    reference.bias = -0.01;
    reference.gate_enabled = true;
    const std::array<double, 4> y = xor_corner_outputs(reference);
    CHECK(y[0] < 0.0);   // (0,0)
    CHECK(y[1] > 0.0);   // (1,0)
    CHECK(y[2] < 0.0);   // (0,1)
    CHECK(y[3] > 0.0);   // (1,1)
    CHECK(!xor_constraints_satisfied(reference));
  }
}

TEST_CASE("iris region regression command path") {
  SECTION("three classes with the reference settings stay within five errors") {
    RegionRegressionResult r =
        run_iris_regression(data_path("iris.csv"), 3, 2, 3, {0.05, 40, 1, true});
    CHECK(r.misclassified <= 5);
    CHECK(r.misclassified_by_class[0] + r.misclassified_by_class[1] ==
          r.misclassified);
  }
  SECTION("the two linearly separable classes reach zero errors") {
    RegionRegressionResult r =
        run_iris_regression(data_path("iris.csv"), 2, 2, 3, {0.05, 40, 1, true});
    CHECK(r.misclassified == 0);
  }
  SECTION("invalid column pair rejected") {
    CHECK_THROWS_AS(run_iris_regression(data_path("iris.csv"), 3, 2, 2, {0.05, 40, 1, true}),
                    ConfigError);
    CHECK_THROWS_AS(run_iris_regression(data_path("iris.csv"), 3, 2, 9, {0.05, 40, 1, true}),
                    ConfigError);
  }
  SECTION("class count other than 2 or 3 rejected") {
    CHECK_THROWS_AS(run_iris_regression(data_path("iris.csv"), 4, 2, 3, {0.05, 40, 1, true}),
                    ConfigError);
  }
}
