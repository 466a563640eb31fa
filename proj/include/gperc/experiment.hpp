#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gperc/data.hpp"
#include "gperc/errors.hpp"
#include "gperc/metrics.hpp"
#include "gperc/model.hpp"

namespace gperc {

enum class ModelKind { gated, plain, softmax };

inline ModelKind model_kind_from_name(std::string_view name) {
  if (name == "gated") return ModelKind::gated;
  if (name == "plain") return ModelKind::plain;
  if (name == "softmax") return ModelKind::softmax;
  throw ConfigError("unknown model kind: " + std::string(name));
}

struct ExperimentConfig {
  std::string data_path;
  std::string schema_name;
  ModelKind model = ModelKind::gated;
  double learning_rate = 0.5;
  int epochs = 100;
  std::uint64_t seed = 1;
  double test_fraction = 0.2;
  bool shuffle_each_epoch = true;
};

struct BinaryRunResult {
  GatedModel model;
  LossTrace trace;
  MetricReport report;
  RocCurve roc;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

namespace detail {

struct PreparedSplit {
  Dataset train;
  Dataset test;
};

// load -> impute -> normalize, all statistics fit on the training indices,
// then materialize the two sides.
inline PreparedSplit prepare_binary_split(const ExperimentConfig& cfg) {
  const DatasetSchema schema = DatasetSchema::named(cfg.schema_name);
  Dataset data = load_csv(cfg.data_path, schema);
  const SplitIndices idx = split_indices(data.rows, {cfg.test_fraction, cfg.seed});
  data = impute_missing(data, schema, idx.train);
  data = normalize(data, idx.train);
  return {take_rows(data, idx.train), take_rows(data, idx.test)};
}

}  // namespace detail

// Full sigmoid-classification pipeline for the binary schemas (wdbc, pima):
// the gate input is the product of the normalized features, formed inside
// the model rather than as a dataset column.
inline BinaryRunResult run_binary(const ExperimentConfig& cfg) {
  if (cfg.model == ModelKind::softmax)
    throw ConfigError("run_binary: model must be gated or plain");
  if (cfg.schema_name != "wdbc" && cfg.schema_name != "pima" &&
      cfg.schema_name != "generic")
    throw ConfigError("run_binary: unsupported schema " + cfg.schema_name);

  auto [train, test] = detail::prepare_binary_split(cfg);
  GatedModel init = GatedModel::random(train.cols, cfg.seed,
                                       cfg.model == ModelKind::gated);
  TrainConfig tc{cfg.learning_rate, cfg.epochs, cfg.seed, cfg.shuffle_each_epoch};
  auto [model, trace] = train_binary(std::move(init), train, tc);

  std::vector<double> scores(test.rows);
  for (std::size_t i = 0; i < test.rows; ++i)
    scores[i] = sigmoid_predict(model, test.row(i));

  BinaryRunResult result;
  result.report = derive_metrics(confusion(test.labels, scores));
  result.roc = roc_auc(test.labels, scores);
  result.report.auc = result.roc.auc;
  result.model = std::move(model);
  result.trace = std::move(trace);
  result.train_rows = train.rows;
  result.test_rows = test.rows;
  return result;
}

struct SoftmaxRunResult {
  SoftmaxModel model;
  LossTrace trace;
  MulticlassConfusion confusion;
  double accuracy = 0.0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

// Multi-class pipeline: the product of the raw features is appended as a
// column, then every column (product included) is min-max normalized.
inline SoftmaxRunResult run_softmax(const ExperimentConfig& cfg) {
  if (cfg.model != ModelKind::softmax)
    throw ConfigError("run_softmax: model must be softmax");
  if (cfg.schema_name != "iris-multiclass")
    throw ConfigError("run_softmax: requires the iris-multiclass schema");

  const DatasetSchema schema = DatasetSchema::named(cfg.schema_name);
  Dataset data = load_csv(cfg.data_path, schema);
  data = append_product_feature(data);
  const SplitIndices idx = split_indices(data.rows, {cfg.test_fraction, cfg.seed});
  data = normalize(data, idx.train);
  Dataset train = take_rows(data, idx.train);
  Dataset test = take_rows(data, idx.test);

  const int max_label = *std::max_element(data.labels.begin(), data.labels.end());
  const auto classes = static_cast<std::size_t>(max_label + 1);
  SoftmaxModel init = SoftmaxModel::random(classes, train.cols, cfg.seed);
  TrainConfig tc{cfg.learning_rate, cfg.epochs, cfg.seed, cfg.shuffle_each_epoch};
  auto [model, trace] = train_softmax(std::move(init), train, tc);

  std::vector<int> predictions(test.rows);
  for (std::size_t i = 0; i < test.rows; ++i)
    predictions[i] = predict_class(model, test.row(i));

  SoftmaxRunResult result;
  result.confusion = multiclass_confusion(test.labels, predictions, classes);
  result.accuracy = result.confusion.accuracy();
  result.model = std::move(model);
  result.trace = std::move(trace);
  result.train_rows = train.rows;
  result.test_rows = test.rows;
  return result;
}

// ---- repetition tables ---------------------------------------------------

struct MeanRow {
  double tp = 0, tn = 0, fp = 0, fn = 0;
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, auc = 0;
};

struct ReproReport {
  std::vector<MetricReport> runs;
  MeanRow mean;
};

inline MeanRow mean_of_runs(const std::vector<MetricReport>& runs) {
  MeanRow m;
  for (const MetricReport& r : runs) {
    m.tp += static_cast<double>(r.counts.tp);
    m.tn += static_cast<double>(r.counts.tn);
    m.fp += static_cast<double>(r.counts.fp);
    m.fn += static_cast<double>(r.counts.fn);
    m.accuracy += r.accuracy;
    m.precision += r.precision;
    m.recall += r.recall;
    m.f1 += r.f1;
    m.auc += r.auc;
  }
  const auto n = static_cast<double>(runs.size());
  m.tp /= n; m.tn /= n; m.fp /= n; m.fn /= n;
  m.accuracy /= n; m.precision /= n; m.recall /= n; m.f1 /= n; m.auc /= n;
  return m;
}

// Seeds run from cfg.seed upward so the table itself is reproducible.
inline ReproReport repro_binary(const ExperimentConfig& cfg, int repetitions) {
  if (repetitions < 1) throw ConfigError("repro: repetitions must be >= 1");
  ReproReport report;
  for (int r = 0; r < repetitions; ++r) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    report.runs.push_back(run_binary(run_cfg).report);
  }
  report.mean = mean_of_runs(report.runs);
  return report;
}

inline std::vector<double> repro_softmax_accuracies(const ExperimentConfig& cfg,
                                                    int repetitions) {
  if (repetitions < 1) throw ConfigError("repro: repetitions must be >= 1");
  std::vector<double> accs;
  for (int r = 0; r < repetitions; ++r) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    accs.push_back(run_softmax(run_cfg).accuracy);
  }
  return accs;
}

// ---- XOR demo ------------------------------------------------------------

inline Dataset xor_dataset() {
  Dataset d;
  d.rows = 4;
  d.cols = 2;
  d.values = {0, 0, 1, 1, 0, 1, 1, 0};
  d.labels = {+1, +1, -1, -1};
  d.column_names = {"x1", "x2"};
  return d;
}

inline std::array<double, 4> xor_corner_outputs(const GatedModel& m) {
  const std::array<std::array<double, 2>, 4> corners = {
      {{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < corners.size(); ++i)
    out[i] = weighted_sum(m, corners[i]);
  return out;
}

// (0,0) and (1,1) must come out positive, (1,0) and (0,1) negative; zero
// counts as positive.
inline bool xor_constraints_satisfied(const GatedModel& m) {
  const std::array<double, 4> y = xor_corner_outputs(m);
  return y[0] >= 0.0 && y[3] >= 0.0 && y[1] < 0.0 && y[2] < 0.0;
}

struct XorRunResult {
  GatedModel model;
  std::array<double, 4> outputs{};
  bool pass = false;
};

inline XorRunResult run_xor(double learning_rate, int epochs, std::uint64_t seed,
                            bool gated) {
  GatedModel init = GatedModel::random(2, seed, gated);
  TrainConfig tc{learning_rate, epochs, seed, true};
  XorRunResult result;
  result.model = train_region(std::move(init), xor_dataset(), tc);
  result.outputs = xor_corner_outputs(result.model);
  result.pass = xor_constraints_satisfied(result.model);
  return result;
}

// ---- region regression (two Iris columns) ---------------------------------

inline Dataset select_feature_pair(const Dataset& full, std::size_t col_a,
                                   std::size_t col_b) {
  if (col_a >= full.cols || col_b >= full.cols || col_a == col_b)
    throw ConfigError("select_feature_pair: invalid column pair");
  Dataset two;
  two.rows = full.rows;
  two.cols = 2;
  two.labels = full.labels;
  two.column_names = {full.column_names[col_a], full.column_names[col_b]};
  two.values.reserve(two.rows * 2);
  for (std::size_t i = 0; i < full.rows; ++i) {
    two.values.push_back(full.at(i, col_a));
    two.values.push_back(full.at(i, col_b));
  }
  return two;
}

struct RegionRegressionResult {
  GatedModel model;
  Dataset data;  // the two selected columns as trained on
  int misclassified = 0;
  std::vector<int> misclassified_by_class;  // indexed by +1 -> 0, -1 -> 1
};

// Trains the raw-sum region model on a 2-column +1/-1 dataset and counts
// points on the wrong sign side.
inline RegionRegressionResult run_region_regression(Dataset two,
                                                    const TrainConfig& cfg,
                                                    bool gated = true) {
  RegionRegressionResult result;
  result.model = train_region(GatedModel::random(2, cfg.seed, gated), two, cfg);
  result.misclassified_by_class.assign(2, 0);
  for (std::size_t i = 0; i < two.rows; ++i) {
    const double y = weighted_sum(result.model, two.row(i));
    const int sign = y >= 0.0 ? +1 : -1;
    if (sign != two.labels[i]) {
      ++result.misclassified;
      ++result.misclassified_by_class[two.labels[i] == +1 ? 0 : 1];
    }
  }
  result.data = std::move(two);
  return result;
}

// Region regression on two columns of the Iris data. The selected columns
// are min-max scaled to [0,1] over all rows first; at petal scale the raw
// delta updates overshoot and oscillate with the reference learning rate.
inline RegionRegressionResult run_iris_regression(const std::string& data_path,
                                                  int n_classes, std::size_t col_a,
                                                  std::size_t col_b,
                                                  const TrainConfig& cfg,
                                                  bool gated = true) {
  if (n_classes != 2 && n_classes != 3)
    throw ConfigError("iris regression: classes must be 2 or 3");
  const DatasetSchema schema = DatasetSchema::named(
      n_classes == 2 ? "iris-2class" : "iris-3class-regression");
  Dataset full = load_csv(data_path, schema);
  Dataset two = select_feature_pair(full, col_a, col_b);
  std::vector<std::size_t> all(two.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});
  two = normalize(two, all);
  return run_region_regression(std::move(two), cfg, gated);
}

// ---- serialization helpers used by the CLI and determinism tests ----------

inline std::string loss_trace_csv(const LossTrace& trace) {
  std::ostringstream out;
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < trace.per_epoch_loss.size(); ++e)
    out << (e + 1) << ',' << detail::format_weight(trace.per_epoch_loss[e]) << '\n';
  return out.str();
}

inline std::string mean_row_json(const MeanRow& m) {
  std::ostringstream out;
  out << "{\"tp\":" << detail::format_weight(m.tp)
      << ",\"tn\":" << detail::format_weight(m.tn)
      << ",\"fp\":" << detail::format_weight(m.fp)
      << ",\"fn\":" << detail::format_weight(m.fn)
      << ",\"accuracy\":" << detail::format_weight(m.accuracy)
      << ",\"precision\":" << detail::format_weight(m.precision)
      << ",\"recall\":" << detail::format_weight(m.recall)
      << ",\"f1\":" << detail::format_weight(m.f1)
      << ",\"auc\":" << detail::format_weight(m.auc) << "}";
  return out.str();
}

inline std::string repro_report_json(const ReproReport& report) {
  std::ostringstream out;
  out << "{\"runs\":[";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    if (i) out << ',';
    out << metric_report_json(report.runs[i]);
  }
  out << "],\"mean\":" << mean_row_json(report.mean) << "}";
  return out.str();
}

}  // namespace gperc
