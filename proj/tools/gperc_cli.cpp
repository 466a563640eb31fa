// gperc: gated-perceptron experiments from the command line.
//
// Subcommands: train, repro, regions, xor, iris-regression, roc.
// Exit codes: 0 success, 2 usage error, 3 data error, 4 training
// divergence, 5 degenerate geometry.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gperc/gperc.hpp"

using namespace gperc;

namespace {

struct CommonFlags {
  std::string data_path;
  std::string schema = "wdbc";
  std::string model = "gated";
  double lr = 0.5;
  int epochs = 100;
  std::uint64_t seed = 1;
  double test_fraction = 0.2;
  int reps = 10;
  bool no_shuffle = false;
  std::string out_dir = "out";
};

void add_pipeline_flags(CLI::App* cmd, CommonFlags& f, bool with_reps) {
  cmd->add_option("--data", f.data_path, "path to the dataset CSV")->required();
  cmd->add_option("--schema", f.schema,
                  "dataset schema: wdbc, pima, iris-multiclass, generic");
  cmd->add_option("--model", f.model, "model kind: gated, plain, softmax");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--test-fraction", f.test_fraction, "held-out fraction")->capture_default_str();
  if (with_reps) cmd->add_option("--reps", f.reps, "repetitions for the table")->capture_default_str();
  cmd->add_flag("--no-shuffle", f.no_shuffle, "visit samples in file order each epoch");
  cmd->add_option("--out", f.out_dir, "output directory")->capture_default_str();
}

ExperimentConfig to_config(const CommonFlags& f) {
  if (f.epochs < 1) throw ConfigError("--epochs must be >= 1");
  if (!(f.lr > 0.0)) throw ConfigError("--lr must be > 0");
  ExperimentConfig cfg;
  cfg.data_path = f.data_path;
  cfg.schema_name = f.schema;
  cfg.model = model_kind_from_name(f.model);
  cfg.learning_rate = f.lr;
  cfg.epochs = f.epochs;
  cfg.seed = f.seed;
  cfg.test_fraction = f.test_fraction;
  cfg.shuffle_each_epoch = !f.no_shuffle;
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void print_metric_row(const MetricReport& r) {
  std::printf("%4llu %4llu %4llu %4llu  %7.3f %7.3f %7.3f %7.3f %7.3f\n",
              (unsigned long long)r.counts.tp, (unsigned long long)r.counts.tn,
              (unsigned long long)r.counts.fp, (unsigned long long)r.counts.fn,
              r.accuracy, r.precision, r.recall, r.f1, r.auc);
}

int cmd_train(const CommonFlags& flags) {
  const ExperimentConfig cfg = to_config(flags);
  const auto out = ensure_out_dir(flags.out_dir);

  if (cfg.model == ModelKind::softmax) {
    SoftmaxRunResult r = run_softmax(cfg);
    std::ostringstream model_text;
    save_softmax_model(r.model, model_text);
    write_file(out / "model.txt", model_text.str());
    write_file(out / "loss.csv", loss_trace_csv(r.trace));
    std::ostringstream metrics;
    metrics << "{\"accuracy\":" << r.accuracy
            << ",\"test_rows\":" << r.test_rows << "}";
    write_file(out / "metrics.json", metrics.str());
    std::printf("softmax accuracy %.4f on %zu test rows\n", r.accuracy, r.test_rows);
    std::printf("confusion matrix (rows = truth):\n");
    for (std::size_t i = 0; i < r.confusion.classes; ++i) {
      for (std::size_t j = 0; j < r.confusion.classes; ++j)
        std::printf("%6llu", (unsigned long long)r.confusion.at(i, j));
      std::printf("\n");
    }
    return 0;
  }

  BinaryRunResult r = run_binary(cfg);
  std::ostringstream model_text;
  save_gated_model(r.model, model_text);
  write_file(out / "model.txt", model_text.str());
  write_file(out / "loss.csv", loss_trace_csv(r.trace));
  write_file(out / "metrics.json", metric_report_json(r.report));
  write_file(out / "roc.csv", roc_csv(r.roc));
  std::printf("  TP   TN   FP   FN       Ac      Pr     Rec      F1     AUC\n");
  print_metric_row(r.report);
  std::printf("outputs in %s (model.txt, loss.csv, metrics.json, roc.csv)\n",
              out.string().c_str());
  return 0;
}

// One repro table per learning rate; used to probe how flat the accuracy
// plateau is around the reference rate.
int cmd_lr_sweep(const CommonFlags& flags, const std::vector<double>& rates) {
  const auto out = ensure_out_dir(flags.out_dir);
  std::ostringstream json;
  json << "{\"sweep\":[";
  std::printf("      lr     mean Ac    mean AUC\n");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    CommonFlags per = flags;
    per.lr = rates[i];
    ReproReport rep = repro_binary(to_config(per), flags.reps);
    std::printf("%8g     %7.3f     %7.3f\n", rates[i], rep.mean.accuracy,
                rep.mean.auc);
    json << (i ? "," : "") << "{\"lr\":" << rates[i]
         << ",\"mean\":" << mean_row_json(rep.mean) << "}";
  }
  json << "]}";
  write_file(out / "lr_sweep.json", json.str());
  return 0;
}

int cmd_repro(const CommonFlags& flags) {
  const ExperimentConfig cfg = to_config(flags);
  const auto out = ensure_out_dir(flags.out_dir);

  if (cfg.model == ModelKind::softmax) {
    const std::vector<double> accs = repro_softmax_accuracies(cfg, flags.reps);
    double mean = 0;
    std::printf("run  accuracy\n");
    for (std::size_t i = 0; i < accs.size(); ++i) {
      std::printf("%3zu  %.4f\n", i + 1, accs[i]);
      mean += accs[i];
    }
    mean /= static_cast<double>(accs.size());
    std::printf("mean %.4f\n", mean);
    std::ostringstream json;
    json << "{\"accuracies\":[";
    for (std::size_t i = 0; i < accs.size(); ++i)
      json << (i ? "," : "") << accs[i];
    json << "],\"mean\":" << mean << "}";
    write_file(out / "repro.json", json.str());
    return 0;
  }

  ReproReport rep = repro_binary(cfg, flags.reps);
  // invariant: the mean row is the arithmetic mean of the printed rows
  const MeanRow check = mean_of_runs(rep.runs);
  if (std::abs(check.accuracy - rep.mean.accuracy) > 1e-9 ||
      std::abs(check.fp - rep.mean.fp) > 1e-9 ||
      std::abs(check.fn - rep.mean.fn) > 1e-9 ||
      std::abs(check.auc - rep.mean.auc) > 1e-9)
    throw std::logic_error("repro: mean row inconsistent with per-run rows");
  std::printf("  TP   TN   FP   FN       Ac      Pr     Rec      F1     AUC\n");
  for (const MetricReport& r : rep.runs) print_metric_row(r);
  std::printf("mean: %4.1f %4.1f %4.1f %4.1f  %7.3f %7.3f %7.3f %7.3f %7.3f\n",
              rep.mean.tp, rep.mean.tn, rep.mean.fp, rep.mean.fn,
              rep.mean.accuracy, rep.mean.precision, rep.mean.recall, rep.mean.f1,
              rep.mean.auc);
  write_file(out / "repro.json", repro_report_json(rep));
  return 0;
}

int cmd_roc(const CommonFlags& flags) {
  const ExperimentConfig cfg = to_config(flags);
  const auto out = ensure_out_dir(flags.out_dir);
  BinaryRunResult r = run_binary(cfg);
  write_file(out / "roc.csv", roc_csv(r.roc));
  std::printf("auc %.6f (%zu test rows); curve in %s/roc.csv\n", r.roc.auc,
              r.test_rows, out.string().c_str());
  return 0;
}

int cmd_regions(const std::string& fixture, const std::vector<std::string>& model_files,
                const std::string& window_spec, int resolution, int output_samples,
                const std::string& out_dir) {
  std::vector<GatedModel> models;
  if (!fixture.empty()) models = region_fixture(fixture);
  for (const std::string& path : model_files)
    models.push_back(load_gated_model(path));
  if (models.empty())
    throw ConfigError("regions: provide --fixture or at least one --model-file");
  for (const GatedModel& m : models) {
    const double gate = m.gate_enabled ? m.gate_weight : 0.0;
    if (m.input_weights.size() != 2)
      throw ConfigError("regions: models must have exactly 2 inputs");
    if (m.input_weights[0] == 0.0 && m.input_weights[1] == 0.0 && gate == 0.0)
      throw GeometryError("regions: model has no boundary (all weights zero)");
  }

  Window window;
  window.resolution = resolution;
  if (!window_spec.empty()) {
    double v[4];
    if (std::sscanf(window_spec.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2],
                    &v[3]) != 4)
      throw ConfigError("--window expects x0,x1,y0,y1");
    window.x_min = v[0];
    window.x_max = v[1];
    window.y_min = v[2];
    window.y_max = v[3];
  }

  RegionRaster raster = rasterize_signs(models, window);
  const auto out = ensure_out_dir(out_dir);
  std::ofstream pgm(out / "regions.pgm");
  write_pgm(raster, pgm);
  write_file(out / "regions.json", region_signs_json(raster, models.size()));
  if (output_samples > 0)
    write_file(out / "outputs.csv",
               output_scatter_csv(models, window, output_samples));
  std::printf("%d\n", raster.region_count);
  return 0;
}

int cmd_xor(double lr, int epochs, std::uint64_t seed, const std::string& model) {
  if (epochs < 1) throw ConfigError("--epochs must be >= 1");
  const bool gated = model != "plain";
  XorRunResult r = run_xor(lr, epochs, seed, gated);

  std::printf("trained %s perceptron (lr=%g, epochs=%d, seed=%llu)\n",
              gated ? "gated" : "plain", lr, epochs, (unsigned long long)seed);
  std::printf("  w1=%.6f w2=%.6f gate=%.6f bias=%.6f\n", r.model.input_weights[0],
              r.model.input_weights[1], r.model.gate_weight, r.model.bias);
  const char* corners[4] = {"(0,0)", "(1,0)", "(0,1)", "(1,1)"};
  const char* want[4] = {"+", "-", "-", "+"};
  for (int i = 0; i < 4; ++i)
    std::printf("  y%s = %+.4f  (want %s)\n", corners[i], r.outputs[i], want[i]);
  std::printf("constraints: %s\n", r.pass ? "PASS (4/4)" : "FAIL");

  GatedModel reference;
  reference.input_weights = {0.1, -0.2};
  reference.gate_weight = 1.0;
  reference.bias = -0.01;
  reference.gate_enabled = true;
  const auto ref = xor_corner_outputs(reference);
  std::printf(
      "\nreference weights w1=0.1 w2=-0.2 w3=1.0 b=-0.01 evaluate to\n");
  for (int i = 0; i < 4; ++i)
    std::printf("  y%s = %+.4f\n", corners[i], ref[i]);
  std::printf(
      "note: the reference weights realize sign(x1), not the XOR split;\n"
      "they are reported verbatim while training finds a satisfying set.\n");
  return r.pass ? 0 : 1;
}

int cmd_iris_regression(const std::string& data, const std::string& columns,
                        int classes, double lr, int epochs, std::uint64_t seed,
                        const std::string& out_dir) {
  if (epochs < 1) throw ConfigError("--epochs must be >= 1");
  int a = 0, b = 0;
  if (std::sscanf(columns.c_str(), "%d,%d", &a, &b) != 2 || a < 1 || b < 1 ||
      a > 4 || b > 4)
    throw ConfigError("--columns expects two 1-based feature positions, e.g. 3,4");

  RegionRegressionResult r = run_iris_regression(
      data, classes, static_cast<std::size_t>(a - 1),
      static_cast<std::size_t>(b - 1), {lr, epochs, seed, true}, true);

  const auto out = ensure_out_dir(out_dir);
  Window window{-0.1, 1.1, -0.1, 1.1, 512};
  BoundaryPolyline poly = boundary_curve(r.model, window, 2048);
  write_file(out / "boundary.csv", boundary_csv(poly));
  std::ostringstream model_text;
  save_gated_model(r.model, model_text);
  write_file(out / "model.txt", model_text.str());

  std::printf("columns %d,%d (%s, %s), %d classes, lr=%g, epochs=%d, seed=%llu\n",
              a, b, r.data.column_names[0].c_str(), r.data.column_names[1].c_str(),
              classes, lr, epochs, (unsigned long long)seed);
  std::printf("misclassified: %d of %zu (positive-class %d, negative-class %d)\n",
              r.misclassified, r.data.rows, r.misclassified_by_class[0],
              r.misclassified_by_class[1]);
  std::printf("boundary polyline in %s/boundary.csv\n", out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gated perceptron toolkit"};
  app.require_subcommand(1);

  CommonFlags train_flags, repro_flags, roc_flags;
  auto* train = app.add_subcommand("train", "train one model and write metrics");
  add_pipeline_flags(train, train_flags, false);
  auto* repro = app.add_subcommand("repro", "repeat a run over consecutive seeds");
  add_pipeline_flags(repro, repro_flags, true);
  std::vector<double> sweep_rates;
  repro->add_option("--lr-sweep", sweep_rates,
                    "run the table once per learning rate instead (comma list)")
      ->delimiter(',');
  auto* roc = app.add_subcommand("roc", "train once and emit only the ROC curve");
  add_pipeline_flags(roc, roc_flags, false);

  std::string fixture, window_spec, regions_out = "out";
  std::vector<std::string> model_files;
  int resolution = 2000;
  int output_samples = 0;
  auto* regions = app.add_subcommand("regions", "rasterize decision regions");
  regions->add_option("--fixture", fixture,
                      "built-in set: gated-1, gated-2, gated-3, plain-2, plain-3");
  regions->add_option("--model-file", model_files, "gatedmodel v1 file (repeatable)");
  regions->add_option("--window", window_spec, "x0,x1,y0,y1 (default -1,1,-1,1)");
  regions->add_option("--resolution", resolution, "cells per axis")->capture_default_str();
  regions->add_option("--outputs", output_samples,
                      "also write outputs.csv, a raw-output scatter sampled on "
                      "an NxN grid (0 = off)")->capture_default_str();
  regions->add_option("--out", regions_out, "output directory")->capture_default_str();

  double xor_lr = 0.1;
  int xor_epochs = 4000;
  std::uint64_t xor_seed = 1;
  std::string xor_model = "gated";
  auto* xor_cmd = app.add_subcommand("xor", "train on the four XOR points");
  xor_cmd->add_option("--lr", xor_lr, "learning rate")->capture_default_str();
  xor_cmd->add_option("--epochs", xor_epochs, "epoch cap")->capture_default_str();
  xor_cmd->add_option("--seed", xor_seed, "random seed")->capture_default_str();
  xor_cmd->add_option("--model", xor_model, "gated or plain")->capture_default_str();

  std::string ir_data, ir_columns = "3,4", ir_out = "out";
  int ir_classes = 3;
  double ir_lr = 0.05;
  int ir_epochs = 40;
  std::uint64_t ir_seed = 1;
  auto* ir = app.add_subcommand("iris-regression",
                                "region regression on two iris columns");
  ir->add_option("--data", ir_data, "path to the iris CSV")->required();
  ir->add_option("--columns", ir_columns, "1-based feature pair")->capture_default_str();
  ir->add_option("--classes", ir_classes, "2 or 3")->capture_default_str();
  ir->add_option("--lr", ir_lr, "learning rate")->capture_default_str();
  ir->add_option("--epochs", ir_epochs, "training epochs")->capture_default_str();
  ir->add_option("--seed", ir_seed, "random seed")->capture_default_str();
  ir->add_option("--out", ir_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (train->parsed()) return cmd_train(train_flags);
    if (repro->parsed())
      return sweep_rates.empty() ? cmd_repro(repro_flags)
                                 : cmd_lr_sweep(repro_flags, sweep_rates);
    if (roc->parsed()) return cmd_roc(roc_flags);
    if (regions->parsed())
      return cmd_regions(fixture, model_files, window_spec, resolution,
                         output_samples, regions_out);
    if (xor_cmd->parsed()) return cmd_xor(xor_lr, xor_epochs, xor_seed, xor_model);
    if (ir->parsed())
      return cmd_iris_regression(ir_data, ir_columns, ir_classes, ir_lr, ir_epochs,
                                 ir_seed, ir_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, bad usage -> 2
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 4;
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "geometry error: %s\n", e.what());
    return 5;
  }
}
