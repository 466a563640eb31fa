#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gperc/data.hpp"
#include "gperc/errors.hpp"
#include "gperc/metrics.hpp"

namespace gperc {

// A perceptron with one extra input: the product of all ordinary inputs,
// weighted like any other input. With gate_enabled=false it degrades to the
// plain perceptron and the gate weight is never read or written.
struct GatedModel {
  std::vector<double> input_weights;
  double gate_weight = 0.0;
  double bias = 0.0;
  bool gate_enabled = true;

  // Weights uniform in [-0.5, 0.5] from the seeded generator, bias 0.
  static GatedModel random(std::size_t n_features, std::uint64_t seed,
                           bool gate_enabled = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    GatedModel m;
    m.gate_enabled = gate_enabled;
    m.input_weights.resize(n_features);
    for (double& w : m.input_weights) w = dist(rng);
    m.gate_weight = gate_enabled ? dist(rng) : 0.0;
    return m;
  }
};

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 100;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
};

struct LossTrace {
  std::vector<double> per_epoch_loss;
};

inline double product_of(std::span<const double> x) {
  double p = 1.0;
  for (double v : x) p *= v;
  return p;
}

inline double weighted_sum(const GatedModel& m, std::span<const double> x) {
  if (x.size() != m.input_weights.size())
    throw DimensionError("weighted_sum: expected " +
                         std::to_string(m.input_weights.size()) + " inputs, got " +
                         std::to_string(x.size()));
  double sum = m.bias;
  for (std::size_t j = 0; j < x.size(); ++j) sum += m.input_weights[j] * x[j];
  if (m.gate_enabled) sum += m.gate_weight * product_of(x);
  return sum;
}

// Overflow-safe logistic.
inline double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

inline double sigmoid_predict(const GatedModel& m, std::span<const double> x) {
  return sigmoid(weighted_sum(m, x));
}

namespace detail {

inline void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
}

inline void check_weights_finite(std::span<const double> weights, double bias) {
  constexpr double kLimit = 1e12;
  for (double w : weights)
    if (!std::isfinite(w) || std::abs(w) > kLimit)
      throw DivergenceError("training diverged: weight out of range");
  if (!std::isfinite(bias) || std::abs(bias) > kLimit)
    throw DivergenceError("training diverged: bias out of range");
}

inline void check_model_finite(const GatedModel& m) {
  check_weights_finite(m.input_weights, m.bias);
  if (m.gate_enabled &&
      (!std::isfinite(m.gate_weight) || std::abs(m.gate_weight) > 1e12))
    throw DivergenceError("training diverged: gate weight out of range");
}

inline std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

}  // namespace detail

struct BinaryTrainResult {
  GatedModel model;
  LossTrace trace;
};

// Per-sample stochastic updates with the sigmoid-derivative factor:
// w_k += lr * (label - y) * y * (1-y) * input_k, where the gate input is
// the product of the (already normalized) features and the bias input is 1.
// Mean binary cross-entropy over the training set is recorded per epoch.
inline BinaryTrainResult train_binary(GatedModel model, const Dataset& data,
                                      const TrainConfig& cfg) {
  detail::validate_train_config(cfg);
  if (data.rows == 0) throw DataError("train_binary: empty dataset");
  if (data.cols != model.input_weights.size())
    throw DimensionError("train_binary: model has " +
                         std::to_string(model.input_weights.size()) +
                         " weights, dataset has " + std::to_string(data.cols) +
                         " features");
  for (int y : data.labels)
    if (y != 0 && y != 1)
      throw ConfigError("train_binary: labels must be 0/1, got " + std::to_string(y));

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order = detail::identity_order(data.rows);
  LossTrace trace;
  trace.per_epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  std::vector<double> scores(data.rows);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto x = data.row(i);
      const double y = sigmoid_predict(model, x);
      const double f = cfg.learning_rate * (data.labels[i] - y) * y * (1.0 - y);
      for (std::size_t j = 0; j < x.size(); ++j) model.input_weights[j] += f * x[j];
      if (model.gate_enabled) model.gate_weight += f * product_of(x);
      model.bias += f;
    }
    detail::check_model_finite(model);
    for (std::size_t i = 0; i < data.rows; ++i)
      scores[i] = sigmoid_predict(model, data.row(i));
    trace.per_epoch_loss.push_back(bce_loss(data.labels, scores));
  }
  return {std::move(model), std::move(trace)};
}

namespace detail {

inline int misclassified_count(const GatedModel& m, const Dataset& data) {
  int errs = 0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    const double y = weighted_sum(m, data.row(i));
    if ((y >= 0.0 ? +1 : -1) != data.labels[i]) ++errs;
  }
  return errs;
}

}  // namespace detail

// Region regression on two inputs: targets are +1/-1, y is the raw weighted
// sum (no activation), and the delta update fires only on samples whose sign
// disagrees with the label. Zero sums count as positive.
//
// On data the hyperbola cannot separate, the per-sample trajectory never
// settles: the handful of permanently wrong points keeps kicking the
// boundary, so the final iterate is an arbitrary phase of an orbit. The
// trainer therefore keeps a pocket of the best weights visited (fewest
// misclassified samples, evaluated after every update; ties keep the
// earlier snapshot) and returns that. On separable data this coincides with
// the usual converged perceptron, and a model that is already perfect is
// returned unchanged.
inline GatedModel train_region(GatedModel model, const Dataset& data,
                               const TrainConfig& cfg) {
  detail::validate_train_config(cfg);
  if (data.rows == 0) throw DataError("train_region: empty dataset");
  if (data.cols != 2 || model.input_weights.size() != 2)
    throw ConfigError("train_region: requires exactly 2 features");
  for (int y : data.labels)
    if (y != 1 && y != -1)
      throw ConfigError("train_region: labels must be +1/-1, got " + std::to_string(y));

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order = detail::identity_order(data.rows);
  GatedModel pocket = model;
  int pocket_errs = detail::misclassified_count(model, data);

  for (int epoch = 0; epoch < cfg.epochs && pocket_errs > 0; ++epoch) {
    if (cfg.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto x = data.row(i);
      const double y = weighted_sum(model, x);
      const int sign = y >= 0.0 ? +1 : -1;
      if (sign == data.labels[i]) continue;
      const double d = cfg.learning_rate * (data.labels[i] - y);
      model.input_weights[0] += d * x[0];
      model.input_weights[1] += d * x[1];
      if (model.gate_enabled) model.gate_weight += d * x[0] * x[1];
      model.bias += d;
      const int errs = detail::misclassified_count(model, data);
      if (errs < pocket_errs) {
        pocket_errs = errs;
        pocket = model;
        if (errs == 0) break;
      }
    }
    detail::check_model_finite(model);
  }
  return pocket;
}

// Linear softmax classifier over the dataset's columns (the 'product'
// column, when used, is appended by the data pipeline beforehand).
struct SoftmaxModel {
  std::size_t classes = 0;
  std::size_t inputs = 0;
  std::vector<double> weights;  // row-major, classes x inputs
  std::vector<double> biases;

  double weight(std::size_t c, std::size_t j) const { return weights[c * inputs + j]; }
  double& weight(std::size_t c, std::size_t j) { return weights[c * inputs + j]; }

  static SoftmaxModel random(std::size_t classes, std::size_t inputs,
                             std::uint64_t seed) {
    if (classes < 2) throw ConfigError("SoftmaxModel: need at least 2 classes");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    SoftmaxModel m;
    m.classes = classes;
    m.inputs = inputs;
    m.weights.resize(classes * inputs);
    for (double& w : m.weights) w = dist(rng);
    m.biases.assign(classes, 0.0);
    return m;
  }
};

inline std::vector<double> class_probabilities(const SoftmaxModel& m,
                                               std::span<const double> x) {
  if (x.size() != m.inputs)
    throw DimensionError("class_probabilities: expected " + std::to_string(m.inputs) +
                         " inputs, got " + std::to_string(x.size()));
  std::vector<double> logits(m.classes);
  for (std::size_t c = 0; c < m.classes; ++c) {
    double s = m.biases[c];
    for (std::size_t j = 0; j < m.inputs; ++j) s += m.weight(c, j) * x[j];
    logits[c] = s;
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - peak);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

inline int predict_class(const SoftmaxModel& m, std::span<const double> x) {
  const std::vector<double> p = class_probabilities(m, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c)
    if (p[c] > p[best]) best = c;  // ties keep the lowest index
  return static_cast<int>(best);
}

struct SoftmaxTrainResult {
  SoftmaxModel model;
  LossTrace trace;
};

// Per-sample gradient step on the one-hot error: for every class c,
// w[c][j] += lr * (onehot_c - p_c) * x_j, bias with input 1. Per-epoch mean
// cross-entropy is recorded.
inline SoftmaxTrainResult train_softmax(SoftmaxModel model, const Dataset& data,
                                        const TrainConfig& cfg) {
  detail::validate_train_config(cfg);
  if (data.rows == 0) throw DataError("train_softmax: empty dataset");
  if (data.cols != model.inputs)
    throw DimensionError("train_softmax: model expects " + std::to_string(model.inputs) +
                         " inputs, dataset has " + std::to_string(data.cols));
  for (int y : data.labels)
    if (y < 0 || static_cast<std::size_t>(y) >= model.classes)
      throw DataError("train_softmax: label out of range: " + std::to_string(y));

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order = detail::identity_order(data.rows);
  LossTrace trace;
  trace.per_epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  constexpr double kEps = 1e-12;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto x = data.row(i);
      const std::vector<double> p = class_probabilities(model, x);
      for (std::size_t c = 0; c < model.classes; ++c) {
        const double delta =
            cfg.learning_rate *
            ((static_cast<std::size_t>(data.labels[i]) == c ? 1.0 : 0.0) - p[c]);
        for (std::size_t j = 0; j < model.inputs; ++j)
          model.weight(c, j) += delta * x[j];
        model.biases[c] += delta;
      }
    }
    detail::check_weights_finite(model.weights, 0.0);
    detail::check_weights_finite(model.biases, 0.0);
    double ce = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      const std::vector<double> p = class_probabilities(model, data.row(i));
      ce += -std::log(std::clamp(p[static_cast<std::size_t>(data.labels[i])], kEps,
                                 1.0));
    }
    trace.per_epoch_loss.push_back(ce / static_cast<double>(data.rows));
  }
  return {std::move(model), std::move(trace)};
}

// ---- model file format -----------------------------------------------

namespace detail {

inline std::string format_weight(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::pair<std::string, std::string> parse_kv(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw DataError("model file: expected name=value, got '" + line + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace detail

inline void save_gated_model(const GatedModel& m, std::ostream& out) {
  out << "gatedmodel v1\n";
  for (std::size_t j = 0; j < m.input_weights.size(); ++j)
    out << 'w' << (j + 1) << '=' << detail::format_weight(m.input_weights[j]) << '\n';
  out << "gate=" << detail::format_weight(m.gate_weight) << '\n';
  out << "bias=" << detail::format_weight(m.bias) << '\n';
  out << "gate_enabled=" << (m.gate_enabled ? 1 : 0) << '\n';
}

inline GatedModel load_gated_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "gatedmodel v1")
    throw DataError("model file: missing 'gatedmodel v1' header");
  GatedModel m;
  bool saw_gate = false, saw_bias = false, saw_flag = false;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto [name, value] = detail::parse_kv(line);
    if (name == "gate") {
      m.gate_weight = std::stod(value);
      saw_gate = true;
    } else if (name == "bias") {
      m.bias = std::stod(value);
      saw_bias = true;
    } else if (name == "gate_enabled") {
      m.gate_enabled = value != "0";
      saw_flag = true;
    } else if (name.size() > 1 && name[0] == 'w') {
      const std::size_t k = std::stoul(name.substr(1));
      if (k == 0 || k != m.input_weights.size() + 1)
        throw DataError("model file: weights out of order at " + name);
      m.input_weights.push_back(std::stod(value));
    } else {
      throw DataError("model file: unknown field '" + name + "'");
    }
  }
  if (m.input_weights.empty() || !saw_gate || !saw_bias || !saw_flag)
    throw DataError("model file: incomplete gatedmodel record");
  return m;
}

inline void save_gated_model(const GatedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  save_gated_model(m, out);
}

inline GatedModel load_gated_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_gated_model(in);
}

inline void save_softmax_model(const SoftmaxModel& m, std::ostream& out) {
  out << "softmaxmodel v1\n";
  out << "classes=" << m.classes << '\n';
  out << "inputs=" << m.inputs << '\n';
  for (std::size_t c = 0; c < m.classes; ++c)
    for (std::size_t j = 0; j < m.inputs; ++j)
      out << 'w' << c << '_' << j << '=' << detail::format_weight(m.weight(c, j))
          << '\n';
  for (std::size_t c = 0; c < m.classes; ++c)
    out << 'b' << c << '=' << detail::format_weight(m.biases[c]) << '\n';
}

inline void save_softmax_model(const SoftmaxModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  save_softmax_model(m, out);
}

}  // namespace gperc
