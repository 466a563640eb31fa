#pragma once

#include <stdexcept>
#include <string>

namespace gperc {

// Invalid configuration or usage: bad hyperparameters, unsupported
// schema/model pairing, wrong label set for a trainer.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatch between a model's weight count and an input vector.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Malformed or inconsistent input data (CSV parse failures, unknown label
// tokens, undefined statistics).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced non-finite or runaway weights.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate decision-boundary geometry (e.g. an all-zero model).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gperc
