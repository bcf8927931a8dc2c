#pragma once

#include <stdexcept>
#include <string>

namespace shdp {

/// Malformed input file or stream (UCI bag-of-words, text, stoplist).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters or distribution parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The sampler state cannot be advanced (inconsistent counts, zero mass).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint file is unreadable, truncated, corrupted or from another version.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shdp
