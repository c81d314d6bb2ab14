#pragma once

#include <stdexcept>

namespace blstmseg {

// Invalid hyperparameters or options.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed corpus text: bad UTF-8, empty words, mismatched gold/prediction.
class CorpusFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blstmseg
