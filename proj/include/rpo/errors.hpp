#pragma once

#include <stdexcept>
#include <string>

namespace rpo {

/// Raised when an integration or filter step produces non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed or out-of-range configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpo

namespace rpo {

/// Raised when a stacked observability matrix does not have full column rank.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpo
