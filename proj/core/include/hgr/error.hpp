#pragma once

#include <stdexcept>
#include <string>

namespace hgr {

/// Input violated a documented precondition (support margin, signature,
/// CFL bound, shape mismatch, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to produce a trustworthy answer
/// (Newton divergence, signature loss during a stage, singular solve).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or file content.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hgr
