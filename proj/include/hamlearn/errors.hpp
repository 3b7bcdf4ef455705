#pragma once

#include <stdexcept>
#include <string>

namespace hamlearn {

/// Caller violated a documented precondition (dimension mismatch, bad argument).
class contract_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric routine failed: non-convergence, overflow, or an invalid
/// intermediate value. Carries the offending residual when one exists.
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string &msg, double residual = 0.0)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/// Input data failed validation (count/shot mismatch, malformed file).
/// Messages identify the offending row or field.
class data_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace hamlearn
