#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace fastreact {

/// Thrown when an iterative solve (nonlinear inversion, Newton step,
/// fixed-point step) fails to reach its residual tolerance.
class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& what, Eigen::VectorXd last_iterate,
                   double residual)
      : std::runtime_error(what),
        last_iterate(std::move(last_iterate)),
        residual(residual) {}

  Eigen::VectorXd last_iterate;
  double residual;
};

/// Thrown on malformed configuration input; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fastreact
