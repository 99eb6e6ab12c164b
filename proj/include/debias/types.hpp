#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace debias {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs whose shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter values or inconsistent descriptors.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A fit collapsed to a degenerate point (e.g. zero residual scale).
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// The projection-direction program found no feasible point.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double rho_final)
      : Error(what), rho_final_(rho_final) {}
  double rho_final() const noexcept { return rho_final_; }

 private:
  double rho_final_;
};

namespace detail {

inline void require(bool cond, const char* msg) {
  if (!cond) throw ConfigError(msg);
}

inline void require_dims(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace detail
}  // namespace debias
