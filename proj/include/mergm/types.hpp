#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mergm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;

// Node index type. Nodes are always 0-based internally.
using NodeId = int;

class InvalidNode : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration refuses networks that are too large to brute force.
class LimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Maximum likelihood estimate lies on the boundary of the parameter space.
class BoundaryMleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerically stable log(sum(exp(x))).
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) {
    return -std::numeric_limits<Scalar>::infinity();
  }
  const Scalar top = x.maxCoeff();
  if (!std::isfinite(top)) {
    return top;
  }
  return top + std::log((x.derived().array() - top).exp().sum());
}

template <typename Scalar>
Scalar logistic(Scalar x) {
  if (x >= 0) {
    return Scalar(1) / (Scalar(1) + std::exp(-x));
  }
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar logit(Scalar p) {
  return std::log(p / (Scalar(1) - p));
}

// Column means and population covariance (1/N divisor) of the rows of
// `samples`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
population_covariance(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  const auto rows = samples.rows();
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean = samples.colwise().mean();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> centered =
      samples.rowwise() - mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cov =
      (centered.transpose() * centered) / static_cast<Scalar>(rows);
  // Symmetrize against rounding in the product.
  return (cov + cov.transpose()) / Scalar(2);
}

}  // namespace mergm
