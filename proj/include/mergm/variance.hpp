#pragma once

#include <string>

#include <Eigen/Eigenvalues>

#include "mergm/types.hpp"

namespace mergm {

// Population covariance (1/N divisor) of simulated degree vectors, one draw
// per row.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
estimate_var_t(const Eigen::MatrixBase<Derived>& degree_samples) {
  if (degree_samples.rows() < 2) {
    throw ConfigError("variance estimation needs at least two draws");
  }
  return population_covariance(degree_samples);
}

// Symmetric pseudo-inverse; eigenvalues below rel_tol * max are dropped.
// `rank` receives the retained count.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
symmetric_pinv(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar rel_tol, int* rank = nullptr) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<Mat> eig(a.derived());
  const auto& values = eig.eigenvalues();
  const Scalar top = values.size() ? values.cwiseAbs().maxCoeff() : Scalar(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(values.size());
  int kept = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (top > 0 && values(k) > rel_tol * top) {
      inv(k) = Scalar(1) / values(k);
      ++kept;
    }
  }
  if (rank) *rank = kept;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

struct FisherEstimate {
  Matrix information;  // Var(s(y)) estimate
  Matrix covariance;   // its (pseudo-)inverse
  Vector se;
  bool singular = false;
};

// Simulated Fisher information Var(s(y)) and the implied standard errors.
// A singular information matrix falls back to the pseudo-inverse and sets
// `singular`; standard errors of unidentified directions are then NaN.
inline FisherEstimate fisher_from_stats(const Matrix& stats) {
  FisherEstimate f;
  f.information = population_covariance(stats);
  int rank = 0;
  f.covariance = symmetric_pinv(f.information, 1e-10, &rank);
  f.singular = rank < f.information.rows();
  f.se = f.covariance.diagonal().cwiseSqrt();
  if (f.singular) {
    for (Eigen::Index k = 0; k < f.se.size(); ++k) {
      if (!(f.information(k, k) > 0.0)) f.se(k) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return f;
}

}  // namespace mergm
