#pragma once

#include "mergm/graph.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"

namespace mergm {

// Every labelled graph on n <= 6 nodes, indexed by a bitmask over dyads in
// lexicographic order (0,1), (0,2), ..., (n-2,n-1). Serves as the exact
// oracle for all simulation-based estimators.
class GraphEnumeration {
 public:
  static constexpr int kMaxNodes = 6;

  GraphEnumeration(int n, const ModelSpec& spec);

  int nodes() const { return n_; }
  long count() const { return stats_.rows(); }
  const Matrix& stats() const { return stats_; }      // count x p
  const Matrix& degrees() const { return degrees_; }  // count x n
  UndirectedNetwork network(long index) const;
  long index_of(const UndirectedNetwork& net) const;

  // theta' s(y) + u' t(y) for every graph; empty u means zero.
  Vector log_weights(const Vector& theta, const Vector& u) const;
  double log_kappa(const Vector& theta, const Vector& u) const;
  Vector probabilities(const Vector& theta, const Vector& u) const;

  struct Moments {
    Vector mean_s;
    Matrix cov_s;
    Vector mean_t;
    Matrix cov_t;
  };
  Moments moments(const Vector& theta, const Vector& u) const;

 private:
  int n_;
  Matrix stats_;
  Matrix degrees_;
};

// Sum over all graphs of exp(theta' s(y) + u' t(y)).
double exact_kappa(int n, const ModelSpec& spec, const Vector& theta, const Vector& u);
double exact_log_kappa(int n, const ModelSpec& spec, const Vector& theta, const Vector& u);

double exact_loglik(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& theta,
                    const Vector& u);

// Maximum likelihood estimate of theta with u held fixed as an offset.
// Throws BoundaryMleError when the iterates leave the ball of radius 50.
Vector exact_mle(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& u = Vector());

}  // namespace mergm
