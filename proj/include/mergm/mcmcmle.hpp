#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mergm/graph.hpp"
#include "mergm/sampler.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"
#include "mergm/variance.hpp"

namespace mergm {

struct McmleConfig {
  long n_sim = 5000;
  int max_outer = 25;
  std::vector<double> step_gamma_grid{1.0, 0.8, 0.6, 0.4, 0.2, 0.1};
  double newton_tol = 1e-2;
  std::uint64_t seed = 1;

  // Sampler settings for each simulation batch (< 0 picks the n-based default).
  long burn_in = -1;
  long thin = -1;
  int chains = 1;

  // Approximate hull test for the stepped target: componentwise within
  // hull_sd_factor standard deviations of the simulated mean, and squared
  // Mahalanobis distance at most hull_sd_factor^2 * p.
  double hull_sd_factor = 1.5;

  // Early stop: observed statistic consistent with the simulated mean by a
  // batch-means Hotelling test at this quantile.
  double stop_quantile = 0.5;
  int batches = 20;
  // On an early stop, take one final importance-sampling step on the same
  // draws. Off inside fixed-point loops, where an unchanged theta is the
  // convergence signal.
  bool refine_on_stop = true;

  void validate() const;
  SamplerConfig sampler(std::uint64_t stream) const;
};

struct McmleDiagnostics {
  int outer_iterations = 0;
  std::vector<double> gammas;        // step length used per outer iteration
  std::vector<double> hotelling;     // batch-means T^2 per outer iteration
  std::string stop_reason;
  double acceptance_rate = 0.0;
  bool fisher_singular = false;
};

struct McmleResult {
  Vector theta;
  Vector se;
  Matrix information;
  McmleDiagnostics diagnostics;
};

// The observed statistic could not be brought inside the simulated hull.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, Vector last_theta, McmleDiagnostics diagnostics)
      : std::runtime_error(what), last_theta(std::move(last_theta)), diagnostics(std::move(diagnostics)) {}

  Vector last_theta;
  McmleDiagnostics diagnostics;
};

// Logistic regression of y_ij on Δ_ij s(y) with offset u_i + u_j.
Vector maximum_pseudolikelihood(const UndirectedNetwork& net, const ModelSpec& spec,
                                const Vector& u = Vector());

// Importance-sampled log-likelihood ratio
//   delta' target - log( mean_k exp(delta' s_k) ),  delta = theta - theta0,
// for draws s_k (rows of `stats`) simulated at theta0.
double importance_log_ratio(const Matrix& stats, const Vector& target, const Vector& delta);

struct NewtonTrace {
  Vector delta;
  std::vector<double> objective;  // value after each accepted step
  int halvings = 0;
};

// Maximizes importance_log_ratio over delta by damped Newton.
NewtonTrace maximize_importance_ratio(const Matrix& stats, const Vector& target);

// Monte-Carlo MLE of theta in the ERGM with offset u' t(y), with Hummel-style
// stepping toward the observed statistic. Empty theta0 starts from the MPLE.
McmleResult fit_theta(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& u_offset,
                      const Vector& theta0, const McmleConfig& cfg);

}  // namespace mergm
