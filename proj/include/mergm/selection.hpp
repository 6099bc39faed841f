#pragma once

#include <string>
#include <vector>

#include "mergm/driver.hpp"
#include "mergm/graph.hpp"
#include "mergm/sampler.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"
#include "mergm/variance.hpp"

namespace mergm {

enum class ModelKind { Ergm, Mergm };

struct KappaEstimate {
  double log_kappa = 0.0;
  double mc_se = 0.0;
  double min_ess = 0.0;  // smallest effective sample size among the bridge links
  std::vector<std::string> warnings;
};

struct KappaConfig {
  int bridges = 20;    // tempered links between the uniform law and the target
  SamplerConfig sampler;  // n_samples is the total over all temperatures
};

// log κ(theta, u) via geometric bridge sampling along
// p_b(y) ∝ exp(b (theta' s + u' t)), b = 0, 1/K, ..., 1, anchored at the
// uniform law with log κ(0, 0) = (n(n-1)/2) log 2.
KappaEstimate estimate_kappa(const UndirectedNetwork& start, const ModelSpec& spec, const Vector& theta,
                             const Vector& u, const KappaConfig& cfg);

// The direct average (1/N) sum exp(theta' s(y*) + u' t(y*)) over draws taken
// at (theta, u) itself, on the log scale. Kept for comparison; it does not
// estimate κ consistently.
double raw_log_kappa(const SampleSet& draws, const Vector& theta, const Vector& u);

// Var(s(y)) at (theta, u) from fresh simulations.
FisherEstimate fisher_variance(const UndirectedNetwork& start, const ModelSpec& spec, const Vector& theta,
                               const Vector& u, const SamplerConfig& cfg);

// Pieces of the Laplace-approximate log-likelihood
//   theta's + u't - log κ - u'u/(2 sigma2) - (n/2) log 2π - (n/2) log sigma2
//   - (1/2) log|Var(t) + I/sigma2|.
struct LaplaceTerms {
  int n = 0;
  double theta_s = 0.0;
  double u_t = 0.0;
  double log_kappa = 0.0;
  double u_u = 0.0;
  double sigma2 = 1.0;
  double log_det = 0.0;
};

double laplace_loglik(const LaplaceTerms& terms);
double log_det_hessian(const Matrix& var_t, double sigma2);

struct AicReport {
  ModelKind kind = ModelKind::Ergm;
  double loglik = 0.0;
  double aic = 0.0;
  int p = 0;
  double log_kappa = 0.0;
  double mc_se_loglik = 0.0;
  Matrix var_t;  // mERGM only
  long n_sim = 0;
  LaplaceTerms terms;  // mERGM only
  std::vector<std::string> warnings;
};

struct AicConfig {
  long n_sim = 1000;
  int bridges = 20;
  long burn_in = -1;
  long thin = -1;
  std::uint64_t seed = 1;
};

AicReport aic_mergm(const FitResult& fit, const UndirectedNetwork& net, const ModelSpec& spec,
                    const AicConfig& cfg);
AicReport aic_ergm(const Vector& theta_hat, const UndirectedNetwork& net, const ModelSpec& spec,
                   const AicConfig& cfg);

struct AicComparison {
  double log_ratio = 0.0;       // log(AIC_a / AIC_b); NaN unless both positive
  double log_ratio_se = 0.0;
  double difference = 0.0;      // AIC_a - AIC_b
  double difference_se = 0.0;
  bool inconclusive = false;    // |difference| < 2 combined MC-SE
};

AicComparison compare_aic(const AicReport& a, const AicReport& b);

}  // namespace mergm
