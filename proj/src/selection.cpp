#include "mergm/selection.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>

#include "mergm/rng.hpp"

namespace mergm {

namespace {

// log mean exp(a) and the delta-method variance of that estimate.
struct LogMean {
  double value;
  double variance;
  double ess;
};

LogMean log_mean_exp(const Vector& a) {
  const double count = static_cast<double>(a.size());
  const double lse = log_sum_exp(a);
  const Vector w = (a.array() - lse).exp().matrix();  // normalized weights
  const double sum_w2 = w.squaredNorm();
  // Relative variance of the mean of unnormalized weights: N sum w^2 - 1.
  const double rel_var = std::max(count * sum_w2 - 1.0, 0.0);
  return {lse - std::log(count), rel_var / count, 1.0 / sum_w2};
}

// Delete-one-batch jackknife standard error of log|Var(t) + I/sigma2|.
double log_det_jackknife_se(const Matrix& degrees, double sigma2, int batches) {
  const long n = degrees.rows();
  const long b = std::min<long>(batches, n);
  if (b < 2) return 0.0;
  const long size = n / b;
  const long used = size * b;
  const Vector total = degrees.topRows(used).colwise().sum().transpose();
  const Matrix cross = degrees.topRows(used).transpose() * degrees.topRows(used);
  Vector values(b);
  for (long k = 0; k < b; ++k) {
    const auto block = degrees.middleRows(k * size, size);
    const double m = static_cast<double>(used - size);
    const Vector mean = (total - block.colwise().sum().transpose()) / m;
    Matrix cov = (cross - block.transpose() * block) / m - mean * mean.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    values(k) = log_det_hessian(cov, sigma2);
  }
  const double centre = values.mean();
  return std::sqrt((static_cast<double>(b) - 1.0) / static_cast<double>(b) *
                   (values.array() - centre).square().sum());
}

}  // namespace

KappaEstimate estimate_kappa(const UndirectedNetwork& start, const ModelSpec& spec, const Vector& theta,
                             const Vector& u, const KappaConfig& cfg) {
  const int n = start.size();
  if (cfg.bridges < 1) throw ConfigError("need at least one bridge");
  const int points = cfg.bridges + 1;
  const SamplerConfig base = cfg.sampler.resolved(n);
  const long per_point = std::max<long>(base.n_samples / points, 2);

  // h(y) = theta' s(y) + u' t(y) for the draws at each temperature.
  std::vector<Vector> energies;
  energies.reserve(static_cast<std::size_t>(points));
  for (int b = 0; b < points; ++b) {
    const double beta = static_cast<double>(b) / cfg.bridges;
    SamplerConfig sc = base;
    sc.n_samples = per_point;
    sc.seed = derive_seed(base.seed, static_cast<std::uint64_t>(b));
    const Vector scaled_u = u.size() ? Vector(beta * u) : Vector();
    const SampleSet draws = sample(start, spec, beta * theta, scaled_u, sc);
    Vector h = draws.stats * theta;
    if (u.size()) h += draws.degrees * u;
    energies.push_back(std::move(h));
  }

  KappaEstimate est;
  est.log_kappa = static_cast<double>(start.dyad_count()) * std::numbers::ln2;
  est.min_ess = std::numeric_limits<double>::infinity();
  double variance = 0.0;
  const double step = 1.0 / cfg.bridges;
  for (int b = 0; b < cfg.bridges; ++b) {
    // log κ_{b+1}/κ_b = log E_b[e^{step h/2}] - log E_{b+1}[e^{-step h/2}]
    const LogMean up = log_mean_exp(0.5 * step * energies[static_cast<std::size_t>(b)]);
    const LogMean down = log_mean_exp(-0.5 * step * energies[static_cast<std::size_t>(b + 1)]);
    est.log_kappa += up.value - down.value;
    variance += up.variance + down.variance;
    est.min_ess = std::min({est.min_ess, up.ess, down.ess});
  }
  est.mc_se = std::sqrt(variance);
  if (est.min_ess < 50.0) {
    est.warnings.push_back("bridge effective sample size below 50 (" + std::to_string(est.min_ess) +
                           "); increase draws or bridges");
  }
  return est;
}

double raw_log_kappa(const SampleSet& draws, const Vector& theta, const Vector& u) {
  Vector h = draws.stats * theta;
  if (u.size()) h += draws.degrees * u;
  return log_sum_exp(h) - std::log(static_cast<double>(h.size()));
}

FisherEstimate fisher_variance(const UndirectedNetwork& start, const ModelSpec& spec, const Vector& theta,
                               const Vector& u, const SamplerConfig& cfg) {
  return fisher_from_stats(sample(start, spec, theta, u, cfg).stats);
}

double log_det_hessian(const Matrix& var_t, double sigma2) {
  Matrix h = var_t;
  h.diagonal().array() += 1.0 / sigma2;
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) throw std::runtime_error("Var(t) + I/sigma2 is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double laplace_loglik(const LaplaceTerms& t) {
  const double half_n = 0.5 * static_cast<double>(t.n);
  return t.theta_s + t.u_t - t.log_kappa - 0.5 * t.u_u / t.sigma2 -
         half_n * std::log(2.0 * std::numbers::pi) - half_n * std::log(t.sigma2) - 0.5 * t.log_det;
}

AicReport aic_mergm(const FitResult& fit, const UndirectedNetwork& net, const ModelSpec& spec,
                    const AicConfig& cfg) {
  const int n = net.size();
  if (fit.u.size() != n || fit.theta.size() != spec.size()) {
    throw ConfigError("fit does not match the network and model");
  }
  AicReport report;
  report.kind = ModelKind::Mergm;
  report.p = spec.size();
  report.n_sim = cfg.n_sim;

  SamplerConfig sc;
  sc.burn_in = cfg.burn_in;
  sc.thin = cfg.thin;
  sc.n_samples = cfg.n_sim;
  sc.seed = derive_seed(cfg.seed, 1);
  const SampleSet draws = sample(net, spec, fit.theta, fit.u, sc);
  report.var_t = estimate_var_t(draws.degrees);

  KappaConfig kc;
  kc.bridges = cfg.bridges;
  kc.sampler = sc;
  kc.sampler.seed = derive_seed(cfg.seed, 2);
  const KappaEstimate kappa = estimate_kappa(net, spec, fit.theta, fit.u, kc);
  report.log_kappa = kappa.log_kappa;
  report.mc_se_loglik = kappa.mc_se;
  report.warnings = kappa.warnings;

  LaplaceTerms& t = report.terms;
  t.n = n;
  t.theta_s = fit.theta.dot(statistics(net, spec));
  t.u_t = fit.u.dot(net.degree_vector().cast<double>());
  t.log_kappa = kappa.log_kappa;
  t.u_u = fit.u.squaredNorm();
  t.sigma2 = fit.sigma2;
  t.log_det = log_det_hessian(report.var_t, fit.sigma2);
  if (fit.sigma2_at_floor) report.warnings.push_back("sigma2 at floor: effectively homogeneous");

  report.loglik = laplace_loglik(t);
  report.aic = -2.0 * report.loglik + 2.0 * (report.p + 1);
  const double det_se = 0.5 * log_det_jackknife_se(draws.degrees, fit.sigma2, 20);
  report.mc_se_loglik = std::hypot(kappa.mc_se, det_se);
  return report;
}

AicReport aic_ergm(const Vector& theta_hat, const UndirectedNetwork& net, const ModelSpec& spec,
                   const AicConfig& cfg) {
  if (theta_hat.size() != spec.size()) throw ConfigError("theta does not match the model");
  AicReport report;
  report.kind = ModelKind::Ergm;
  report.p = spec.size();
  report.n_sim = cfg.n_sim;

  KappaConfig kc;
  kc.bridges = cfg.bridges;
  kc.sampler.burn_in = cfg.burn_in;
  kc.sampler.thin = cfg.thin;
  kc.sampler.n_samples = cfg.n_sim;
  kc.sampler.seed = derive_seed(cfg.seed, 2);
  const KappaEstimate kappa = estimate_kappa(net, spec, theta_hat, Vector(), kc);
  report.log_kappa = kappa.log_kappa;
  report.mc_se_loglik = kappa.mc_se;
  report.warnings = kappa.warnings;
  report.loglik = theta_hat.dot(statistics(net, spec)) - kappa.log_kappa;
  report.aic = -2.0 * report.loglik + 2.0 * report.p;
  return report;
}

AicComparison compare_aic(const AicReport& a, const AicReport& b) {
  AicComparison c;
  const double se_a = 2.0 * a.mc_se_loglik;
  const double se_b = 2.0 * b.mc_se_loglik;
  c.difference = a.aic - b.aic;
  c.difference_se = std::hypot(se_a, se_b);
  c.inconclusive = std::abs(c.difference) < 2.0 * c.difference_se;
  if (a.aic > 0.0 && b.aic > 0.0) {
    c.log_ratio = std::log(a.aic / b.aic);
    c.log_ratio_se = std::hypot(se_a / a.aic, se_b / b.aic);
  } else {
    c.log_ratio = std::numeric_limits<double>::quiet_NaN();
    c.log_ratio_se = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

}  // namespace mergm
