#include "mergm/mcmcmle.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>

#include "mergm/glmm.hpp"
#include "mergm/rng.hpp"

namespace mergm {

void McmleConfig::validate() const {
  if (n_sim < 100) throw ConfigError("n_sim must be at least 100");
  if (max_outer < 1) throw ConfigError("max_outer must be at least 1");
  if (step_gamma_grid.empty()) throw ConfigError("step grid must not be empty");
  for (double g : step_gamma_grid) {
    if (!(g > 0.0 && g <= 1.0)) throw ConfigError("step lengths must lie in (0, 1]");
  }
  if (batches < 2) throw ConfigError("at least two batches are needed");
}

SamplerConfig McmleConfig::sampler(std::uint64_t stream) const {
  SamplerConfig s;
  s.burn_in = burn_in;
  s.thin = thin;
  s.n_samples = n_sim;
  s.chains = chains;
  s.seed = derive_seed(seed, stream);
  return s;
}

Vector maximum_pseudolikelihood(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& u) {
  const int n = net.size();
  const long rows = net.dyad_count();
  Matrix X(rows, spec.size());
  Vector y(rows);
  Vector offset = Vector::Zero(rows);
  ChangeStatEvaluator change(spec, n);
  Vector delta(spec.size());
  long r = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j, ++r) {
      change(net, i, j, delta);
      X.row(r) = delta.transpose();
      y(r) = net.has_edge(i, j) ? 1.0 : 0.0;
      if (u.size() > 0) offset(r) = u(i) + u(j);
    }
  }
  return logistic_regression(X, y, offset);
}

double importance_log_ratio(const Matrix& stats, const Vector& target, const Vector& delta) {
  const Vector a = stats * delta;
  return delta.dot(target) - (log_sum_exp(a) - std::log(static_cast<double>(stats.rows())));
}

NewtonTrace maximize_importance_ratio(const Matrix& stats, const Vector& target) {
  // Centering the draws changes the objective by a constant only.
  const Vector center = stats.colwise().mean().transpose();
  const Matrix centered = stats.rowwise() - center.transpose();
  const Vector t = target - center;
  const Vector scale = population_covariance(stats).diagonal().cwiseSqrt();

  NewtonTrace trace;
  trace.delta = Vector::Zero(stats.cols());
  double value = importance_log_ratio(centered, t, trace.delta);
  for (int iter = 0; iter < 200; ++iter) {
    const Vector a = centered * trace.delta;
    const Vector w = (a.array() - log_sum_exp(a)).exp().matrix();
    const Vector mean_w = centered.transpose() * w;
    const Vector gradient = t - mean_w;
    double rel = 0.0;
    for (Eigen::Index k = 0; k < gradient.size(); ++k) {
      rel = std::max(rel, std::abs(gradient(k)) / std::max(scale(k), 1e-12));
    }
    if (rel < 1e-9) break;
    const Matrix dev = centered.rowwise() - mean_w.transpose();
    const Matrix cov = dev.transpose() * w.asDiagonal() * dev;
    const Vector step = symmetric_pinv(cov, 1e-12) * gradient;
    if (!step.allFinite()) break;

    double factor = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      const Vector candidate = trace.delta + factor * step;
      const double cv = importance_log_ratio(centered, t, candidate);
      if (std::isfinite(cv) && cv >= value) {
        trace.delta = candidate;
        value = cv;
        improved = true;
        break;
      }
      factor /= 2.0;
      ++trace.halvings;
    }
    if (!improved) break;
    trace.objective.push_back(value);
    if ((factor * step).lpNorm<Eigen::Infinity>() < 1e-12) break;
  }
  return trace;
}

namespace {

// Used when the pseudolikelihood fit separates (some coefficient pinned at
// the logistic cap): edges at the logit of the density, everything else 0.
Vector density_start(const UndirectedNetwork& net, const ModelSpec& spec) {
  Vector theta = Vector::Zero(spec.size());
  const double dyads = static_cast<double>(net.dyad_count());
  const double density = (static_cast<double>(net.edge_count()) + 0.5) / (dyads + 1.0);
  for (int k = 0; k < spec.size(); ++k) {
    if (spec[k].kind == TermKind::Edges) theta(k) = logit(density);
  }
  return theta;
}

Vector starting_theta(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& u) {
  const Vector mple = maximum_pseudolikelihood(net, spec, u);
  if (!mple.allFinite() || mple.lpNorm<Eigen::Infinity>() >= 29.0) return density_start(net, spec);
  return mple;
}

// Squared Mahalanobis distance of d under `cov`; +inf when d has a component
// in the null space of cov.
double mahalanobis2(const Matrix& cov, const Vector& d) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector& values = eig.eigenvalues();
  const double top = values.cwiseAbs().maxCoeff();
  const Vector proj = eig.eigenvectors().transpose() * d;
  const double dscale = std::max(1.0, d.lpNorm<Eigen::Infinity>());
  double total = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (top > 0.0 && values(k) > 1e-10 * top) {
      total += proj(k) * proj(k) / values(k);
    } else if (std::abs(proj(k)) > 1e-8 * dscale) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return total;
}

bool inside_hull(const Vector& mean, const Matrix& cov, const Vector& target, double sd_factor) {
  const Vector d = target - mean;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double sd = std::sqrt(std::max(cov(k, k), 0.0));
    if (std::abs(d(k)) > sd_factor * sd + 1e-9 * (1.0 + std::abs(mean(k)))) return false;
  }
  return mahalanobis2(cov, d) <= sd_factor * sd_factor * static_cast<double>(d.size());
}

// Hotelling T^2 of observed - mean, with the Monte-Carlo covariance of the
// mean taken from batch means (robust to chain autocorrelation).
double batch_hotelling(const Matrix& stats, const Vector& observed, int batches) {
  const long n = stats.rows();
  const long b = std::min<long>(batches, n / 2);
  const long size = n / b;
  Matrix means(b, stats.cols());
  for (long k = 0; k < b; ++k) {
    means.row(k) = stats.middleRows(k * size, size).colwise().mean();
  }
  const Vector grand = means.colwise().mean().transpose();
  const Matrix dev = means.rowwise() - grand.transpose();
  const Matrix mc_cov = dev.transpose() * dev / static_cast<double>(b - 1) / static_cast<double>(b);
  return mahalanobis2(mc_cov, observed - grand);
}

}  // namespace

McmleResult fit_theta(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& u_offset,
                      const Vector& theta0, const McmleConfig& cfg) {
  cfg.validate();
  const int p = spec.size();
  if (u_offset.size() != 0 && u_offset.size() != net.size()) {
    throw ConfigError("offset length must equal the node count");
  }
  Vector theta = theta0.size() ? theta0 : starting_theta(net, spec, u_offset);
  if (theta.size() != p || !theta.allFinite()) throw ConfigError("invalid starting theta");

  const Vector observed = statistics(net, spec);
  const long batches = std::min<long>(cfg.batches, cfg.n_sim / 2);
  const double stop_threshold = [&] {
    // T^2 ~ p (B-1)/(B-p) F(p, B-p) under the null.
    const double b = static_cast<double>(batches);
    if (b - p < 1) return 0.0;
    boost::math::fisher_f dist(p, b - p);
    return p * (b - 1.0) / (b - p) * boost::math::quantile(dist, cfg.stop_quantile);
  }();

  McmleResult result;
  McmleDiagnostics& diag = result.diagnostics;
  double last_gamma = 0.0;
  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    diag.outer_iterations = outer;
    const SampleSet sims = sample(net, spec, theta, u_offset, cfg.sampler(static_cast<std::uint64_t>(outer)));
    diag.acceptance_rate = sims.acceptance_rate();
    const Vector mean = sims.stats.colwise().mean().transpose();
    const Matrix cov = population_covariance(sims.stats);

    // A statistic that never varies means theta has run off to infinity:
    // either the observed value sits on the boundary of the support or the
    // chain is frozen in a degenerate region.
    if ((cov.diagonal().array() <= 0.0).any()) {
      diag.gammas.push_back(0.0);
      diag.stop_reason = "simulated statistics collapsed to a constant";
      throw DegeneracyError("degenerate model: " + diag.stop_reason, theta, diag);
    }

    const double t2 = batch_hotelling(sims.stats, observed, cfg.batches);
    diag.hotelling.push_back(t2);
    if (t2 <= stop_threshold) {
      diag.gammas.push_back(1.0);
      diag.stop_reason = "observed statistic consistent with simulated mean";
      // One last importance-sampling step on the same draws sharpens the
      // estimate; the target is well inside the hull here.
      if (cfg.refine_on_stop && inside_hull(mean, cov, observed, cfg.hull_sd_factor)) {
        const Vector refined = theta + maximize_importance_ratio(sims.stats, observed).delta;
        if (refined.allFinite()) theta = refined;
      }
      const FisherEstimate f = fisher_from_stats(sims.stats);
      result.theta = theta;
      result.se = f.se;
      result.information = f.information;
      diag.fisher_singular = f.singular;
      return result;
    }

    double gamma = 0.0;
    for (double g : cfg.step_gamma_grid) {
      if (inside_hull(mean, cov, g * observed + (1.0 - g) * mean, cfg.hull_sd_factor) && g > gamma) {
        gamma = g;
      }
    }
    if (gamma == 0.0) {
      gamma = *std::min_element(cfg.step_gamma_grid.begin(), cfg.step_gamma_grid.end());
    }
    diag.gammas.push_back(gamma);
    last_gamma = gamma;

    const Vector target = gamma * observed + (1.0 - gamma) * mean;
    const NewtonTrace step = maximize_importance_ratio(sims.stats, target);
    const Vector next = theta + step.delta;
    if (!next.allFinite()) {
      diag.stop_reason = "non-finite Newton update";
      throw DegeneracyError("degenerate model: " + diag.stop_reason, theta, diag);
    }
    const double change = step.delta.lpNorm<Eigen::Infinity>();
    theta = next;
    if (gamma == 1.0 && change < cfg.newton_tol) {
      diag.stop_reason = "Newton update below tolerance";
      const FisherEstimate f = fisher_from_stats(sims.stats);
      result.theta = theta;
      result.se = f.se;
      result.information = f.information;
      diag.fisher_singular = f.singular;
      return result;
    }
  }

  if (last_gamma < 1.0) {
    diag.stop_reason = "observed statistic never inside the simulated hull";
    throw DegeneracyError("degenerate model: " + diag.stop_reason + " after " +
                              std::to_string(cfg.max_outer) + " iterations",
                          theta, diag);
  }
  diag.stop_reason = "maximum outer iterations reached";
  const SampleSet final_sims =
      sample(net, spec, theta, u_offset, cfg.sampler(static_cast<std::uint64_t>(cfg.max_outer + 1)));
  const FisherEstimate f = fisher_from_stats(final_sims.stats);
  result.theta = theta;
  result.se = f.se;
  result.information = f.information;
  diag.fisher_singular = f.singular;
  return result;
}

}  // namespace mergm
