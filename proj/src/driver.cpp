#include "mergm/driver.hpp"

#include <cmath>

#include "mergm/rng.hpp"

namespace mergm {

FitResult fit_mergm(const UndirectedNetwork& net, const ModelSpec& spec, const DriverConfig& cfg) {
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  const int n = net.size();

  FitResult fit;
  fit.random_effects = cfg.random_effects;
  NodeEffects effects = NodeEffects::zeros(n, cfg.sigma2_start);

  if (cfg.random_effects) {
    if (cfg.u_start.size() == n) {
      effects.u = cfg.u_start;
    } else {
      const PqlResult step0 = fit_pql(build_dyad_design(net, spec), true, effects, cfg.pql);
      effects = step0.effects;
    }
  }

  const Vector u0 = cfg.random_effects ? effects.u : Vector();
  Vector theta = cfg.theta_start.size() == spec.size() ? cfg.theta_start
                                                         : maximum_pseudolikelihood(net, spec, u0);

  const bool single_pass = std::isinf(cfg.tol) || cfg.max_iter == 1;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    fit.iterations = t;
    McmleConfig mc = cfg.mcmle;
    mc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    mc.refine_on_stop = cfg.mcmle.refine_on_stop && single_pass;

    McmleResult step1;
    try {
      step1 = fit_theta(net, spec, cfg.random_effects ? effects.u : Vector(), theta, mc);
    } catch (const DegeneracyError& e) {
      throw FitDegeneracyError(e, t);
    }
    const double change = (step1.theta - theta).lpNorm<Eigen::Infinity>();
    theta = step1.theta;
    fit.theta_se = step1.se;
    fit.last_mcmle = step1.diagnostics;

    if (cfg.random_effects) {
      const PqlResult step2 = fit_pql(build_dyad_design(net, spec, theta), false, effects, cfg.pql);
      effects = step2.effects;
      fit.sigma2_at_floor = step2.homogeneous;
    }
    fit.trace.push_back({theta, cfg.random_effects ? effects.sigma2 : 0.0});

    const bool first = t == 1;
    if (std::isinf(cfg.tol) || (!first && change < cfg.tol)) {
      fit.converged = true;
      break;
    }
  }

  fit.theta = theta;
  if (cfg.average_last > 0) {
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(cfg.average_last), fit.trace.size());
    Vector mean = Vector::Zero(spec.size());
    for (std::size_t r = fit.trace.size() - k; r < fit.trace.size(); ++r) mean += fit.trace[r].theta;
    fit.theta = mean / static_cast<double>(k);
  }
  fit.u = cfg.random_effects ? effects.u : Vector::Zero(n);
  fit.sigma2 = cfg.random_effects ? effects.sigma2 : 0.0;
  return fit;
}

FitResult fit_ergm(const UndirectedNetwork& net, const ModelSpec& spec, const DriverConfig& cfg) {
  DriverConfig c = cfg;
  c.random_effects = false;
  // Without Step 2 the loop is a plain MC-MLE; one pass suffices.
  c.max_iter = 1;
  c.tol = std::numeric_limits<double>::infinity();
  return fit_mergm(net, spec, c);
}

}  // namespace mergm
