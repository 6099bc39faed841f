#include "mergm/glmm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace mergm {

namespace {

constexpr double kMinWeight = 1e-10;

Vector linear_predictor(const DyadDesign& design, const Vector& u, double intercept) {
  Vector eta = design.offset.array() + intercept;
  for (long r = 0; r < design.rows(); ++r) {
    eta(r) += u(design.first[static_cast<std::size_t>(r)]) + u(design.second[static_cast<std::size_t>(r)]);
  }
  return eta;
}

Vector incidence_transpose_times(const DyadDesign& design, const Vector& v) {
  Vector out = Vector::Zero(design.n);
  for (long r = 0; r < design.rows(); ++r) {
    out(design.first[static_cast<std::size_t>(r)]) += v(r);
    out(design.second[static_cast<std::size_t>(r)]) += v(r);
  }
  return out;
}

// Bernoulli log-likelihood minus the Gaussian penalty u'u / (2 sigma2).
double penalized_loglik(const DyadDesign& design, const Vector& u, double intercept, double sigma2) {
  const Vector eta = linear_predictor(design, u, intercept);
  double total = 0.0;
  for (long r = 0; r < design.rows(); ++r) {
    const double e = eta(r);
    // log(1 + exp(e)) without overflow
    const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    total += design.response(r) * e - softplus;
  }
  return total - 0.5 * u.squaredNorm() / sigma2;
}

}  // namespace

DyadDesign build_dyad_design(const UndirectedNetwork& net, const ModelSpec& spec,
                             const Vector& theta) {
  const int n = net.size();
  if (theta.size() != 0 && theta.size() != spec.size()) {
    throw ConfigError("theta dimension does not match the model");
  }
  DyadDesign d;
  d.n = n;
  const long rows = net.dyad_count();
  d.first.reserve(static_cast<std::size_t>(rows));
  d.second.reserve(static_cast<std::size_t>(rows));
  d.response.resize(rows);
  d.offset = Vector::Zero(rows);
  ChangeStatEvaluator change(spec, n);
  Vector delta(spec.size());
  long r = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j, ++r) {
      d.first.push_back(i);
      d.second.push_back(j);
      d.response(r) = net.has_edge(i, j) ? 1.0 : 0.0;
      if (theta.size() > 0) {
        change(net, i, j, delta);
        d.offset(r) = theta.dot(delta);
      }
    }
  }
  return d;
}

Matrix incidence_gram(const DyadDesign& design, const Vector& weights) {
  Matrix g = Matrix::Zero(design.n, design.n);
  for (long r = 0; r < design.rows(); ++r) {
    const auto i = design.first[static_cast<std::size_t>(r)];
    const auto j = design.second[static_cast<std::size_t>(r)];
    g(i, i) += weights(r);
    g(j, j) += weights(r);
    g(i, j) += weights(r);
    g(j, i) += weights(r);
  }
  return g;
}

Vector penalized_solve(const DyadDesign& design, const Vector& weights, const Vector& residual,
                       double sigma2) {
  Matrix lhs = incidence_gram(design, weights);
  lhs.diagonal().array() += 1.0 / sigma2;
  const Vector rhs = incidence_transpose_times(design, weights.cwiseProduct(residual));
  return lhs.llt().solve(rhs);
}

Vector penalized_score(const DyadDesign& design, const NodeEffects& effects, double intercept) {
  const Vector eta = linear_predictor(design, effects.u, intercept);
  const Vector mu = eta.unaryExpr([](double x) { return logistic(x); });
  return incidence_transpose_times(design, design.response - mu) - effects.u / effects.sigma2;
}

PqlResult fit_pql(const DyadDesign& design, bool with_intercept, const NodeEffects& init,
                  const PqlOptions& options) {
  const int n = design.n;
  if (init.u.size() != n) throw ConfigError("initial u has the wrong length");
  if (design.rows() != static_cast<long>(n) * (n - 1) / 2) {
    throw ConfigError("dyad design must contain every dyad exactly once");
  }

  PqlResult result;
  Vector u = init.u;
  double sigma2 = std::clamp(init.sigma2, options.sigma2_floor, options.sigma2_cap);
  double intercept = 0.0;
  if (with_intercept) {
    // Intercept-only logistic fit with the offset, as the starting point.
    const Vector ones = Vector::Ones(design.rows());
    intercept = logistic_regression(Matrix(ones), design.response, linear_predictor(design, u, 0.0))(0);
    intercept = std::clamp(intercept, -options.intercept_cap, options.intercept_cap);
  }

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    const Vector eta = linear_predictor(design, u, intercept);
    Vector weights(design.rows());
    Vector working(design.rows());  // z - offset
    for (long r = 0; r < design.rows(); ++r) {
      const double mu = logistic(eta(r));
      const double w = std::max(mu * (1.0 - mu), kMinWeight);
      weights(r) = w;
      working(r) = eta(r) - design.offset(r) + (design.response(r) - mu) / w;
    }

    Matrix gram = incidence_gram(design, weights);
    Matrix penalized = gram;
    penalized.diagonal().array() += 1.0 / sigma2;
    const Vector ztwz = incidence_transpose_times(design, weights.cwiseProduct(working));

    Vector u_new;
    double intercept_new = 0.0;
    if (with_intercept) {
      // Henderson's mixed model equations with a single fixed intercept.
      Matrix lhs(n + 1, n + 1);
      lhs(0, 0) = weights.sum();
      lhs.block(1, 0, n, 1) = gram.diagonal();  // Z'W1: per-node weight sums
      lhs.block(0, 1, 1, n) = lhs.block(1, 0, n, 1).transpose();
      lhs.block(1, 1, n, n) = penalized;
      Vector rhs(n + 1);
      rhs(0) = weights.dot(working);
      rhs.tail(n) = ztwz;
      const Vector sol = lhs.ldlt().solve(rhs);
      intercept_new = sol(0);
      u_new = sol.tail(n);
      if (std::abs(intercept_new) > options.intercept_cap || !std::isfinite(intercept_new)) {
        intercept_new = std::clamp(std::isfinite(intercept_new) ? intercept_new : -options.intercept_cap,
                                   -options.intercept_cap, options.intercept_cap);
        u_new = penalized.llt().solve(
            incidence_transpose_times(design, weights.cwiseProduct((working.array() - intercept_new).matrix())));
      }
    } else {
      u_new = penalized.llt().solve(ztwz);
    }

    // Step halving on the penalized log-likelihood at the current sigma2.
    const double current = penalized_loglik(design, u, intercept, sigma2);
    for (int h = 0; h < 30; ++h) {
      const double candidate = penalized_loglik(design, u_new, intercept_new, sigma2);
      if (std::isfinite(candidate) && candidate >= current - 1e-10 * (1.0 + std::abs(current))) break;
      u_new = 0.5 * (u_new + u);
      intercept_new = 0.5 * (intercept_new + intercept);
    }

    // Variance component: the fixed point sigma2 = (u'u + tr C) / n with
    // C = (Z'WZ + I/sigma2)^-1, iterated in the equivalent form
    // sigma2 = u'u / (n - tr(C) / sigma2).
    const Matrix cov = penalized.llt().solve(Matrix::Identity(n, n));
    const double edf = static_cast<double>(n) - cov.trace() / sigma2;
    double sigma2_new = edf > 1e-12 ? u_new.squaredNorm() / edf : options.sigma2_floor;
    sigma2_new = std::clamp(sigma2_new, options.sigma2_floor, options.sigma2_cap);

    const double du = (u_new - u).lpNorm<Eigen::Infinity>();
    const double ds = std::abs(sigma2_new - sigma2) / sigma2;
    u = u_new;
    sigma2 = sigma2_new;
    intercept = intercept_new;
    if (du < options.u_tol && ds < options.sigma2_rel_tol) {
      result.converged = true;
      break;
    }
  }

  result.effects = {u, sigma2};
  result.intercept = intercept;
  result.homogeneous = sigma2 <= options.sigma2_floor * (1.0 + 1e-9);
  return result;
}

Vector logistic_regression(const Matrix& X, const Vector& y, const Vector& offset, int max_iter) {
  constexpr double cap = 30.0;
  Vector beta = Vector::Zero(X.cols());
  for (int iter = 0; iter < max_iter; ++iter) {
    const Vector eta = X * beta + offset;
    Vector w(y.size());
    Vector score_part(y.size());
    for (long r = 0; r < y.size(); ++r) {
      const double mu = logistic(eta(r));
      w(r) = std::max(mu * (1.0 - mu), kMinWeight);
      score_part(r) = y(r) - mu;
    }
    const Matrix info = X.transpose() * w.asDiagonal() * X;
    const Vector score = X.transpose() * score_part;
    Eigen::LDLT<Matrix> ldlt(info + 1e-10 * Matrix::Identity(X.cols(), X.cols()));
    Vector step = ldlt.solve(score);
    if (!step.allFinite()) break;
    beta = (beta + step).cwiseMax(-cap).cwiseMin(cap);
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return beta;
}

}  // namespace mergm
