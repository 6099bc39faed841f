#include "mergm/enumerate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <string>
#include <utility>
#include <vector>

namespace mergm {

namespace {

std::vector<std::pair<NodeId, NodeId>> dyads_of(int n) {
  std::vector<std::pair<NodeId, NodeId>> dyads;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) dyads.emplace_back(i, j);
  }
  return dyads;
}

constexpr double kMleBound = 50.0;

}  // namespace

GraphEnumeration::GraphEnumeration(int n, const ModelSpec& spec) : n_(n) {
  if (n > kMaxNodes) {
    throw LimitError("enumeration is limited to n <= " + std::to_string(kMaxNodes) +
                     " nodes (requested " + std::to_string(n) + ")");
  }
  if (n < 1) throw ConfigError("enumeration needs at least one node");
  const auto dyads = dyads_of(n);
  const long total = 1L << dyads.size();
  stats_.resize(total, spec.size());
  degrees_.resize(total, n);
  for (long g = 0; g < total; ++g) {
    UndirectedNetwork net(n);
    for (std::size_t d = 0; d < dyads.size(); ++d) {
      if ((g >> d) & 1L) net.toggle(dyads[d].first, dyads[d].second);
    }
    stats_.row(g) = statistics(net, spec).transpose();
    degrees_.row(g) = net.degree_vector().cast<double>().transpose();
  }
}

UndirectedNetwork GraphEnumeration::network(long index) const {
  const auto dyads = dyads_of(n_);
  UndirectedNetwork net(n_);
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    if ((index >> d) & 1L) net.toggle(dyads[d].first, dyads[d].second);
  }
  return net;
}

long GraphEnumeration::index_of(const UndirectedNetwork& net) const {
  if (net.size() != n_) throw ConfigError("network size does not match enumeration");
  const auto dyads = dyads_of(n_);
  long index = 0;
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    if (net.has_edge(dyads[d].first, dyads[d].second)) index |= 1L << d;
  }
  return index;
}

Vector GraphEnumeration::log_weights(const Vector& theta, const Vector& u) const {
  if (theta.size() != stats_.cols()) throw ConfigError("theta dimension mismatch");
  Vector w = stats_ * theta;
  if (u.size() > 0) {
    if (u.size() != n_) throw ConfigError("u dimension mismatch");
    w += degrees_ * u;
  }
  return w;
}

double GraphEnumeration::log_kappa(const Vector& theta, const Vector& u) const {
  return log_sum_exp(log_weights(theta, u));
}

Vector GraphEnumeration::probabilities(const Vector& theta, const Vector& u) const {
  const Vector lw = log_weights(theta, u);
  return (lw.array() - log_sum_exp(lw)).exp().matrix();
}

GraphEnumeration::Moments GraphEnumeration::moments(const Vector& theta, const Vector& u) const {
  const Vector prob = probabilities(theta, u);
  Moments m;
  m.mean_s = stats_.transpose() * prob;
  m.mean_t = degrees_.transpose() * prob;
  const Matrix cs = stats_.rowwise() - m.mean_s.transpose();
  const Matrix ct = degrees_.rowwise() - m.mean_t.transpose();
  m.cov_s = cs.transpose() * prob.asDiagonal() * cs;
  m.cov_t = ct.transpose() * prob.asDiagonal() * ct;
  return m;
}

double exact_log_kappa(int n, const ModelSpec& spec, const Vector& theta, const Vector& u) {
  return GraphEnumeration(n, spec).log_kappa(theta, u);
}

double exact_kappa(int n, const ModelSpec& spec, const Vector& theta, const Vector& u) {
  return std::exp(exact_log_kappa(n, spec, theta, u));
}

double exact_loglik(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& theta,
                    const Vector& u) {
  const GraphEnumeration all(net.size(), spec);
  double value = statistics(net, spec).dot(theta);
  if (u.size() > 0) value += net.degree_vector().cast<double>().dot(u);
  return value - all.log_kappa(theta, u);
}

Vector exact_mle(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& u) {
  const GraphEnumeration all(net.size(), spec);
  const Vector observed = statistics(net, spec);
  const long index = all.index_of(net);
  auto loglik = [&](const Vector& theta) {
    return all.log_weights(theta, u)(index) - all.log_kappa(theta, u);
  };

  Vector theta = Vector::Zero(spec.size());
  double current = loglik(theta);
  for (int iter = 0; iter < 500; ++iter) {
    const auto m = all.moments(theta, u);
    const Vector gradient = observed - m.mean_s;
    Eigen::LDLT<Matrix> ldlt(m.cov_s);
    Vector step = ldlt.solve(gradient);
    const double min_curvature = Eigen::SelfAdjointEigenSolver<Matrix>(m.cov_s).eigenvalues().minCoeff();
    if (ldlt.info() != Eigen::Success || !step.allFinite() || min_curvature < 1e-9) {
      // Information collapsed: the mass sits on a face of the hull.
      throw BoundaryMleError("information matrix singular; observed statistic is on the boundary");
    }
    // At an interior optimum Newton steps shrink quadratically; on the
    // boundary they stay O(1) and theta walks off to infinity.
    if (step.lpNorm<Eigen::Infinity>() < 1e-12) return theta;
    double scale = 1.0;
    Vector next = theta + step;
    double value = loglik(next);
    while (!(value >= current - 1e-12) && scale > 1e-10) {
      scale /= 2.0;
      next = theta + scale * step;
      value = loglik(next);
    }
    theta = next;
    current = value;
    if (theta.norm() > kMleBound) {
      throw BoundaryMleError("MLE diverges (|theta| > 50); observed statistic on the boundary");
    }
  }
  throw BoundaryMleError("Newton iteration did not converge; MLE likely on the boundary");
}

}  // namespace mergm
