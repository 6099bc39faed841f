#pragma once

#include <vector>

#include "mergm/graph.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"

namespace mergm {

// Node random effects u ~ N(0, sigma2 I).
struct NodeEffects {
  Vector u;
  double sigma2 = 0.5;

  static NodeEffects zeros(int n, double sigma2 = 0.5) { return {Vector::Zero(n), sigma2}; }
};

// One row per unordered dyad {i, j}, i < j, in lexicographic order.
struct DyadDesign {
  int n = 0;
  std::vector<NodeId> first;
  std::vector<NodeId> second;
  Vector response;  // y_ij
  Vector offset;    // theta' Δ_ij s(y)

  long rows() const { return response.size(); }
};

// Responses from `net`, offsets theta' Δ_ij s(y) on the observed network.
// Empty theta gives a zero offset column.
DyadDesign build_dyad_design(const UndirectedNetwork& net, const ModelSpec& spec,
                             const Vector& theta = Vector());

// Z'WZ for the two-hot dyad-to-node incidence Z: off-diagonals w_ij, diagonal
// sum_j w_ij.
Matrix incidence_gram(const DyadDesign& design, const Vector& weights);

// Solves (Z'WZ + I/sigma2) u = Z'W r for fixed weights and working residual r.
Vector penalized_solve(const DyadDesign& design, const Vector& weights, const Vector& residual,
                       double sigma2);

struct PqlOptions {
  int max_iter = 200;
  double u_tol = 1e-6;
  double sigma2_rel_tol = 1e-6;
  double sigma2_floor = 1e-8;
  double sigma2_cap = 1e3;
  double intercept_cap = 30.0;
};

struct PqlResult {
  NodeEffects effects;
  double intercept = 0.0;  // only meaningful when fitted with an intercept
  bool converged = false;
  bool homogeneous = false;  // sigma2 ended at the floor
  int iterations = 0;
};

// Penalized quasi-likelihood for logit P(y_ij = 1) = offset_ij [+ b] + u_i + u_j.
PqlResult fit_pql(const DyadDesign& design, bool with_intercept, const NodeEffects& init,
                  const PqlOptions& options = {});

// Zᵀ(y - mu) - u / sigma2 at the given state: zero at a PQL fixed point.
Vector penalized_score(const DyadDesign& design, const NodeEffects& effects, double intercept = 0.0);

// Plain logistic regression by IRLS with a fixed offset; coefficients are
// clamped to |b| <= 30 so separated data stays finite.
Vector logistic_regression(const Matrix& X, const Vector& y, const Vector& offset,
                           int max_iter = 100);

}  // namespace mergm
