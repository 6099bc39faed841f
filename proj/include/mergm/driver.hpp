#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mergm/glmm.hpp"
#include "mergm/graph.hpp"
#include "mergm/mcmcmle.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"

namespace mergm {

struct DriverConfig {
  int max_iter = 50;
  double tol = 1e-3;
  std::uint64_t seed = 1;
  McmleConfig mcmle;
  PqlOptions pql;
  // Report the mean of the last `average_last` theta iterates (0 = off).
  int average_last = 0;
  // When false the random effects stay at zero and only Step 1 runs; this
  // reduces the algorithm to a plain ERGM MC-MLE.
  bool random_effects = true;
  // Optional warm start; empty means Step 0 / MPLE.
  Vector theta_start;
  Vector u_start;
  double sigma2_start = 0.5;
};

struct TraceEntry {
  Vector theta;
  double sigma2 = 0.0;
};

struct FitResult {
  Vector theta;
  Vector theta_se;
  Vector u;
  double sigma2 = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  int iterations = 0;
  bool sigma2_at_floor = false;
  bool random_effects = true;
  McmleDiagnostics last_mcmle;
};

// Step 1 failed inside the alternating loop.
class FitDegeneracyError : public DegeneracyError {
 public:
  FitDegeneracyError(const DegeneracyError& inner, int iteration)
      : DegeneracyError("iteration " + std::to_string(iteration) + ": " + inner.what(),
                        inner.last_theta, inner.diagnostics),
        iteration(iteration) {}
  int iteration;
};

// Alternates PQL updates of (u, sigma2) with MC-MLE updates of theta:
//   Step 0: PQL with an intercept and no offset -> u_0
//   Step 1: theta_{t+1} = MC-MLE with offset u_t' t(y)
//   Step 2: PQL with offset theta_{t+1}' Δ s(y) -> (u_{t+1}, sigma2_{t+1})
// until max |theta_{t+1} - theta_t| < tol or max_iter.
FitResult fit_mergm(const UndirectedNetwork& net, const ModelSpec& spec, const DriverConfig& cfg);

// Plain ERGM: fit_mergm with the random effects switched off.
FitResult fit_ergm(const UndirectedNetwork& net, const ModelSpec& spec, const DriverConfig& cfg);

}  // namespace mergm
