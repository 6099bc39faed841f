#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mergm/graph.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"

namespace mergm {

struct SamplerConfig {
  long burn_in = -1;  // toggle proposals before the first draw; < 0 means 10 n^2
  long thin = -1;     // proposals between retained draws; < 0 means n^2
  long n_samples = 1000;
  std::uint64_t seed = 1;
  int chains = 1;     // independent chains, each with a derived stream; draws concatenated

  // Fills in the n-dependent defaults and validates.
  SamplerConfig resolved(int n) const;
};

struct SampleSet {
  Matrix stats;    // N x p, s(y*) per draw
  Matrix degrees;  // N x n, t(y*) per draw
  std::vector<UndirectedNetwork> networks;  // only when requested
  long proposals = 0;
  long accepted = 0;

  long size() const { return stats.rows(); }
  double acceptance_rate() const {
    return proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  }
};

// Metropolis-Hastings edge-toggle sampler for
//   P(y) ∝ exp(theta' s(y) + u' t(y)).
// Proposals are uniform over dyads (plus a 1/n chance of a null move); the
// log acceptance ratio of adding {i,j} is theta' Δ_ij s(y) + u_i + u_j,
// negated for a deletion. An empty `u` means u = 0.
SampleSet sample(const UndirectedNetwork& start, const ModelSpec& spec, const Vector& theta,
                 const Vector& u, const SamplerConfig& cfg, bool keep_networks = false);

}  // namespace mergm
