#include "mergm/sampler.hpp"

#include <cmath>
#include <future>
#include <string>

#include "mergm/rng.hpp"

namespace mergm {

SamplerConfig SamplerConfig::resolved(int n) const {
  SamplerConfig out = *this;
  const long dyads = static_cast<long>(n) * static_cast<long>(n);
  if (out.burn_in < 0) out.burn_in = 10 * dyads;
  if (out.thin < 0) out.thin = dyads;
  if (out.thin < 1) throw ConfigError("thin must be at least 1");
  if (out.n_samples < 1) throw ConfigError("n_samples must be at least 1");
  if (out.chains < 1) throw ConfigError("chains must be at least 1");
  return out;
}

namespace {

struct ChainOutput {
  Matrix stats;
  Matrix degrees;
  std::vector<UndirectedNetwork> networks;
  long proposals = 0;
  long accepted = 0;
};

ChainOutput run_chain(UndirectedNetwork net, const ModelSpec& spec, const Vector& theta,
                      const Vector& u, long burn_in, long thin, long draws,
                      std::uint64_t seed, bool keep_networks) {
  const int n = net.size();
  const int p = spec.size();
  const bool has_u = u.size() > 0;
  ChangeStatEvaluator change(spec, n);
  Rng rng(seed);

  ChainOutput out;
  out.stats.resize(draws, p);
  out.degrees.resize(draws, n);
  if (keep_networks) out.networks.reserve(static_cast<std::size_t>(draws));

  Vector s = statistics(net, spec);
  Vector delta(p);

  auto step = [&]() {
    // Ordered pair on n x n; i == j is a null move. Given a move the dyad is
    // uniform, and the null moves keep the chain aperiodic when every
    // toggle would be accepted (e.g. theta = 0 flips edge-count parity).
    const auto i = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    const auto j = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    ++out.proposals;
    if (i == j) return;
    change(net, i, j, delta);
    double log_ratio = theta.dot(delta);
    if (has_u) log_ratio += u(i) + u(j);
    const bool present = net.has_edge(i, j);
    if (present) log_ratio = -log_ratio;
    if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
      net.toggle(i, j);
      if (present) {
        s -= delta;
      } else {
        s += delta;
      }
      ++out.accepted;
    }
  };

  for (long t = 0; t < burn_in; ++t) step();
  for (long d = 0; d < draws; ++d) {
    if (d > 0) {
      for (long t = 0; t < thin; ++t) step();
    }
    out.stats.row(d) = s.transpose();
    for (int i = 0; i < n; ++i) out.degrees(d, i) = net.degree(i);
    if (keep_networks) out.networks.push_back(net);
  }
  return out;
}

}  // namespace

SampleSet sample(const UndirectedNetwork& start, const ModelSpec& spec, const Vector& theta,
                 const Vector& u, const SamplerConfig& cfg, bool keep_networks) {
  const int n = start.size();
  if (theta.size() != spec.size()) {
    throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, model has " +
                      std::to_string(spec.size()) + " terms");
  }
  if (u.size() != 0 && u.size() != n) {
    throw ConfigError("u has " + std::to_string(u.size()) + " entries, network has " +
                      std::to_string(n) + " nodes");
  }
  if (n < 2) throw ConfigError("sampling needs at least two nodes");
  if (!theta.allFinite() || (u.size() > 0 && !u.allFinite())) {
    throw ConfigError("sampler parameters must be finite");
  }
  const SamplerConfig c = cfg.resolved(n);

  std::vector<long> draws(static_cast<std::size_t>(c.chains), c.n_samples / c.chains);
  for (long r = 0; r < c.n_samples % c.chains; ++r) ++draws[static_cast<std::size_t>(r)];

  std::vector<ChainOutput> outputs;
  if (c.chains == 1) {
    outputs.push_back(run_chain(start, spec, theta, u, c.burn_in, c.thin, draws[0],
                                derive_seed(c.seed, 0), keep_networks));
  } else {
    std::vector<std::future<ChainOutput>> jobs;
    for (int k = 0; k < c.chains; ++k) {
      jobs.push_back(std::async(std::launch::async, run_chain, start, std::cref(spec),
                                std::cref(theta), std::cref(u), c.burn_in, c.thin,
                                draws[static_cast<std::size_t>(k)],
                                derive_seed(c.seed, static_cast<std::uint64_t>(k)), keep_networks));
    }
    for (auto& job : jobs) outputs.push_back(job.get());
  }

  SampleSet result;
  result.stats.resize(c.n_samples, spec.size());
  result.degrees.resize(c.n_samples, n);
  long row = 0;
  for (auto& chain : outputs) {
    const long rows = chain.stats.rows();
    result.stats.middleRows(row, rows) = chain.stats;
    result.degrees.middleRows(row, rows) = chain.degrees;
    row += rows;
    result.proposals += chain.proposals;
    result.accepted += chain.accepted;
    for (auto& net : chain.networks) result.networks.push_back(std::move(net));
  }
  return result;
}

}  // namespace mergm
