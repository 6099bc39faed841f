#pragma once

#include <string>
#include <vector>

#include "mergm/graph.hpp"
#include "mergm/sampler.hpp"
#include "mergm/stats.hpp"
#include "mergm/types.hpp"

namespace mergm {

// Degree histogram, bins 0..n-1.
std::vector<long> degree_distribution(const UndirectedNetwork& net);
// Edges by number of shared partners, bins 0..n-2.
std::vector<long> esp_distribution(const UndirectedNetwork& net);
// Dyads by geodesic distance: bins 1..n-1 followed by one "unreachable" bin.
std::vector<long> geodesic_distribution(const UndirectedNetwork& net);
// All-pairs BFS distances; -1 marks unreachable pairs.
std::vector<std::vector<int>> geodesic_distances(const UndirectedNetwork& net);

struct BinQuantiles {
  std::vector<double> min, q1, median, q3, max;
};

struct GofDiagnostic {
  std::string name;               // "degree", "esp", "geodesic"
  std::vector<std::string> bins;  // bin labels
  std::vector<long> observed;
  std::vector<std::vector<long>> simulated;  // one row per simulated network
  BinQuantiles quantiles;

  // Fraction of bins whose observed count lies in the simulated [min, max].
  double envelope_coverage() const;
};

struct GofReport {
  std::vector<GofDiagnostic> diagnostics;
};

GofReport gof_run(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& theta,
                  const Vector& u, const SamplerConfig& cfg);

// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> values, double prob);

}  // namespace mergm
