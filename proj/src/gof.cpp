#include "mergm/gof.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>

namespace mergm {

std::vector<long> degree_distribution(const UndirectedNetwork& net) {
  std::vector<long> h(static_cast<std::size_t>(net.size()), 0);
  for (NodeId i = 0; i < net.size(); ++i) ++h[static_cast<std::size_t>(net.degree(i))];
  return h;
}

std::vector<long> esp_distribution(const UndirectedNetwork& net) {
  std::vector<long> h(static_cast<std::size_t>(std::max(net.size() - 1, 1)), 0);
  for (const auto& [i, j] : net.edge_list()) ++h[static_cast<std::size_t>(net.shared_partners(i, j))];
  return h;
}

std::vector<std::vector<int>> geodesic_distances(const UndirectedNetwork& net) {
  const int n = net.size();
  std::vector<std::vector<int>> dist(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  std::vector<NodeId> queue;
  queue.reserve(static_cast<std::size_t>(n));
  for (NodeId s = 0; s < n; ++s) {
    auto& d = dist[static_cast<std::size_t>(s)];
    d[static_cast<std::size_t>(s)] = 0;
    queue.clear();
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      net.for_each_neighbor(v, [&](NodeId w) {
        if (d[static_cast<std::size_t>(w)] < 0) {
          d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(v)] + 1;
          queue.push_back(w);
        }
      });
    }
  }
  return dist;
}

std::vector<long> geodesic_distribution(const UndirectedNetwork& net) {
  const int n = net.size();
  // bins: distance 1..n-1 at index 0..n-2, unreachable at index n-1
  std::vector<long> h(static_cast<std::size_t>(std::max(n, 1)), 0);
  const auto dist = geodesic_distances(net);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const int d = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      ++h[d < 0 ? static_cast<std::size_t>(n - 1) : static_cast<std::size_t>(d - 1)];
    }
  }
  return h;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double GofDiagnostic::envelope_coverage() const {
  if (observed.empty()) return 1.0;
  long inside = 0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    const auto obs = static_cast<double>(observed[b]);
    if (obs >= quantiles.min[b] && obs <= quantiles.max[b]) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(observed.size());
}

namespace {

GofDiagnostic summarize(std::string name, std::vector<std::string> bins, std::vector<long> observed,
                        std::vector<std::vector<long>> simulated) {
  GofDiagnostic d{std::move(name), std::move(bins), std::move(observed), std::move(simulated), {}};
  const std::size_t nb = d.observed.size();
  std::vector<double> column(d.simulated.size());
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < d.simulated.size(); ++r) column[r] = static_cast<double>(d.simulated[r][b]);
    d.quantiles.min.push_back(quantile(column, 0.0));
    d.quantiles.q1.push_back(quantile(column, 0.25));
    d.quantiles.median.push_back(quantile(column, 0.5));
    d.quantiles.q3.push_back(quantile(column, 0.75));
    d.quantiles.max.push_back(quantile(column, 1.0));
  }
  return d;
}

long total(const std::vector<long>& h) {
  long s = 0;
  for (long v : h) s += v;
  return s;
}

}  // namespace

GofReport gof_run(const UndirectedNetwork& net, const ModelSpec& spec, const Vector& theta,
                  const Vector& u, const SamplerConfig& cfg) {
  const int n = net.size();
  const SampleSet draws = sample(net, spec, theta, u, cfg, /*keep_networks=*/true);

  std::vector<std::string> degree_bins, esp_bins, geo_bins;
  for (int k = 0; k < n; ++k) degree_bins.push_back(std::to_string(k));
  for (int k = 0; k < std::max(n - 1, 1); ++k) esp_bins.push_back(std::to_string(k));
  for (int k = 1; k < n; ++k) geo_bins.push_back(std::to_string(k));
  geo_bins.push_back("inf");

  std::vector<std::vector<long>> deg, esp, geo;
  for (const auto& y : draws.networks) {
    deg.push_back(degree_distribution(y));
    esp.push_back(esp_distribution(y));
    geo.push_back(geodesic_distribution(y));
    if (total(deg.back()) != n || total(esp.back()) != y.edge_count() ||
        total(geo.back()) != y.dyad_count()) {
      throw std::logic_error("goodness-of-fit histogram lost mass");
    }
  }

  GofReport report;
  report.diagnostics.push_back(summarize("degree", degree_bins, degree_distribution(net), std::move(deg)));
  report.diagnostics.push_back(summarize("esp", esp_bins, esp_distribution(net), std::move(esp)));
  report.diagnostics.push_back(summarize("geodesic", geo_bins, geodesic_distribution(net), std::move(geo)));
  return report;
}

}  // namespace mergm
