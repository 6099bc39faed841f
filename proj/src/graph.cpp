#include "mergm/graph.hpp"

#include <string>

namespace mergm {

UndirectedNetwork::UndirectedNetwork(int n) : n_(n), words_((n + 63) / 64) {
  if (n < 1) {
    throw ConfigError("network must have at least one node");
  }
  bits_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(words_), 0);
  degrees_.assign(static_cast<std::size_t>(n), 0);
}

UndirectedNetwork UndirectedNetwork::from_edges(
    int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  UndirectedNetwork net(n);
  for (const auto& [i, j] : edges) {
    net.set_edge(i, j, true);
  }
  return net;
}

UndirectedNetwork UndirectedNetwork::complete(int n) {
  UndirectedNetwork net(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      net.toggle(i, j);
    }
  }
  return net;
}

void UndirectedNetwork::check_dyad(NodeId i, NodeId j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw InvalidNode("node id out of range: (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") with n = " + std::to_string(n_));
  }
  if (i == j) {
    throw InvalidNode("self-loop dyad (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
}

bool UndirectedNetwork::edge(NodeId i, NodeId j) const {
  check_dyad(i, j);
  return has_edge(i, j);
}

bool UndirectedNetwork::toggle(NodeId i, NodeId j) {
  check_dyad(i, j);
  const std::uint64_t mi = std::uint64_t{1} << bit(j);
  const std::uint64_t mj = std::uint64_t{1} << bit(i);
  row(i)[word(j)] ^= mi;
  row(j)[word(i)] ^= mj;
  const bool present = (row(i)[word(j)] & mi) != 0;
  const int delta = present ? 1 : -1;
  degrees_[static_cast<std::size_t>(i)] += delta;
  degrees_[static_cast<std::size_t>(j)] += delta;
  edges_ += delta;
  return present;
}

void UndirectedNetwork::set_edge(NodeId i, NodeId j, bool present) {
  if (edge(i, j) != present) {
    toggle(i, j);
  }
}

IntVector UndirectedNetwork::degree_vector() const {
  IntVector d(n_);
  for (int i = 0; i < n_; ++i) {
    d(i) = degrees_[static_cast<std::size_t>(i)];
  }
  return d;
}

std::vector<std::pair<NodeId, NodeId>> UndirectedNetwork::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (NodeId i = 0; i < n_; ++i) {
    for_each_neighbor(i, [&](NodeId j) {
      if (j > i) {
        out.emplace_back(i, j);
      }
    });
  }
  return out;
}

}  // namespace mergm
