#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "mergm/types.hpp"

namespace mergm {

// Simple undirected graph on a fixed node set with a dense bitset adjacency.
// Edge queries and toggles are O(1); shared-partner counts are a popcount
// over the intersection of two rows.
class UndirectedNetwork {
 public:
  UndirectedNetwork() = default;
  explicit UndirectedNetwork(int n);

  static UndirectedNetwork from_edges(int n, const std::vector<std::pair<NodeId, NodeId>>& edges);
  static UndirectedNetwork complete(int n);

  int size() const { return n_; }
  long edge_count() const { return edges_; }
  long dyad_count() const { return static_cast<long>(n_) * (n_ - 1) / 2; }

  bool has_edge(NodeId i, NodeId j) const {
    return (row(i)[word(j)] >> bit(j)) & 1u;
  }
  // Bounds-checked variant of has_edge.
  bool edge(NodeId i, NodeId j) const;

  int degree(NodeId i) const { return degrees_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& degrees() const { return degrees_; }
  IntVector degree_vector() const;

  // Flips the dyad {i, j}. Returns true if the edge is present afterwards.
  bool toggle(NodeId i, NodeId j);
  void set_edge(NodeId i, NodeId j, bool present);

  // Number of nodes adjacent to both i and j.
  int shared_partners(NodeId i, NodeId j) const {
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    int count = 0;
    for (int w = 0; w < words_; ++w) {
      count += std::popcount(a[w] & b[w]);
    }
    return count;
  }

  // Calls f(k) for every common neighbour k of i and j.
  template <typename F>
  void for_each_common_neighbor(NodeId i, NodeId j, F&& f) const {
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = a[w] & b[w];
      while (bits) {
        f(static_cast<NodeId>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  template <typename F>
  void for_each_neighbor(NodeId i, F&& f) const {
    const std::uint64_t* a = row(i);
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = a[w];
      while (bits) {
        f(static_cast<NodeId>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  bool operator==(const UndirectedNetwork& other) const {
    return n_ == other.n_ && bits_ == other.bits_;
  }

 private:
  static int word(NodeId j) { return j >> 6; }
  static int bit(NodeId j) { return j & 63; }
  const std::uint64_t* row(NodeId i) const {
    return bits_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(words_);
  }
  std::uint64_t* row(NodeId i) {
    return bits_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(words_);
  }
  void check_dyad(NodeId i, NodeId j) const;

  int n_ = 0;
  int words_ = 0;
  long edges_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<int> degrees_;
};

}  // namespace mergm
