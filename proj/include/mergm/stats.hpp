#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mergm/graph.hpp"
#include "mergm/types.hpp"

namespace mergm {

enum class TermKind { Edges, TwoStars, Gwesp, Gwnsp, Gwdegree };

inline constexpr double kDefaultDecay = 0.5;

struct StatTerm {
  TermKind kind = TermKind::Edges;
  double decay = 0.0;  // used by the geometrically weighted terms only

  bool weighted() const {
    return kind == TermKind::Gwesp || kind == TermKind::Gwnsp || kind == TermKind::Gwdegree;
  }
};

std::string_view term_name(TermKind kind);

// Ordered list of model terms; defines s(y) and its change statistics.
class ModelSpec {
 public:
  ModelSpec() = default;
  explicit ModelSpec(std::vector<StatTerm> terms);

  // Parses "edges,gwesp:0.5,twostars". Unknown names are rejected with the
  // list of valid ones.
  static ModelSpec parse(std::string_view text);

  const std::vector<StatTerm>& terms() const { return terms_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const StatTerm& operator[](int k) const { return terms_[static_cast<std::size_t>(k)]; }
  std::vector<std::string> names() const;
  // Canonical "name[:decay]" form, decays always written out.
  std::string to_string() const;

 private:
  std::vector<StatTerm> terms_;
};

// e^tau * (1 - (1 - e^-tau)^k): the geometric weight of a count k.
double geometric_weight(int k, double decay);

Vector statistics(const UndirectedNetwork& net, const ModelSpec& spec);

// s(y with y_ij = 1) - s(y with y_ij = 0), evaluated from local structure.
Vector change_statistics(const UndirectedNetwork& net, const ModelSpec& spec, NodeId i, NodeId j);

// Reusable evaluator for the sampler's inner loop: caches (1 - e^-tau)^m
// tables so each change statistic costs a few popcounts.
class ChangeStatEvaluator {
 public:
  ChangeStatEvaluator(const ModelSpec& spec, int n);

  void operator()(const UndirectedNetwork& net, NodeId i, NodeId j, Eigen::Ref<Vector> out) const;

 private:
  double ratio_power(int term, int m) const {
    return powers_[static_cast<std::size_t>(term) * stride_ + static_cast<std::size_t>(m)];
  }

  ModelSpec spec_;
  std::size_t stride_;
  std::vector<double> powers_;
  std::vector<double> weights_;  // geometric_weight(m) per term
};

}  // namespace mergm
