#include "mergm/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace mergm {

namespace {

struct NamedKind {
  std::string_view name;
  TermKind kind;
};

constexpr NamedKind kTermNames[] = {
    {"edges", TermKind::Edges},       {"twostars", TermKind::TwoStars},
    {"2-stars", TermKind::TwoStars},  {"kstar2", TermKind::TwoStars},
    {"gwesp", TermKind::Gwesp},       {"gwnsp", TermKind::Gwnsp},
    {"gwdegree", TermKind::Gwdegree},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view term_name(TermKind kind) {
  switch (kind) {
    case TermKind::Edges: return "edges";
    case TermKind::TwoStars: return "twostars";
    case TermKind::Gwesp: return "gwesp";
    case TermKind::Gwnsp: return "gwnsp";
    case TermKind::Gwdegree: return "gwdegree";
  }
  return "?";
}

ModelSpec::ModelSpec(std::vector<StatTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw ConfigError("model must contain at least one term");
  }
  for (std::size_t a = 0; a < terms_.size(); ++a) {
    if (!(terms_[a].decay >= 0.0) || !std::isfinite(terms_[a].decay)) {
      throw ConfigError("decay must be a finite nonnegative number");
    }
    if (!terms_[a].weighted()) {
      terms_[a].decay = 0.0;
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (terms_[a].kind == terms_[b].kind) {
        throw ConfigError("duplicate model term: " + std::string(term_name(terms_[a].kind)));
      }
    }
  }
}

ModelSpec ModelSpec::parse(std::string_view text) {
  std::vector<StatTerm> terms;
  while (true) {
    const auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    std::string_view name = item;
    std::string_view decay_text;
    if (const auto colon = item.find(':'); colon != std::string_view::npos) {
      name = trim(item.substr(0, colon));
      decay_text = trim(item.substr(colon + 1));
    }
    const auto* found = std::find_if(std::begin(kTermNames), std::end(kTermNames),
                                     [&](const NamedKind& nk) { return nk.name == name; });
    if (found == std::end(kTermNames)) {
      throw ConfigError("unknown model term '" + std::string(name) +
                        "'; valid terms: edges, twostars (2-stars, kstar2), gwesp, gwnsp, gwdegree");
    }
    StatTerm term{found->kind, kDefaultDecay};
    if (!decay_text.empty()) {
      if (!term.weighted()) {
        throw ConfigError("term '" + std::string(name) + "' takes no decay parameter");
      }
      try {
        std::size_t used = 0;
        term.decay = std::stod(std::string(decay_text), &used);
        if (used != decay_text.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ConfigError("invalid decay '" + std::string(decay_text) + "' for term " +
                          std::string(name));
      }
    }
    terms.push_back(term);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return ModelSpec(std::move(terms));
}

std::vector<std::string> ModelSpec::names() const {
  std::vector<std::string> out;
  for (const auto& t : terms_) out.emplace_back(term_name(t.kind));
  return out;
}

std::string ModelSpec::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (k) os << ',';
    os << term_name(terms_[k].kind);
    if (terms_[k].weighted()) os << ':' << terms_[k].decay;
  }
  return os.str();
}

double geometric_weight(int k, double decay) {
  if (k <= 0) return 0.0;
  return std::exp(decay) * (1.0 - std::pow(1.0 - std::exp(-decay), k));
}

Vector statistics(const UndirectedNetwork& net, const ModelSpec& spec) {
  const int n = net.size();
  Vector s = Vector::Zero(spec.size());
  for (int k = 0; k < spec.size(); ++k) {
    const StatTerm& term = spec[k];
    double value = 0.0;
    switch (term.kind) {
      case TermKind::Edges:
        value = static_cast<double>(net.edge_count());
        break;
      case TermKind::TwoStars:
        for (NodeId i = 0; i < n; ++i) {
          const double d = net.degree(i);
          value += d * (d - 1.0) / 2.0;
        }
        break;
      case TermKind::Gwesp:
      case TermKind::Gwnsp: {
        const bool on_edges = term.kind == TermKind::Gwesp;
        std::vector<long> histogram(static_cast<std::size_t>(n), 0);
        for (NodeId i = 0; i < n; ++i) {
          for (NodeId j = i + 1; j < n; ++j) {
            if (net.has_edge(i, j) == on_edges) {
              ++histogram[static_cast<std::size_t>(net.shared_partners(i, j))];
            }
          }
        }
        for (int m = 1; m < n; ++m) {
          value += geometric_weight(m, term.decay) * static_cast<double>(histogram[static_cast<std::size_t>(m)]);
        }
        break;
      }
      case TermKind::Gwdegree: {
        std::vector<long> histogram(static_cast<std::size_t>(n), 0);
        for (NodeId i = 0; i < n; ++i) ++histogram[static_cast<std::size_t>(net.degree(i))];
        for (int m = 1; m < n; ++m) {
          value += geometric_weight(m, term.decay) * static_cast<double>(histogram[static_cast<std::size_t>(m)]);
        }
        break;
      }
    }
    s(k) = value;
  }
  return s;
}

ChangeStatEvaluator::ChangeStatEvaluator(const ModelSpec& spec, int n)
    : spec_(spec), stride_(static_cast<std::size_t>(n) + 1) {
  powers_.assign(stride_ * static_cast<std::size_t>(spec.size()), 0.0);
  weights_.assign(stride_ * static_cast<std::size_t>(spec.size()), 0.0);
  for (int k = 0; k < spec.size(); ++k) {
    const double ratio = 1.0 - std::exp(-spec[k].decay);
    for (int m = 0; m <= n; ++m) {
      powers_[static_cast<std::size_t>(k) * stride_ + static_cast<std::size_t>(m)] = std::pow(ratio, m);
      weights_[static_cast<std::size_t>(k) * stride_ + static_cast<std::size_t>(m)] =
          geometric_weight(m, spec[k].decay);
    }
  }
}

void ChangeStatEvaluator::operator()(const UndirectedNetwork& net, NodeId i, NodeId j,
                                     Eigen::Ref<Vector> out) const {
  // Quantities are taken in the state with y_ij = 0; `on` corrects counts
  // that currently include the dyad itself.
  const int on = net.has_edge(i, j) ? 1 : 0;
  for (int k = 0; k < spec_.size(); ++k) {
    double delta = 0.0;
    switch (spec_[k].kind) {
      case TermKind::Edges:
        delta = 1.0;
        break;
      case TermKind::TwoStars:
        delta = static_cast<double>(net.degree(i) - on + net.degree(j) - on);
        break;
      case TermKind::Gwdegree:
        delta = ratio_power(k, net.degree(i) - on) + ratio_power(k, net.degree(j) - on);
        break;
      case TermKind::Gwesp: {
        // The new edge itself, plus one more partner for each edge (i,c), (j,c)
        // with c a common neighbour.
        delta = weights_[static_cast<std::size_t>(k) * stride_ +
                         static_cast<std::size_t>(net.shared_partners(i, j))];
        net.for_each_common_neighbor(i, j, [&](NodeId c) {
          delta += ratio_power(k, net.shared_partners(i, c) - on) +
                   ratio_power(k, net.shared_partners(j, c) - on);
        });
        break;
      }
      case TermKind::Gwnsp: {
        // The dyad leaves the non-edge set; non-edges (i,c) with c ~ j and
        // (j,c) with c ~ i gain a partner.
        delta = -weights_[static_cast<std::size_t>(k) * stride_ +
                          static_cast<std::size_t>(net.shared_partners(i, j))];
        net.for_each_neighbor(j, [&](NodeId c) {
          if (c != i && !net.has_edge(i, c)) {
            delta += ratio_power(k, net.shared_partners(i, c) - on);
          }
        });
        net.for_each_neighbor(i, [&](NodeId c) {
          if (c != j && !net.has_edge(j, c)) {
            delta += ratio_power(k, net.shared_partners(j, c) - on);
          }
        });
        break;
      }
    }
    out(k) = delta;
  }
}

Vector change_statistics(const UndirectedNetwork& net, const ModelSpec& spec, NodeId i, NodeId j) {
  if (i == j || i < 0 || j < 0 || i >= net.size() || j >= net.size()) {
    throw InvalidNode("change statistics need a dyad of two distinct valid nodes");
  }
  Vector out(spec.size());
  ChangeStatEvaluator(spec, net.size())(net, i, j, out);
  return out;
}

}  // namespace mergm
