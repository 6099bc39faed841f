#include "mergm/io.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

namespace mergm {

namespace {

// 1-based, as the dataset is usually distributed.
constexpr std::array<std::pair<int, int>, 78> kZacharyEdges{{
    {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},   {1, 8},   {1, 9},   {1, 11},
    {1, 12},  {1, 13},  {1, 14},  {1, 18},  {1, 20},  {1, 22},  {1, 32},  {2, 3},   {2, 4},
    {2, 8},   {2, 14},  {2, 18},  {2, 20},  {2, 22},  {2, 31},  {3, 4},   {3, 8},   {3, 9},
    {3, 10},  {3, 14},  {3, 28},  {3, 29},  {3, 33},  {4, 8},   {4, 13},  {4, 14},  {5, 7},
    {5, 11},  {6, 7},   {6, 11},  {6, 17},  {7, 17},  {9, 31},  {9, 33},  {9, 34},  {10, 34},
    {14, 34}, {15, 33}, {15, 34}, {16, 33}, {16, 34}, {19, 33}, {19, 34}, {20, 34}, {21, 33},
    {21, 34}, {23, 33}, {23, 34}, {24, 26}, {24, 28}, {24, 30}, {24, 33}, {24, 34}, {25, 26},
    {25, 28}, {25, 32}, {26, 32}, {27, 30}, {27, 34}, {28, 34}, {29, 32}, {29, 34}, {30, 33},
    {30, 34}, {31, 33}, {31, 34}, {32, 33}, {32, 34}, {33, 34},
}};

constexpr bool zachary_well_formed() {
  for (std::size_t a = 0; a < kZacharyEdges.size(); ++a) {
    const auto [i, j] = kZacharyEdges[a];
    if (i < 1 || j > 34 || i >= j) return false;
    for (std::size_t b = 0; b < a; ++b) {
      if (kZacharyEdges[b] == kZacharyEdges[a]) return false;
    }
  }
  return true;
}
static_assert(zachary_well_formed(), "karate club edge list must be 78 distinct dyads on 34 nodes");

}  // namespace

UndirectedNetwork read_edge_list(std::istream& in, const EdgeListOptions& options) {
  std::vector<std::pair<long, long>> edges;
  long max_id = -1;
  std::string line;
  long line_no = 0;
  const long base = options.one_based ? 1 : 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#' || first[0] == '%') continue;
    std::string second;
    if (!(ls >> second)) throw ParseError("expected two node ids", line_no);
    std::string extra;
    if (ls >> extra) throw ParseError("unexpected trailing field '" + extra + "'", line_no);
    auto parse_id = [&](const std::string& text) {
      std::size_t used = 0;
      long value = -1;
      try {
        value = std::stol(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != text.size() || value < base) {
        throw ParseError("invalid node id '" + text + "'", line_no);
      }
      return value - base;
    };
    const long i = parse_id(first);
    const long j = parse_id(second);
    if (i == j) throw ParseError("self-loop on node " + first, line_no);
    if (std::max(i, j) >= std::numeric_limits<int>::max()) throw ParseError("node id too large", line_no);
    max_id = std::max({max_id, i, j});
    edges.emplace_back(i, j);
  }
  int n = options.nodes > 0 ? options.nodes : static_cast<int>(max_id + 1);
  if (n < 1) throw ParseError("edge list is empty; pass the node count explicitly", 0);
  if (max_id >= n) throw ParseError("node id " + std::to_string(max_id + base) + " exceeds node count", 0);
  UndirectedNetwork net(n);
  for (const auto& [i, j] : edges) net.set_edge(static_cast<NodeId>(i), static_cast<NodeId>(j), true);
  return net;
}

UndirectedNetwork read_edge_list_file(const std::string& path, const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list '" + path + "'", 0);
  return read_edge_list(in, options);
}

void write_edge_list(std::ostream& out, const UndirectedNetwork& net, bool one_based) {
  const int base = one_based ? 1 : 0;
  for (const auto& [i, j] : net.edge_list()) out << i + base << ' ' << j + base << '\n';
}

UndirectedNetwork zachary_karate_club() {
  UndirectedNetwork net(34);
  for (const auto& [i, j] : kZacharyEdges) net.toggle(i - 1, j - 1);
  return net;
}

UndirectedNetwork load_network(const std::string& data, const EdgeListOptions& options) {
  if (data == "zachary") return zachary_karate_club();
  return read_edge_list_file(data, options);
}

nlohmann::json to_json(const Vector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) j.push_back(v(k));
  return j;
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vector(m.row(r).transpose())));
  return j;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = j[k].is_null() ? std::numeric_limits<double>::quiet_NaN() : j[k].get<double>();
  }
  return v;
}

nlohmann::json to_json(const FitResult& fit, const ModelSpec& spec) {
  nlohmann::json j;
  j["model"] = fit.random_effects ? "mergm" : "ergm";
  j["terms"] = spec.to_string();
  j["term_names"] = spec.names();
  j["theta"] = to_json(fit.theta);
  j["theta_se"] = to_json(fit.theta_se);
  j["u"] = to_json(fit.u);
  j["sigma2"] = fit.sigma2;
  j["sigma2_at_floor"] = fit.sigma2_at_floor;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : fit.trace) trace.push_back({{"theta", to_json(t.theta)}, {"sigma2", t.sigma2}});
  j["trace"] = trace;
  j["mcmle"] = {{"outer_iterations", fit.last_mcmle.outer_iterations},
                {"gammas", fit.last_mcmle.gammas},
                {"stop_reason", fit.last_mcmle.stop_reason},
                {"acceptance_rate", fit.last_mcmle.acceptance_rate},
                {"fisher_singular", fit.last_mcmle.fisher_singular}};
  return j;
}

FitResult fit_from_json(const nlohmann::json& j) {
  FitResult fit;
  fit.random_effects = j.at("model").get<std::string>() == "mergm";
  fit.theta = vector_from_json(j.at("theta"));
  fit.theta_se = vector_from_json(j.at("theta_se"));
  fit.u = vector_from_json(j.at("u"));
  fit.sigma2 = j.at("sigma2").get<double>();
  fit.sigma2_at_floor = j.value("sigma2_at_floor", false);
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  for (const auto& t : j.at("trace")) fit.trace.push_back({vector_from_json(t.at("theta")), t.at("sigma2").get<double>()});
  return fit;
}

nlohmann::json to_json(const AicReport& r) {
  nlohmann::json j;
  j["model_kind"] = r.kind == ModelKind::Mergm ? "mergm" : "ergm";
  j["loglik"] = r.loglik;
  j["aic"] = r.aic;
  j["p"] = r.p;
  j["log_kappa"] = r.log_kappa;
  j["mc_se_loglik"] = r.mc_se_loglik;
  j["n_sim"] = r.n_sim;
  j["warnings"] = r.warnings;
  if (r.kind == ModelKind::Mergm) {
    j["var_t"] = to_json(r.var_t);
    j["laplace_terms"] = {{"theta_s", r.terms.theta_s}, {"u_t", r.terms.u_t},
                          {"log_kappa", r.terms.log_kappa}, {"u_u", r.terms.u_u},
                          {"sigma2", r.terms.sigma2}, {"log_det", r.terms.log_det}};
  }
  return j;
}

nlohmann::json to_json(const GofDiagnostic& d) {
  return {{"diagnostic", d.name},
          {"bins", d.bins},
          {"observed", d.observed},
          {"quantiles",
           {{"min", d.quantiles.min},
            {"q1", d.quantiles.q1},
            {"median", d.quantiles.median},
            {"q3", d.quantiles.q3},
            {"max", d.quantiles.max}}}};
}

nlohmann::json to_json(const GofReport& report) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& d : report.diagnostics) j.push_back(to_json(d));
  return j;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mergm
