#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mergm/driver.hpp"
#include "mergm/gof.hpp"
#include "mergm/graph.hpp"
#include "mergm/selection.hpp"

namespace mergm {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  long line;
};

struct EdgeListOptions {
  int nodes = 0;  // 0 = infer as max id + 1
  bool one_based = false;
};

// One edge per line, two whitespace-separated nonnegative integer ids.
// Blank lines and lines starting with '#' or '%' are skipped.
UndirectedNetwork read_edge_list(std::istream& in, const EdgeListOptions& options = {});
UndirectedNetwork read_edge_list_file(const std::string& path, const EdgeListOptions& options = {});
void write_edge_list(std::ostream& out, const UndirectedNetwork& net, bool one_based = false);

// Zachary's karate club: 34 nodes, 78 edges.
UndirectedNetwork zachary_karate_club();

// Resolves `--data`: the name "zachary" or an edge-list path.
UndirectedNetwork load_network(const std::string& data, const EdgeListOptions& options = {});

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitResult& fit, const ModelSpec& spec);
FitResult fit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AicReport& report);
nlohmann::json to_json(const GofDiagnostic& diagnostic);
nlohmann::json to_json(const GofReport& report);

// Writes via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace mergm
