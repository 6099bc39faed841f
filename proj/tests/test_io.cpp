#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mergm/io.hpp"
#include "oracles.hpp"

using namespace mergm;

namespace {

UndirectedNetwork parse(const std::string& text, EdgeListOptions options = {}) {
  std::istringstream in(text);
  return read_edge_list(in, options);
}

long error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("embedded karate club") {
  const auto net = zachary_karate_club();
  CHECK(net.size() == 34);
  CHECK(net.edge_count() == 78);
  CHECK(net.degree(0) == 16);
  CHECK(net.degree(33) == 17);
  CHECK(load_network("zachary") == net);
}

TEST_CASE("edge list parsing") {
  const auto net = parse("# comment\n0 1\n\n1 2\n% other comment\n  2 0  \n");
  CHECK(net.size() == 3);
  CHECK(net.edge_count() == 3);

  EdgeListOptions one;
  one.one_based = true;
  one.nodes = 5;
  const auto shifted = parse("1 2\n4 5\n", one);
  CHECK(shifted.size() == 5);
  CHECK(shifted.has_edge(0, 1));
  CHECK(shifted.has_edge(3, 4));
}

TEST_CASE("malformed input names the line") {
  CHECK(error_line("0 1\n1 x\n") == 2);
  CHECK(error_line("0 1\n2\n") == 2);
  CHECK(error_line("0 1\n1 2 3\n") == 2);
  CHECK(error_line("0 1\n\n3 3\n") == 3);
  CHECK(error_line("-1 2\n") == 1);
  CHECK(error_line("0 1.5\n") == 1);
  EdgeListOptions one;
  one.one_based = true;
  CHECK_THROWS_AS(parse("0 1\n", one), ParseError);
  EdgeListOptions small;
  small.nodes = 2;
  CHECK_THROWS_AS(parse("0 5\n", small), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("0 1\nfoo bar\n");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("line 2:", 0) == 0);
  }
}

TEST_CASE("write then read round-trips") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto net = oracle::random_network(20, 0.15, seed);
    for (bool one_based : {false, true}) {
      std::ostringstream out;
      write_edge_list(out, net, one_based);
      EdgeListOptions opt;
      opt.nodes = 20;
      opt.one_based = one_based;
      CHECK(parse(out.str(), opt) == net);
    }
  }
}

TEST_CASE("fit results survive JSON") {
  FitResult fit;
  fit.theta = Vector::LinSpaced(3, -1.0, 1.0);
  fit.theta_se = Vector::Constant(3, 0.1);
  fit.theta_se(1) = std::numeric_limits<double>::quiet_NaN();
  fit.u = Vector::LinSpaced(4, -0.5, 0.5);
  fit.sigma2 = 0.7;
  fit.iterations = 2;
  fit.converged = true;
  fit.trace = {{Vector::Zero(3), 0.5}, {fit.theta, 0.7}};
  const auto spec = ModelSpec::parse("edges,gwesp,twostars");
  const auto j = to_json(fit, spec);
  CHECK(j["terms"] == "edges,gwesp:0.5,twostars");
  const FitResult back = fit_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.theta == fit.theta);
  CHECK(std::isnan(back.theta_se(1)));
  CHECK(back.u == fit.u);
  CHECK(back.sigma2 == 0.7);
  CHECK(back.trace.size() == 2);
  CHECK(back.random_effects);
}

TEST_CASE("atomic write replaces the file") {
  const auto dir = std::filesystem::temp_directory_path() / "mergm_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "second");
  CHECK(!std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}
