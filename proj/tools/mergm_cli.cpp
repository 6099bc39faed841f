#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "mergm/driver.hpp"
#include "mergm/gof.hpp"
#include "mergm/io.hpp"
#include "mergm/rng.hpp"
#include "mergm/selection.hpp"

using namespace mergm;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kDegenerate = 3, kNotConverged = 4 };

// Values above this in any coefficient are reported as unstable.
constexpr double kUnstableTheta = 10.0;

struct Options {
  std::string data;
  std::string terms = "edges";
  std::string model = "mergm";
  std::optional<std::uint64_t> seed;
  long nsim = -1;
  long burnin = -1;
  long thin = -1;
  std::string out;
  int nodes = 0;
  bool one_based = false;
  bool strict = false;

  int max_iter = 50;
  double tol = 1e-3;
  std::string fit_path;
  std::string theta;
  double sigma2 = 0.0;
  std::string u_file;
  std::string csv;
  std::string models = "mergm,ergm";
  int bridges = 20;
};

// Raised for malformed user input; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Options& o, bool needs_data) {
  auto* data = cmd->add_option("--data", o.data, "edge-list path or 'zachary'");
  if (needs_data) data->required();
  cmd->add_option("--seed", o.seed, "master seed")->required();
  cmd->add_option("--nsim", o.nsim, "number of simulations");
  cmd->add_option("--burnin", o.burnin, "burn-in proposals (default 10 n^2)");
  cmd->add_option("--thin", o.thin, "proposals between draws (default n^2)");
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--nodes", o.nodes, "node count (default: max id + 1)");
  cmd->add_flag("--one-based", o.one_based, "node ids start at 1");
}

// Defaults filled in so the recorded configuration is the one actually used.
Options resolved(Options o, int n, long default_nsim) {
  if (o.nsim <= 0) o.nsim = default_nsim;
  const SamplerConfig s = SamplerConfig{o.burnin, o.thin, 1, 1, 1}.resolved(n);
  o.burnin = s.burn_in;
  o.thin = s.thin;
  if (o.nodes <= 0) o.nodes = n;
  return o;
}

json config_json(const std::string& command, const Options& o, const ModelSpec* spec) {
  json c;
  c["command"] = command;
  if (!o.data.empty()) c["data"] = o.data;
  if (spec) c["terms"] = spec->to_string();
  c["nsim"] = o.nsim;
  c["burnin"] = o.burnin;
  c["thin"] = o.thin;
  c["nodes"] = o.nodes;
  c["one_based"] = o.one_based;
  c["strict"] = o.strict;
  return c;
}

json envelope(const std::string& command, const Options& o, const ModelSpec* spec) {
  json j;
  j["tool"] = "mergm";
  j["version"] = MERGM_VERSION;
  j["config"] = config_json(command, o, spec);
  j["seeds"] = {{"master", *o.seed}};
  return j;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(o.out, text);
  }
}

void emit(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

ModelSpec parse_terms(const std::string& terms) {
  try {
    return ModelSpec::parse(terms);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

UndirectedNetwork load(const Options& o) {
  EdgeListOptions opt;
  opt.nodes = o.nodes;
  opt.one_based = o.one_based;
  return load_network(o.data, opt);
}

Vector parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("invalid number '" + item + "' in " + what);
    values.push_back(v);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
}

DriverConfig driver_config(const Options& o) {
  DriverConfig cfg;
  cfg.seed = *o.seed;
  cfg.max_iter = o.max_iter;
  cfg.tol = o.tol;
  if (o.nsim > 0) cfg.mcmle.n_sim = o.nsim;
  cfg.mcmle.burn_in = o.burnin;
  cfg.mcmle.thin = o.thin;
  return cfg;
}

bool unstable(const Vector& theta) {
  return !theta.allFinite() || theta.lpNorm<Eigen::Infinity>() > kUnstableTheta;
}

json degeneracy_json(const DegeneracyError& e) {
  json d;
  d["error"] = "degeneracy";
  d["message"] = e.what();
  d["last_theta"] = to_json(e.last_theta);
  d["outer_iterations"] = e.diagnostics.outer_iterations;
  d["gammas"] = e.diagnostics.gammas;
  d["stop_reason"] = e.diagnostics.stop_reason;
  if (const auto* fe = dynamic_cast<const FitDegeneracyError*>(&e)) d["iteration"] = fe->iteration;
  return d;
}

FitResult run_fit(const UndirectedNetwork& net, const ModelSpec& spec, const std::string& model,
                  const DriverConfig& cfg) {
  if (model == "mergm") return fit_mergm(net, spec, cfg);
  if (model == "ergm") return fit_ergm(net, spec, cfg);
  throw UsageError("--model must be 'ergm' or 'mergm'");
}

int cmd_fit(const Options& o) {
  const ModelSpec spec = parse_terms(o.terms);
  const UndirectedNetwork net = load(o);
  json j = envelope("fit", resolved(o, net.size(), McmleConfig{}.n_sim), &spec);
  const bool ergm = o.model == "ergm";
  j["config"]["model"] = o.model;
  j["config"]["max_iter"] = ergm ? 1 : o.max_iter;
  j["config"]["tol"] = (ergm || std::isinf(o.tol)) ? json("inf") : json(o.tol);
  auto iteration_seeds = [&](int iterations) {
    json seeds = json::array();
    for (int t = 1; t <= iterations; ++t) seeds.push_back(derive_seed(*o.seed, static_cast<std::uint64_t>(t)));
    return seeds;
  };
  try {
    const FitResult fit = run_fit(net, spec, o.model, driver_config(o));
    j["seeds"]["per_iteration"] = iteration_seeds(fit.iterations);
    j["fit"] = to_json(fit, spec);
    j["fit"]["unstable"] = unstable(fit.theta);
    emit(o, j);
    return (o.strict && !fit.converged) ? kNotConverged : kOk;
  } catch (const DegeneracyError& e) {
    const auto* fe = dynamic_cast<const FitDegeneracyError*>(&e);
    j["seeds"]["per_iteration"] = iteration_seeds(fe ? fe->iteration : 1);
    j["fit"] = degeneracy_json(e);
    emit(o, j);
    std::cerr << "mergm: " << e.what() << "\n";
    return kDegenerate;
  }
}

int cmd_simulate(const Options& o) {
  const ModelSpec spec = parse_terms(o.terms);
  if (o.nodes < 1) throw UsageError("simulate needs --nodes");
  if (o.out.empty()) throw UsageError("simulate needs --out <directory>");
  if (o.sigma2 < 0.0) throw UsageError("--sigma2 must be nonnegative");
  const Vector theta = parse_vector(o.theta, "--theta");
  if (theta.size() != spec.size()) throw UsageError("--theta needs one value per term");
  std::optional<Vector> fixed_u;
  if (!o.u_file.empty()) {
    fixed_u = vector_from_json(read_json_file(o.u_file));
    if (fixed_u->size() != o.nodes) throw UsageError("u file length must equal --nodes");
  }
  const long replicates = o.nsim > 0 ? o.nsim : 1;
  const int n = o.nodes;

  std::filesystem::create_directories(o.out);
  json manifest = envelope("simulate", resolved(o, n, 1), &spec);
  manifest["config"]["theta"] = to_json(theta);
  manifest["config"]["sigma2"] = o.sigma2;
  if (!o.u_file.empty()) manifest["config"]["u_file"] = o.u_file;
  std::ostringstream csv;
  csv << "replicate";
  for (const auto& name : spec.names()) csv << ',' << name;
  csv << '\n';
  csv.precision(17);

  json reps = json::array();
  for (long r = 0; r < replicates; ++r) {
    const auto index = static_cast<std::uint64_t>(r);
    const std::uint64_t u_seed = derive_seed(*o.seed, 2 * index);
    const std::uint64_t net_seed = derive_seed(*o.seed, 2 * index + 1);
    Vector u = Vector::Zero(n);
    if (fixed_u) {
      u = *fixed_u;
    } else if (o.sigma2 > 0.0) {
      Rng rng(u_seed);
      for (int i = 0; i < n; ++i) u(i) = std::sqrt(o.sigma2) * rng.normal();
    }
    SamplerConfig sc;
    sc.burn_in = o.burnin;
    sc.thin = o.thin;
    sc.n_samples = 1;
    sc.seed = net_seed;
    const SampleSet draw = sample(UndirectedNetwork(n), spec, theta, u, sc, true);
    const UndirectedNetwork& y = draw.networks.front();

    char name[64];
    std::snprintf(name, sizeof name, "replicate_%04ld.edges", r);
    std::ostringstream edges;
    write_edge_list(edges, y, o.one_based);
    write_file_atomic((std::filesystem::path(o.out) / name).string(), edges.str());

    csv << r;
    for (Eigen::Index k = 0; k < draw.stats.cols(); ++k) csv << ',' << draw.stats(0, k);
    csv << '\n';
    reps.push_back({{"file", name}, {"u_seed", u_seed}, {"network_seed", net_seed}, {"u", to_json(u)},
                    {"edges", y.edge_count()}});
  }
  manifest["replicates"] = reps;
  manifest["statistics_csv"] = "statistics.csv";
  write_file_atomic((std::filesystem::path(o.out) / "statistics.csv").string(), csv.str());
  write_file_atomic((std::filesystem::path(o.out) / "manifest.json").string(), manifest.dump(2) + "\n");
  return kOk;
}

// Fit JSON as written by `fit`: either the full envelope or the bare fit object.
std::pair<FitResult, ModelSpec> load_fit(const std::string& path) {
  json j = read_json_file(path);
  if (j.contains("fit")) j = j["fit"];
  if (j.contains("error")) throw UsageError("'" + path + "' records a failed fit");
  try {
    return {fit_from_json(j), parse_terms(j.at("terms").get<std::string>())};
  } catch (const json::exception& e) {
    throw UsageError("'" + path + "' is not a fit result: " + e.what());
  }
}

AicConfig aic_config(const Options& o, std::uint64_t stream) {
  AicConfig cfg;
  cfg.n_sim = o.nsim > 0 ? o.nsim : 1000;
  cfg.bridges = o.bridges;
  cfg.burn_in = o.burnin;
  cfg.thin = o.thin;
  cfg.seed = derive_seed(*o.seed, stream);
  return cfg;
}

AicReport aic_for(const FitResult& fit, const UndirectedNetwork& net, const ModelSpec& spec,
                  const AicConfig& cfg) {
  return fit.random_effects ? aic_mergm(fit, net, spec, cfg) : aic_ergm(fit.theta, net, spec, cfg);
}

void check_fit_matches(const FitResult& fit, const ModelSpec& spec, const UndirectedNetwork& net) {
  if (fit.theta.size() != spec.size()) throw UsageError("fit does not match its terms");
  if (fit.random_effects && fit.u.size() != net.size()) {
    throw UsageError("fit has " + std::to_string(fit.u.size()) + " node effects but the data has " +
                     std::to_string(net.size()) + " nodes");
  }
}

int cmd_aic(const Options& o) {
  if (o.fit_path.empty()) throw UsageError("aic needs --fit <fit.json>");
  auto [fit, spec] = load_fit(o.fit_path);
  const UndirectedNetwork net = load(o);
  check_fit_matches(fit, spec, net);
  const AicConfig cfg = aic_config(o, 0);
  json j = envelope("aic", resolved(o, net.size(), cfg.n_sim), &spec);
  j["config"]["fit"] = o.fit_path;
  j["config"]["bridges"] = cfg.bridges;
  j["seeds"]["aic"] = cfg.seed;
  j["aic"] = to_json(aic_for(fit, net, spec, cfg));
  emit(o, j);
  return kOk;
}

int cmd_compare(const Options& o) {
  const ModelSpec spec = parse_terms(o.terms);
  const UndirectedNetwork net = load(o);
  std::vector<std::string> models;
  {
    std::stringstream ss(o.models);
    std::string m;
    while (std::getline(ss, m, ',')) models.push_back(m);
  }
  if (models.size() != 2) throw UsageError("--models takes two comma-separated entries");

  json j = envelope("compare", resolved(o, net.size(), AicConfig{}.n_sim), &spec);
  j["config"]["models"] = models;
  j["config"]["max_iter"] = o.max_iter;
  j["config"]["tol"] = std::isinf(o.tol) ? json("inf") : json(o.tol);
  j["config"]["bridges"] = o.bridges;
  DriverConfig dcfg = driver_config(o);
  dcfg.mcmle.n_sim = McmleConfig{}.n_sim;  // --nsim applies to the AIC draws here

  std::vector<AicReport> reports;
  json entries = json::array();
  int status = kOk;
  for (std::size_t k = 0; k < 2; ++k) {
    dcfg.seed = derive_seed(*o.seed, 10 + k);
    const AicConfig acfg = aic_config(o, 20 + k);
    json entry = {{"model", models[k]}, {"fit_seed", dcfg.seed}, {"aic_seed", acfg.seed}};
    try {
      const FitResult fit = run_fit(net, spec, models[k], dcfg);
      entry["fit"] = to_json(fit, spec);
      entry["fit"]["unstable"] = unstable(fit.theta);
      if (o.strict && !fit.converged) status = kNotConverged;
      reports.push_back(aic_for(fit, net, spec, acfg));
      entry["aic"] = to_json(reports.back());
    } catch (const DegeneracyError& e) {
      entry["fit"] = degeneracy_json(e);
      status = kDegenerate;
    }
    entries.push_back(entry);
  }
  j["models"] = entries;
  if (reports.size() == 2) {
    const AicComparison c = compare_aic(reports[0], reports[1]);
    auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["comparison"] = {{"log_aic_ratio", number(c.log_ratio)},
                       {"log_aic_ratio_se", number(c.log_ratio_se)},
                       {"aic_difference", c.difference},
                       {"aic_difference_se", c.difference_se},
                       {"inconclusive", c.inconclusive},
                       {"preferred", c.inconclusive ? "none" : (c.difference < 0 ? models[0] : models[1])}};
  } else {
    j["comparison"] = nullptr;
  }
  emit(o, j);
  return status;
}

int cmd_gof(const Options& o) {
  if (o.fit_path.empty()) throw UsageError("gof needs --fit <fit.json>");
  auto [fit, spec] = load_fit(o.fit_path);
  const UndirectedNetwork net = load(o);
  check_fit_matches(fit, spec, net);
  SamplerConfig sc;
  sc.n_samples = o.nsim > 0 ? o.nsim : 100;
  sc.burn_in = o.burnin;
  sc.thin = o.thin;
  sc.seed = derive_seed(*o.seed, 0);
  const GofReport report = gof_run(net, spec, fit.theta, fit.random_effects ? fit.u : Vector(), sc);

  json j = envelope("gof", resolved(o, net.size(), sc.n_samples), &spec);
  j["config"]["fit"] = o.fit_path;
  j["config"]["model"] = fit.random_effects ? "mergm" : "ergm";
  j["seeds"]["sampler"] = sc.seed;
  j["diagnostics"] = to_json(report);
  emit(o, j);

  if (!o.csv.empty()) {
    for (const auto& d : report.diagnostics) {
      std::ostringstream csv;
      csv << "simulation";
      for (const auto& b : d.bins) csv << ',' << b;
      csv << '\n';
      for (std::size_t r = 0; r < d.simulated.size(); ++r) {
        csv << r;
        for (long v : d.simulated[r]) csv << ',' << v;
        csv << '\n';
      }
      write_file_atomic(o.csv + "." + d.name + ".csv", csv.str());
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed exponential random graph models"};
  app.set_version_flag("--version", std::string(MERGM_VERSION));
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "fit an ERGM or mERGM");
  add_common(fit, o, true);
  fit->add_option("--terms", o.terms, "comma-separated terms, name[:decay]");
  fit->add_option("--model", o.model, "ergm or mergm")->check(CLI::IsMember({"ergm", "mergm"}));
  fit->add_option("--max-iter", o.max_iter, "outer iterations of the mERGM algorithm");
  fit->add_option("--tol", o.tol, "convergence tolerance on theta (max norm)");
  fit->add_flag("--strict", o.strict, "exit 4 when the fit did not converge");

  auto* sim = app.add_subcommand("simulate", "simulate networks from a model");
  add_common(sim, o, false);
  sim->add_option("--terms", o.terms, "comma-separated terms, name[:decay]");
  sim->add_option("--theta", o.theta, "comma-separated parameters")->required();
  sim->add_option("--sigma2", o.sigma2, "variance of the node effects (0 = none)");
  sim->add_option("--u-file", o.u_file, "JSON array of fixed node effects");

  auto* aic = app.add_subcommand("aic", "AIC of a fitted model");
  add_common(aic, o, true);
  aic->add_option("--fit", o.fit_path, "fit JSON")->required();
  aic->add_option("--bridges", o.bridges, "tempered bridge links for the normalizer");

  auto* cmp = app.add_subcommand("compare", "fit two models and compare their AIC");
  add_common(cmp, o, true);
  cmp->add_option("--terms", o.terms, "comma-separated terms, name[:decay]");
  cmp->add_option("--models", o.models, "pair of models, e.g. mergm,ergm");
  cmp->add_option("--max-iter", o.max_iter, "outer iterations of the mERGM algorithm");
  cmp->add_option("--tol", o.tol, "convergence tolerance on theta (max norm)");
  cmp->add_option("--bridges", o.bridges, "tempered bridge links for the normalizer");
  cmp->add_flag("--strict", o.strict, "exit 4 when a fit did not converge");

  auto* gof = app.add_subcommand("gof", "goodness-of-fit diagnostics");
  add_common(gof, o, true);
  gof->add_option("--fit", o.fit_path, "fit JSON")->required();
  gof->add_option("--csv", o.csv, "write per-diagnostic CSV tables with this prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*fit) return cmd_fit(o);
    if (*sim) return cmd_simulate(o);
    if (*aic) return cmd_aic(o);
    if (*cmp) return cmd_compare(o);
    if (*gof) return cmd_gof(o);
  } catch (const ParseError& e) {
    std::cerr << "mergm: " << e.what() << "\n";
    return kParse;
  } catch (const UsageError& e) {
    std::cerr << "mergm: " << e.what() << "\n";
    return kParse;
  } catch (const DegeneracyError& e) {
    std::cerr << "mergm: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "mergm: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
