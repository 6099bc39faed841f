// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mergm/driver.hpp"
#include "mergm/enumerate.hpp"
#include "mergm/glmm.hpp"
#include "mergm/io.hpp"
#include "mergm/mcmcmle.hpp"
#include "mergm/rng.hpp"
#include "mergm/sampler.hpp"
#include "mergm/selection.hpp"
#include "oracles.hpp"

using namespace mergm;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMaster = 20240611;
constexpr double kUnstable = 10.0;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

std::string fmt(const Vector& v) {
  std::ostringstream s;
  s.precision(4);
  s << "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) s << (k ? ", " : "") << v(k);
  s << ")";
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool unstable(const Vector& theta) {
  return !theta.allFinite() || theta.lpNorm<Eigen::Infinity>() > kUnstable;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
std::vector<int> selected;  // empty runs everything

void run(int id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body) {
  if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) return;
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_seconds) {
    out.pass = false;
    out.detail += "; over the time limit";
  }
  if (!out.pass) ++failures;
  std::printf("%s  %2d %s  [%.1fs] %s\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), secs, out.detail.c_str());
  std::fflush(stdout);
}

void note(const std::string& line) {
  std::printf("      %s\n", line.c_str());
  std::fflush(stdout);
}

// One draw from the mERGM after a long burn-in from the empty graph.
UndirectedNetwork simulate_network(int n, const ModelSpec& spec, const Vector& theta, const Vector& u,
                                   std::uint64_t seed) {
  SamplerConfig sc;
  sc.burn_in = 100L * n * n;
  sc.n_samples = 1;
  sc.seed = seed;
  return sample(UndirectedNetwork(n), spec, theta, u, sc, true).networks.front();
}

Vector normal_effects(int n, double sigma2, std::uint64_t seed) {
  Rng rng(seed);
  Vector u = Vector::Zero(n);
  if (sigma2 > 0.0)
    for (int i = 0; i < n; ++i) u(i) = std::sqrt(sigma2) * rng.normal();
  return u;
}

// Outcome of fitting one model to one data set.
struct ModelFit {
  bool degenerate = false;
  std::string error;
  FitResult fit;
  AicReport aic;
};

ModelFit fit_and_score(const UndirectedNetwork& net, const ModelSpec& spec, bool mixed, std::uint64_t seed) {
  ModelFit m;
  DriverConfig cfg;
  cfg.seed = seed;
  try {
    m.fit = mixed ? fit_mergm(net, spec, cfg) : fit_ergm(net, spec, cfg);
  } catch (const DegeneracyError& e) {
    m.degenerate = true;
    m.error = e.what();
    return m;
  }
  AicConfig ac;
  ac.seed = derive_seed(seed, 99);
  m.aic = mixed ? aic_mergm(m.fit, net, spec, ac) : aic_ergm(m.fit.theta, net, spec, ac);
  return m;
}

// log(AIC_mERGM / AIC_ERGM); a model that failed with a degeneracy error
// loses the comparison.
double log_aic_ratio(const ModelFit& mixed, const ModelFit& plain) {
  if (mixed.degenerate && plain.degenerate) return std::nan("");
  if (plain.degenerate) return -INFINITY;
  if (mixed.degenerate) return INFINITY;
  return compare_aic(mixed.aic, plain.aic).log_ratio;
}

struct Replicate {
  ModelFit mixed;
  ModelFit plain;
  double sigma2 = 0.0;
};

const ModelSpec kStudySpec = ModelSpec::parse("edges,gwesp,twostars");
const Vector kStudyTheta = vec({-1.0, 0.2, -0.3});

std::vector<Replicate> simulation_study(double sigma2, std::uint64_t stream) {
  std::vector<Replicate> reps;
  for (std::uint64_t r = 0; r < 10; ++r) {
    const std::uint64_t base = derive_seed(derive_seed(kMaster, stream), r);
    const Vector u = normal_effects(50, sigma2, derive_seed(base, 0));
    const UndirectedNetwork net = simulate_network(50, kStudySpec, kStudyTheta, u, derive_seed(base, 1));
    Replicate rep;
    rep.sigma2 = sigma2;
    rep.mixed = fit_and_score(net, kStudySpec, true, derive_seed(base, 2));
    rep.plain = fit_and_score(net, kStudySpec, false, derive_seed(base, 3));
    std::ostringstream s;
    s << "sigma2=" << sigma2 << " rep " << r << ": edges " << net.edge_count() << "; mERGM ";
    if (rep.mixed.degenerate) {
      s << "degenerate";
    } else {
      s << fmt(rep.mixed.fit.theta) << " s2=" << rep.mixed.fit.sigma2 << " it=" << rep.mixed.fit.iterations;
    }
    s << "; ERGM " << (rep.plain.degenerate ? std::string("degenerate") : fmt(rep.plain.fit.theta));
    s << "; AIC " << (rep.mixed.degenerate ? NAN : rep.mixed.aic.aic) << " vs "
      << (rep.plain.degenerate ? NAN : rep.plain.aic.aic) << ", log ratio " << log_aic_ratio(rep.mixed, rep.plain);
    note(s.str());
    reps.push_back(std::move(rep));
  }
  return reps;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<missing " + p.string() + ">";
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  const ModelSpec two_stars = ModelSpec::parse("edges,twostars");

  run(1, "bridge normalizer vs enumeration (n=4)", 120, [&] {
    Rng rng(derive_seed(kMaster, 1));
    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      const Vector theta = vec({-1.0 + rng.uniform(), -0.3 + 0.6 * rng.uniform()});
      Vector u(4);
      for (int i = 0; i < 4; ++i) u(i) = rng.normal();
      KappaConfig kc;
      kc.sampler.n_samples = 100000;
      kc.sampler.seed = derive_seed(kMaster, 100 + rep);
      const KappaEstimate est = estimate_kappa(UndirectedNetwork(4), two_stars, theta, u, kc);
      const double err = std::abs(est.log_kappa - exact_log_kappa(4, two_stars, theta, u));
      worst = std::max(worst, err);
      if (err >= 3.0 * est.mc_se || err >= 0.05) ok = false;
    }
    return Outcome{ok, "max |error| " + std::to_string(worst)};
  });

  run(2, "MC-MLE vs enumeration MLE (10 networks, n=5)", 300, [&] {
    Rng rng(derive_seed(kMaster, 2));
    McmleConfig cfg;
    cfg.n_sim = 20000;
    int checked = 0, good = 0;
    double worst = 0.0;
    for (int attempt = 0; checked < 10 && attempt < 500; ++attempt) {
      const UndirectedNetwork net = oracle::random_network(5, 0.2 + 0.6 * rng.uniform(), rng);
      Vector exact;
      try {
        exact = exact_mle(net, two_stars);
      } catch (const BoundaryMleError&) {
        continue;
      }
      cfg.seed = derive_seed(kMaster, 200 + static_cast<std::uint64_t>(attempt));
      const double err = (fit_theta(net, two_stars, Vector(), Vector(), cfg).theta - exact).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, err);
      if (err < 0.05) ++good;
      ++checked;
    }
    return Outcome{checked == 10 && good == 10,
                   std::to_string(good) + "/" + std::to_string(checked) + " within 0.05, max " + std::to_string(worst)};
  });

  run(3, "change statistics vs brute force (1000 cases)", 30, [&] {
    Rng rng(derive_seed(kMaster, 3));
    const TermKind kinds[] = {TermKind::Edges, TermKind::TwoStars, TermKind::Gwesp, TermKind::Gwnsp,
                              TermKind::Gwdegree};
    int bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(11));
      const StatTerm term{kinds[rng.below(5)], 0.1 + 2.0 * rng.uniform()};
      const ModelSpec spec({term});
      auto net = oracle::random_network(n, rng.uniform(), rng);
      const auto i = static_cast<int>(rng.below(n));
      auto j = static_cast<int>(rng.below(n - 1));
      if (j >= i) ++j;
      const double delta = change_statistics(net, spec, i, j)(0);
      net.set_edge(i, j, true);
      const double plus = oracle::statistic(oracle::adjacency(net), term);
      net.set_edge(i, j, false);
      const double minus = oracle::statistic(oracle::adjacency(net), term);
      const double err = std::abs(delta - (plus - minus));
      worst = std::max(worst, err);
      if (!(err <= 1e-10)) ++bad;
    }
    return Outcome{bad == 0, std::to_string(bad) + " mismatches, max " + std::to_string(worst)};
  });

  run(4, "sampler calibration", 60, [&] {
    const ModelSpec edges = ModelSpec::parse("edges");
    SamplerConfig sc;
    sc.n_samples = 10000;
    sc.seed = derive_seed(kMaster, 4);
    const SampleSet d = sample(UndirectedNetwork(20), edges, vec({-1.0}), Vector(), sc);
    const double density = d.stats.col(0).mean() / 190.0;

    sc.n_samples = 100000;
    sc.seed = derive_seed(kMaster, 5);
    const SampleSet law = sample(UndirectedNetwork(4), edges, vec({0.0}), Vector(), sc, true);
    const GraphEnumeration all(4, edges);
    std::vector<double> counts(64, 0.0);
    for (const auto& g : law.networks) counts[static_cast<std::size_t>(all.index_of(g))] += 1.0;
    const double expected = 100000.0 / 64.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const double critical = boost::math::quantile(boost::math::chi_squared(63), 0.99);
    std::ostringstream s;
    s << "density " << density << " (target " << logistic(-1.0) << "), chi2 " << chi2 << " < " << critical;
    return Outcome{std::abs(density - logistic(-1.0)) < 0.01 && chi2 < critical, s.str()};
  });

  std::vector<Replicate> heterogeneous;
  run(5, "simulation study recovery (10 x n=50, sigma2=1)", 1800, [&] {
    heterogeneous = simulation_study(1.0, 5);
    const Vector reference = vec({-1.23, 0.30, -0.35});
    bool stable = true;
    int plain_unstable = 0;
    std::vector<std::vector<double>> est(3);
    for (const auto& r : heterogeneous) {
      if (r.mixed.degenerate || unstable(r.mixed.fit.theta)) {
        stable = false;
      } else {
        for (int k = 0; k < 3; ++k) est[static_cast<std::size_t>(k)].push_back(r.mixed.fit.theta(k));
      }
      if (r.plain.degenerate || unstable(r.plain.fit.theta)) ++plain_unstable;
    }
    bool close = stable;
    Vector med = Vector::Constant(3, std::nan(""));
    if (stable) {
      for (int k = 0; k < 3; ++k) {
        med(k) = median(est[static_cast<std::size_t>(k)]);
        if (std::abs(med(k) - reference(k)) > 0.5) close = false;
      }
    }
    std::ostringstream s;
    s << "mERGM " << (stable ? "stable" : "unstable") << ", medians " << fmt(med) << " vs " << fmt(reference)
      << "; ERGM unstable in " << plain_unstable << "/10";
    return Outcome{stable && close && plain_unstable >= 1, s.str()};
  });

  run(6, "AIC model selection (sigma2 = 0 vs 1)", 3600, [&] {
    if (heterogeneous.empty()) heterogeneous = simulation_study(1.0, 5);
    const std::vector<Replicate> homogeneous = simulation_study(0.0, 6);
    // The log ratio is undefined when an AIC is not positive; such replicates
    // count against the criterion.
    auto ratios = [](const std::vector<Replicate>& reps) {
      std::vector<double> out;
      for (const auto& r : reps) {
        const double x = log_aic_ratio(r.mixed, r.plain);
        if (!std::isnan(x)) out.push_back(x);
      }
      return out;
    };
    const std::vector<double> r0 = ratios(homogeneous);
    const std::vector<double> r1 = ratios(heterogeneous);
    const double m0 = r0.empty() ? NAN : median(r0);
    const double m1 = r1.empty() ? NAN : median(r1);
    const auto negative = std::count_if(r1.begin(), r1.end(), [](double x) { return x < 0.0; });
    std::ostringstream s;
    s << "median log ratio " << m0 << " at sigma2=0 (" << 10 - r0.size() << " undefined), " << m1
      << " at sigma2=1 (" << 10 - r1.size() << " undefined); negative in " << negative << "/10";
    return Outcome{r0.size() == 10 && r1.size() == 10 && m0 > 0.0 && m1 < 0.0 && negative >= 8, s.str()};
  });

  run(7, "Zachary karate club", 600, [&] {
    const UndirectedNetwork karate = zachary_karate_club();
    std::ostringstream s;
    bool ok = true;

    DriverConfig cfg;
    cfg.seed = derive_seed(kMaster, 7);
    try {
      const FitResult f = fit_ergm(karate, ModelSpec::parse("edges,gwesp,gwdegree"), cfg);
      s << "ERGM(edges,gwesp,gwdegree) " << fmt(f.theta);
      if (!(f.converged && f.theta(0) < 0.0 && f.theta(1) > 0.0)) ok = false;
    } catch (const DegeneracyError& e) {
      s << "ERGM(edges,gwesp,gwdegree) degenerate";
      ok = false;
    }

    try {
      const FitResult f = fit_mergm(karate, kStudySpec, cfg);
      s << "; mERGM " << fmt(f.theta) << " s2=" << f.sigma2 << (f.converged ? " converged" : " not converged");
      if (!f.converged) ok = false;
    } catch (const DegeneracyError& e) {
      s << "; mERGM degenerate (" << e.what() << ")";
      ok = false;
    }

    int bad = 0;
    for (std::uint64_t k = 0; k < 5; ++k) {
      DriverConfig c;
      c.seed = derive_seed(kMaster, 70 + k);
      try {
        if (unstable(fit_ergm(karate, kStudySpec, c).theta)) ++bad;
      } catch (const DegeneracyError&) {
        ++bad;
      }
    }
    s << "; plain ERGM unstable in " << bad << "/5";
    if (bad < 3) ok = false;
    return Outcome{ok, s.str()};
  });

  run(8, "GLMM recovery (n=50)", 120, [&] {
    const ModelSpec edges = ModelSpec::parse("edges");
    int good = 0, small = 0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      for (double sigma2 : {1.0, 0.0}) {
        Rng rng(derive_seed(derive_seed(kMaster, sigma2 > 0.0 ? 8 : 9), rep));
        Vector u(50);
        for (int i = 0; i < 50; ++i) u(i) = std::sqrt(sigma2) * rng.normal();
        UndirectedNetwork net(50);
        for (int i = 0; i < 50; ++i)
          for (int j = i + 1; j < 50; ++j)
            if (rng.uniform() < logistic(-1.0 + u(i) + u(j))) net.toggle(i, j);
        const PqlResult fit = fit_pql(build_dyad_design(net, edges), true, NodeEffects::zeros(50));
        const double s2 = fit.effects.sigma2;
        if (sigma2 > 0.0) {
          const Vector a = fit.effects.u.array() - fit.effects.u.mean();
          const Vector b = u.array() - u.mean();
          const double corr = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
          if (corr > 0.7 && s2 >= 0.5 && s2 <= 1.6) ++good;
        } else if (s2 < 0.1) {
          ++small;
        }
      }
    }
    return Outcome{good >= 18 && small >= 18,
                   "sigma2=1 recovered " + std::to_string(good) + "/20, sigma2=0 small " + std::to_string(small) + "/20"};
  });

  run(9, "Laplace log-likelihood assembly (n=4)", 120, [&] {
    const auto net = UndirectedNetwork::from_edges(4, {{0, 1}, {1, 2}, {1, 3}});
    FitResult fit;
    fit.theta = vec({-0.4, -0.1});
    fit.u = vec({-0.3, 0.6, 0.1, -0.2});
    fit.sigma2 = 0.4;
    AicConfig cfg;
    cfg.n_sim = 100000;
    cfg.seed = derive_seed(kMaster, 9);
    const AicReport sim = aic_mergm(fit, net, two_stars, cfg);
    LaplaceTerms exact = sim.terms;
    exact.log_kappa = exact_log_kappa(4, two_stars, fit.theta, fit.u);
    exact.log_det = log_det_hessian(GraphEnumeration(4, two_stars).moments(fit.theta, fit.u).cov_t, fit.sigma2);
    const double target = laplace_loglik(exact);
    const double err = std::abs(sim.loglik - target);
    std::ostringstream s;
    s << "simulated " << sim.loglik << ", exact " << target << ", |diff| " << err << ", MC-SE " << sim.mc_se_loglik;
    return Outcome{err < 3.0 * sim.mc_se_loglik, s.str()};
  });

  run(10, "CLI determinism", 600, [&] {
    const fs::path dir = fs::temp_directory_path() / ("mergm_acceptance_" + std::to_string(kMaster));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = MERGM_CLI_PATH;
    auto at = [&](const std::string& name) { return (dir / name).string(); };
    struct Command {
      std::string args;
      std::vector<std::string> outputs;
    };
    const std::vector<Command> commands = {
        {"fit --data zachary --model mergm --terms edges,gwesp --seed 5 --out @fit.json", {"fit.json"}},
        {"fit --data zachary --model ergm --terms edges,gwesp,gwdegree --seed 5 --out @ergm.json", {"ergm.json"}},
        {"aic --data zachary --fit @fit.json --seed 5 --out @aic.json", {"aic.json"}},
        {"gof --data zachary --fit @ergm.json --seed 5 --out @gof.json --csv @gof",
         {"gof.json", "gof.degree.csv", "gof.esp.csv", "gof.geodesic.csv"}},
        {"simulate --terms edges,gwesp,twostars --theta=-1,0.2,-0.3 --sigma2 1 --nodes 30 --nsim 3 --seed 5 --out @sim",
         {"sim/manifest.json", "sim/statistics.csv", "sim/replicate_0000.edges", "sim/replicate_0002.edges"}},
        {"compare --data zachary --terms edges,gwesp --seed 5 --out @cmp.json", {"cmp.json"}},
    };
    int differing = 0, failed = 0;
    for (const auto& c : commands) {
      std::vector<std::string> first;
      for (int pass = 0; pass < 2; ++pass) {
        std::string args = c.args;
        for (std::size_t p = args.find('@'); p != std::string::npos; p = args.find('@', p))
          args.replace(p, 1, dir.string() + "/");
        if (shell("\"" + cli + "\" " + args) != 0) ++failed;
        for (std::size_t k = 0; k < c.outputs.size(); ++k) {
          const std::string content = slurp(at(c.outputs[k]));
          if (pass == 0) {
            first.push_back(content);
          } else if (content != first[k]) {
            ++differing;
            note("differs: " + c.outputs[k]);
          }
        }
      }
    }
    fs::remove_all(dir);
    return Outcome{differing == 0 && failed == 0,
                   std::to_string(differing) + " differing outputs, " + std::to_string(failed) + " failed runs"};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
