// sebench: command line front end for the sparse_ergodic library.
#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/czd.hpp"
#include "sparse_ergodic/ergosim.hpp"
#include "sparse_ergodic/experiments.hpp"
#include "sparse_ergodic/expsum.hpp"
#include "sparse_ergodic/fit.hpp"
#include "sparse_ergodic/io.hpp"
#include "sparse_ergodic/kernels.hpp"
#include "sparse_ergodic/oscfun.hpp"
#include "sparse_ergodic/seq.hpp"

namespace se = sparse_ergodic;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kVerdictFail = 1;
constexpr int kUsage = 2;

struct Global {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string format = "json";
};

// Writes to <out>/<name> when --out is set, stdout otherwise.
void emit(const Global& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    se::io::write_file(std::filesystem::path(g.out) / name, text);
    std::cerr << "wrote " << (std::filesystem::path(g.out) / name).string() << '\n';
  }
}

int run_config(const Global& g, const std::string& path) {
  auto cfg = se::experiments::config_from_file(path);
  if (!g.out.empty()) cfg.out = g.out;
  if (g.threads > 0) cfg.threads = g.threads;
  const auto w = se::experiments::run_experiment(cfg);
  std::cerr << "wrote " << w.csv.string() << " and " << w.json.string() << '\n';
  for (const auto& c : w.report.checks) {
    std::cout << (c.pass ? "pass " : "FAIL ") << c.name << ' ' << c.value << ' ' << c.relation << ' ' << c.limit
              << '\n';
  }
  for (const auto& [name, f] : w.report.fits) {
    std::cout << (f.verdict ? (*f.verdict ? "pass " : "FAIL ") : "info ") << name << " slope " << f.slope;
    if (f.claimed) std::cout << " claimed " << *f.claimed;
    std::cout << " residual " << f.residual_rms << '\n';
  }
  return w.report.pass() ? kPass : kVerdictFail;
}

std::vector<double> read_series(const std::string& path) {
  const auto data = se::io::read_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bin") return se::oscfun::series_from_binary(data);
  return se::oscfun::series_from_json(data);
}

// "x:w,x:w"
std::vector<std::pair<std::int64_t, double>> parse_masses(const std::string& s) {
  std::vector<std::pair<std::int64_t, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw se::ConfigError("mass '" + item + "' is not of the form x:w");
    out.emplace_back(std::stoll(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return out;
}

std::string fit_csv_to_json(const std::string& text, std::optional<double> claimed, bool& verdict_fail) {
  std::stringstream ss(text);
  std::string line;
  std::vector<double> N, v;
  bool header = true;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.find_first_not_of("0123456789.eE+-, \t") != std::string::npos) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw se::ConfigError("fit input line '" + line + "' needs two columns");
    N.push_back(std::stod(line.substr(0, comma)));
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  const auto f = se::fit::fit_slope(N, v, claimed);
  verdict_fail = f.verdict && !*f.verdict;
  return se::fit::to_json(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sebench: sparse ergodic averages desk-scale experiments"};
  app.set_version_flag("--version", std::string(se::version()));
  Global g;
  app.add_option("--config", g.config, "Experiment config (JSON); runs it when no subcommand is given");
  app.add_option("--out", g.out, "Output directory (default: stdout)");
  app.add_option("--seed", g.seed, "Seed for randomized subcommands");
  app.add_option("--threads", g.threads, "Worker threads");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.require_subcommand(0, 1);
  app.fallthrough();

  // gen-seq
  auto* gen = app.add_subcommand("gen-seq", "Generate a floor-power or random hitting-time sequence");
  std::string kind = "floor";
  double c = 1.1, alpha = 0.3;
  std::int64_t count = 100;
  gen->add_option("--kind", kind, "floor | random")->check(CLI::IsMember({"floor", "random"}));
  gen->add_option("--c", c, "Exponent c in [1, 2)");
  gen->add_option("--alpha", alpha, "Bernoulli decay alpha in (0, 1)");
  gen->add_option("--count", count, "Number of terms")->check(CLI::PositiveNumber);

  // osc
  auto* osc = app.add_subcommand("osc", "Evaluate an oscillation functional on a series (.json or .bin)");
  std::string input, functional = "variation";
  double eps = 1.0, r = 2.0;
  std::vector<std::size_t> bps;
  osc->add_option("--input", input, "Series file")->required();
  osc->add_option("--functional", functional, "jump | variation | oscillation | diameter");
  osc->add_option("--epsilon", eps, "Jump altitude");
  osc->add_option("--r", r, "Variation exponent");
  osc->add_option("--breakpoints", bps, "Oscillation breakpoints (0-based)")->delimiter(',');

  // kernel-corr
  auto* kc = app.add_subcommand("kernel-corr", "Correlation diagnostics of the average kernels at one scale");
  std::int64_t N = 1 << 14;
  bool random_model = false;
  kc->add_option("--N", N, "Scale N (>= 1024)");
  kc->add_option("--c", c, "Exponent c");
  kc->add_flag("--random", random_model, "Use the random model with --alpha and --seed");
  kc->add_option("--alpha", alpha, "Bernoulli decay alpha");

  // expsum-check
  auto* es = app.add_subcommand("expsum-check", "Compare a two-frequency exponential sum with its bound");
  se::expsum::TwoFreqParams lp;
  double ratio_limit = 10.0;
  es->add_option("--case", lp.which, "1, 2 or 3")->check(CLI::Range(1, 3));
  es->add_option("--N", lp.N, "Scale N");
  es->add_option("--c", lp.c, "Exponent c");
  es->add_option("--theta", lp.theta, "Linear phase");
  es->add_option("--t", lp.t, "Upper end of the sum (0 = N)");
  es->add_option("--freq", lp.h, "Frequency h (case 1)");
  es->add_option("--u", lp.u, "Shift (case 1)");
  es->add_option("--h1", lp.h1, "First frequency (cases 2, 3)");
  es->add_option("--h2", lp.h2, "Second frequency (cases 2, 3)");
  es->add_option("--u1", lp.u1, "First shift");
  es->add_option("--u2", lp.u2, "Second shift");
  es->add_option("--x", lp.x, "Lag x");
  es->add_option("--N0", lp.N0, "Differencing length (case 2)");
  es->add_option("--H", lp.H, "Frequency cap (case 3)");
  es->add_option("--limit", ratio_limit, "Ratio above which the check fails");

  // czd-demo
  auto* cz = app.add_subcommand("czd-demo", "Calderon-Zygmund split of point masses");
  std::string masses = "0:64,100:16,1000:4";
  int scale = 10;
  double level = se::czd::kDefaultLevel;
  cz->add_option("--masses", masses, "Point masses x:w,x:w,...");
  cz->add_option("--n", scale, "Scale index n");
  cz->add_option("--alpha", alpha, "Truncation exponent alpha");
  cz->add_option("--level", level, "Stopping level");

  // ergodic-run
  auto* er = app.add_subcommand("ergodic-run", "Census of ergodic averages on a rotation or the shift");
  std::string system = "rotation";
  std::int64_t m = 10007, H = 1 << 14;
  double tau = 0.1;
  int R = 16;
  std::int64_t trace_states = 0;
  er->add_option("--system", system, "rotation | shift")->check(CLI::IsMember({"rotation", "shift"}));
  er->add_option("--m", m, "Rotation modulus");
  er->add_option("--H", H, "Horizon");
  er->add_option("--c", c, "Exponent c");
  er->add_option("--tau", tau, "Oscillation threshold");
  er->add_option("--R", R, "Lacunary density");
  er->add_option("--traces", trace_states, "Write per-state traces for this many states (csv)");

  // fit
  auto* ft = app.add_subcommand("fit", "Fit a log-log slope to N,value rows");
  std::string fit_input;
  std::optional<double> claimed;
  ft->add_option("--input", fit_input, "CSV with columns N,value")->required();
  ft->add_option("--claimed", claimed, "Claimed exponent for a verdict");

  // run
  auto* rn = app.add_subcommand("run", "Run an experiment config");
  std::string run_path;
  rn->add_option("config", run_path, "Config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (g.threads > 0) se::set_worker_threads(g.threads);
    const bool csv = g.format == "csv";
    if (*gen) {
      se::seq::SparseSequence s;
      if (kind == "floor") {
        s = se::seq::floor_power_sequence(c, count);
      } else {
        // grow the indicator range until it carries enough ones
        std::int64_t n_max = std::max<std::int64_t>(16, static_cast<std::int64_t>(2.0 * std::pow(static_cast<double>(count), 1.0 / (1.0 - alpha))));
        for (;;) {
          try {
            s = se::seq::hitting_times(se::seq::bernoulli_indicators(alpha, n_max, g.seed), count);
            break;
          } catch (const se::seq::ExhaustedError&) {
            n_max *= 2;
          }
        }
      }
      if (csv) {
        std::string t = "n,a_n\n";
        for (std::size_t i = 0; i < s.terms.size(); ++i) t += std::to_string(i + 1) + "," + std::to_string(s.terms[i]) + "\n";
        emit(g, "sequence.csv", t);
      } else {
        emit(g, "sequence.json", se::seq::to_json(s));
      }
      return kPass;
    }
    if (*osc) {
      const auto a = read_series(input);
      se::oscfun::OscillationFunctional f;
      f.kind = se::oscfun::kind_from_string(functional);
      f.epsilon = eps;
      f.r = r;
      f.breakpoints = bps;
      const double v = se::oscfun::evaluate(f, a);
      if (csv) {
        emit(g, "osc.csv", "functional,value\n" + functional + "," + std::to_string(v) + "\n");
      } else {
        json j{{"functional", functional}, {"length", a.size()}, {"value", v}};
        if (f.kind == se::oscfun::Kind::jump) j["jump_count"] = se::oscfun::jump_count(a, eps);
        emit(g, "osc.json", j.dump());
      }
      return kPass;
    }
    if (*kc) {
      se::kernels::CorrelationDecomposition d;
      json j;
      if (random_model) {
        const auto ind = se::seq::bernoulli_indicators(alpha, N, g.seed);
        d = se::kernels::correlation_decompose(ind, N);
        j["model"] = "random";
        j["alpha"] = alpha;
        j["seed"] = g.seed;
      } else {
        const auto gap = se::kernels::correlation_gap(N, c);
        d = se::kernels::correlation_decompose(N, c);
        j["model"] = "deterministic";
        j["c"] = c;
        j["gap_main"] = gap.gap_main;
        j["gap_small"] = gap.gap_small;
        j["at_zero"] = gap.at_zero;
      }
      j["N"] = N;
      j["D"] = d.D;
      j["rho_sup"] = d.rho_sup;
      j["residual_sup"] = d.residual_sup;
      j["residual_small"] = d.residual_small;
      j["lipschitz_estimate"] = d.lipschitz_estimate;
      if (csv) {
        emit(g, "rho.csv", se::kernels::to_csv(d.rho, true));
      } else {
        emit(g, "kernel-corr.json", j.dump());
      }
      return kPass;
    }
    if (*es) {
      const auto chk = se::expsum::twofreq_check(lp);
      if (csv) {
        emit(g, "expsum.csv", se::expsum::to_csv({lp}, {chk}));
      } else {
        emit(g, "expsum.json",
             json{{"case", lp.which}, {"direct", chk.direct}, {"bound", chk.bound}, {"ratio", chk.ratio()}}.dump());
      }
      return chk.ratio() <= ratio_limit ? kPass : kVerdictFail;
    }
    if (*cz) {
      const auto f = se::czd::Signal::point_masses(parse_masses(masses));
      const auto d = se::czd::cz_split(f, scale, alpha, level);
      if (csv) {
        emit(g, "intervals.csv", se::czd::intervals_csv(d.stopping));
      } else {
        emit(g, "czd.json", se::czd::to_json(d));
      }
      return kPass;
    }
    if (*er) {
      const se::seq::SequenceKind k = se::seq::Deterministic{c};
      const auto times = se::ergosim::census_times(k, H, R);
      if (times.empty()) throw se::ConfigError("H too small: no admissible times");
      const auto s = se::seq::floor_power_sequence(c, times.back());
      se::ergosim::ToySystem sys;
      std::vector<double> f;
      if (system == "rotation") {
        sys = se::ergosim::CyclicRotation{m, 1};
        f = se::ergosim::random_indicator(m, g.seed);
      } else {
        sys = se::ergosim::IntegerShift{H};
        f = se::ergosim::random_indicator(H + s.terms.back() + 1, g.seed);
      }
      if (csv) {
        const auto field = se::ergosim::ergodic_averages(sys, f, s, times);
        emit(g, "traces.csv", se::ergosim::traces_csv(field, trace_states > 0 ? trace_states : 16));
      } else {
        const auto cen = se::ergosim::census_stream(sys, f, s, times, tau);
        auto j = json::parse(se::ergosim::to_json(cen));
        j["system"] = se::ergosim::describe(sys);
        j["H"] = H;
        j["times"] = times.size();
        emit(g, "census.json", j.dump());
      }
      return kPass;
    }
    if (*ft) {
      bool fail = false;
      const auto out = fit_csv_to_json(se::io::read_file(fit_input), claimed, fail);
      emit(g, "fit.json", out);
      return fail ? kVerdictFail : kPass;
    }
    if (*rn) return run_config(g, run_path);
    if (!g.config.empty()) return run_config(g, g.config);
    std::cerr << app.help();
    return kUsage;
  } catch (const se::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const se::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kUsage;
  } catch (const se::io::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
