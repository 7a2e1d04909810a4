#include "sparse_ergodic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/czd.hpp"
#include "sparse_ergodic/ergosim.hpp"
#include "sparse_ergodic/expsum.hpp"
#include "sparse_ergodic/io.hpp"
#include "sparse_ergodic/kernels.hpp"
#include "sparse_ergodic/oscfun.hpp"
#include "sparse_ergodic/seq.hpp"

namespace sparse_ergodic::experiments {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

const std::vector<std::string> kNames = {
    "axioms",     "sawtooth", "counting-function", "correlation-gap", "fourier-pieces", "min-sum", "random-model",
    "cz-corpus",  "weak-type", "ergodic",          "census",          "transfer",       "vdc",
};

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<std::int64_t> dyadic(int lo, int hi, int step = 1) {
  std::vector<std::int64_t> v;
  for (int k = lo; k <= hi; k += step) v.push_back(std::int64_t{1} << k);
  return v;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "experiment", "c",     "alpha", "delta",      "N",     "H",        "K",     "u",         "seed",
      "seeds",      "trials", "tau",  "R",          "epsilon", "level",  "oversample", "modulus", "window_log2",
      "c0",         "out",   "slope_tolerance", "residual_tolerance", "threads"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  }
  ExperimentConfig cfg;
  if (!j.contains("experiment")) throw ConfigError("config needs an 'experiment' name");
  cfg.name = get<std::string>(j, "experiment");
  if (j.contains("c")) cfg.c = get<double>(j, "c");
  if (j.contains("alpha")) cfg.alpha = get<double>(j, "alpha");
  if (j.contains("delta")) cfg.delta = get<double>(j, "delta");
  if (j.contains("N")) {
    cfg.N = get<std::vector<std::int64_t>>(j, "N");
    if (cfg.N->empty()) throw ConfigError("empty N grid");
    for (auto n : *cfg.N) {
      if (!is_pow2(n)) throw ConfigError("N grid must be dyadic, got " + std::to_string(n));
    }
  }
  if (j.contains("H")) {
    cfg.H = get<std::vector<std::int64_t>>(j, "H");
    if (cfg.H->empty()) throw ConfigError("empty H grid");
  }
  if (j.contains("K")) cfg.K = get<std::vector<std::int64_t>>(j, "K");
  if (j.contains("u")) cfg.u = get<std::vector<double>>(j, "u");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("seeds")) cfg.seed_count = get<std::int64_t>(j, "seeds");
  if (j.contains("trials")) cfg.trials = get<std::int64_t>(j, "trials");
  if (j.contains("tau")) cfg.tau = get<double>(j, "tau");
  if (j.contains("R")) cfg.R = get<int>(j, "R");
  if (j.contains("epsilon")) cfg.epsilon = get<double>(j, "epsilon");
  if (j.contains("level")) cfg.level = get<double>(j, "level");
  if (j.contains("oversample")) cfg.oversample = get<int>(j, "oversample");
  if (j.contains("modulus")) cfg.modulus = get<std::int64_t>(j, "modulus");
  if (j.contains("window_log2")) cfg.window_log2 = get<int>(j, "window_log2");
  if (j.contains("c0")) cfg.c0 = get<double>(j, "c0");
  if (j.contains("out")) cfg.out = get<std::string>(j, "out");
  if (j.contains("slope_tolerance")) cfg.slope_tolerance = get<double>(j, "slope_tolerance");
  if (j.contains("residual_tolerance")) cfg.residual_tolerance = get<double>(j, "residual_tolerance");
  if (j.contains("threads")) cfg.threads = get<unsigned>(j, "threads");
  if (cfg.seed_count < 1) throw ConfigError("seeds must be >= 1");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.R < 1) throw ConfigError("R must be >= 1");
  return cfg;
}

ExperimentConfig config_from_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  } catch (const io::IoError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.name;
  j["c"] = cfg.c;
  j["alpha"] = cfg.alpha;
  j["delta"] = cfg.delta;
  j["N"] = cfg.N ? json(*cfg.N) : json(nullptr);
  j["H"] = cfg.H ? json(*cfg.H) : json(nullptr);
  j["K"] = cfg.K ? json(*cfg.K) : json(nullptr);
  j["u"] = cfg.u ? json(*cfg.u) : json(nullptr);
  j["seed"] = cfg.seed;
  j["seeds"] = cfg.seed_count;
  j["trials"] = cfg.trials;
  j["tau"] = cfg.tau;
  j["R"] = cfg.R;
  j["epsilon"] = cfg.epsilon;
  j["level"] = cfg.level;
  j["oversample"] = cfg.oversample;
  j["modulus"] = cfg.modulus;
  j["window_log2"] = cfg.window_log2;
  j["c0"] = cfg.c0;
  j["out"] = cfg.out.string();
  j["slope_tolerance"] = cfg.slope_tolerance.value_or(fit::kSlopeTolerance);
  j["residual_tolerance"] = cfg.residual_tolerance.value_or(fit::kResidualTolerance);
  j["threads"] = cfg.threads;
  return j;
}

const std::vector<std::string>& experiment_names() { return kNames; }

ExperimentConfig resolve(const ExperimentConfig& in) {
  ExperimentConfig cfg = in;
  const auto& n = cfg.name;
  if (std::find(kNames.begin(), kNames.end(), n) == kNames.end()) throw ConfigError("unknown experiment '" + n + "'");
  if (!cfg.N) {
    if (n == "counting-function") cfg.N = dyadic(12, 20, 2);
    else if (n == "correlation-gap") cfg.N = dyadic(12, 22);
    else if (n == "fourier-pieces") cfg.N = dyadic(12, 18);
    else if (n == "min-sum") cfg.N = dyadic(10, 20);
    else if (n == "random-model") cfg.N = dyadic(10, 16);
    else if (n == "weak-type") cfg.N = dyadic(4, 12);
    else if (n == "vdc") cfg.N = dyadic(8, 16);
    else cfg.N = std::vector<std::int64_t>{};
  }
  if (!cfg.H) {
    if (n == "census") cfg.H = dyadic(14, 20);
    else if (n == "transfer") cfg.H = std::vector<std::int64_t>{4096};
    else cfg.H = std::vector<std::int64_t>{};
  }
  if (!cfg.K) cfg.K = n == "weak-type" ? std::vector<std::int64_t>{1, 4, 16, 64} : std::vector<std::int64_t>{};
  if (!cfg.u) cfg.u = n == "min-sum" ? std::vector<double>{0.0, 0.5} : std::vector<double>{};
  if (!cfg.slope_tolerance) cfg.slope_tolerance = fit::kSlopeTolerance;
  if (!cfg.residual_tolerance) cfg.residual_tolerance = fit::kResidualTolerance;
  return cfg;
}

// ---------------------------------------------------------------------------
// Report

Check make_check(std::string name, double value, std::string relation, double limit) {
  Check c{std::move(name), value, limit, relation, false};
  if (relation == "<=") c.pass = value <= limit;
  else if (relation == "<") c.pass = value < limit;
  else if (relation == ">=") c.pass = value >= limit;
  else if (relation == "==") c.pass = value == limit;
  else throw std::logic_error("make_check: unknown relation " + relation);
  return c;
}

bool Report::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  for (const auto& [name, f] : fits) {
    if (f.verdict && !*f.verdict) return false;
  }
  return true;
}

std::string Report::csv() const {
  std::string s = csv_header + "\n";
  for (const auto& r : rows) s += r + "\n";
  return s;
}

const fit::AsymptoticFit& Report::fit(const std::string& name) const {
  for (const auto& [n, f] : fits) {
    if (n == name) return f;
  }
  throw std::out_of_range("report has no fit '" + name + "'");
}

const Check& Report::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("report has no check '" + name + "'");
}

json Report::summary(const ExperimentConfig& resolved) const {
  json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["version"] = version();
  j["experiment"] = experiment;
  j["config"] = to_json(resolved);
  j["csv_columns"] = csv_header;
  j["rows"] = rows.size();
  json fj = json::array();
  for (const auto& [name, f] : fits) {
    json e = json::parse(fit::to_json(f));
    e["name"] = name;
    fj.push_back(e);
  }
  j["fits"] = fj;
  json cj = json::array();
  for (const auto& c : checks) {
    cj.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"limit", c.limit},
                  {"verdict", c.pass ? "pass" : "fail"}});
  }
  j["checks"] = cj;
  j["extra"] = extra;
  j["pass"] = pass();
  return j;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Row {
  std::ostringstream os;
  bool first = true;
  Row() { os.precision(12); }
  template <class T>
  Row& operator<<(const T& v) {
    if (!first) os << ',';
    first = false;
    os << v;
    return *this;
  }
  std::string str() const { return os.str(); }
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> as_double(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

fit::AsymptoticFit fit_with(const ExperimentConfig& cfg, const std::vector<double>& N, const std::vector<double>& y,
                            std::optional<double> claimed) {
  return fit::fit_slope(N, y, claimed, *cfg.slope_tolerance, *cfg.residual_tolerance);
}

template <class T, class Fn>
std::vector<T> sweep(std::size_t n, Fn fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = fn(i);
  });
  return out;
}

double uniform(std::uint64_t seed, std::uint64_t index) { return counter_uniform(seed, streams::experiment, index); }

Report run_axioms(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "entry,trials,violations,worst_ratio,constant";
  const auto rep = oscfun::axiom_suite(oscfun::Family::all, cfg.trials, cfg.seed);
  for (const auto& e : rep.entries) {
    Row row;
    row << e.name << e.trials << e.violations << e.worst_ratio << e.constant;
    r.rows.push_back(row.str());
  }
  r.checks.push_back(make_check("total_violations", static_cast<double>(rep.total_violations()), "==", 0.0));
  return r;
}

Report run_sawtooth(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "n,status,lhs,rhs,precision";
  const std::int64_t n_max = cfg.trials;
  struct Chunk {
    std::int64_t fails = 0, indeterminate = 0, escalated = 0;
    std::vector<std::string> rows;
  };
  const std::size_t chunks = 64;
  auto res = sweep<Chunk>(chunks, [&](std::size_t ci) {
    Chunk ch;
    const std::int64_t lo = 1 + static_cast<std::int64_t>(ci) * n_max / static_cast<std::int64_t>(chunks);
    const std::int64_t hi = (static_cast<std::int64_t>(ci) + 1) * n_max / static_cast<std::int64_t>(chunks);
    for (std::int64_t n = lo; n <= hi; ++n) {
      const auto s = kernels::sawtooth_identity_check(n, cfg.c);
      if (s.precision != Precision::binary64) ++ch.escalated;
      if (s.status == kernels::IdentityStatus::holds) continue;
      if (s.status == kernels::IdentityStatus::fails) ++ch.fails;
      else ++ch.indeterminate;
      Row row;
      row << n << kernels::to_string(s.status) << s.lhs << s.rhs << to_string(s.precision);
      ch.rows.push_back(row.str());
    }
    return ch;
  });
  std::int64_t fails = 0, ind = 0, esc = 0;
  for (auto& ch : res) {
    fails += ch.fails;
    ind += ch.indeterminate;
    esc += ch.escalated;
    for (auto& s : ch.rows) r.rows.push_back(std::move(s));
  }
  r.extra["checked"] = n_max;
  r.extra["escalated"] = esc;
  r.checks.push_back(make_check("failures", static_cast<double>(fails), "==", 0.0));
  r.checks.push_back(make_check("indeterminate", static_cast<double>(ind), "==", 0.0));
  return r;
}

Report run_counting(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "N,support,max_count,argmax,normalized";
  const auto& Ns = *cfg.N;
  const auto hs = sweep<expsum::CountingHistogram>(Ns.size(), [&](std::size_t i) {
    return expsum::counting_function(Ns[i], cfg.c, 1, Ns[i]);
  });
  std::vector<double> norm;
  for (const auto& h : hs) {
    const double v = static_cast<double>(h.max_count) / std::pow(static_cast<double>(h.N), 2.0 / cfg.c - 1.0);
    norm.push_back(v);
    Row row;
    row << h.N << h.support_size << h.max_count << h.argmax << v;
    r.rows.push_back(row.str());
  }
  // oracle comparison at the smallest N that the pair enumeration accepts
  const std::int64_t oracle_N = std::min<std::int64_t>(Ns.front(), 1 << 12);
  const auto fftp = expsum::counting_function(oracle_N, cfg.c, 1, oracle_N);
  const auto pairs = expsum::counting_function_pairs(oracle_N, cfg.c, 1, oracle_N);
  std::int64_t mismatches = 0;
  for (std::size_t i = 0; i < fftp.counts.size(); ++i) mismatches += fftp.counts[i] != pairs.counts[i];
  r.extra["oracle_N"] = oracle_N;
  r.checks.push_back(make_check("oracle_mismatches", static_cast<double>(mismatches), "==", 0.0));
  r.checks.push_back(make_check("normalized_max_spread", fit::spread(norm), "<", 4.0));
  return r;
}

Report run_correlation_gap(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "N,gap_main,gap_small";
  const auto& Ns = *cfg.N;
  const auto gs = sweep<kernels::CorrelationGap>(Ns.size(), [&](std::size_t i) { return kernels::correlation_gap(Ns[i], cfg.c); });
  std::vector<double> main, small;
  for (const auto& g : gs) {
    Row row;
    row << g.N << g.gap_main << g.gap_small;
    r.rows.push_back(row.str());
    main.push_back(g.gap_main);
    small.push_back(g.gap_small * static_cast<double>(g.N));
  }
  r.fits.emplace_back("gap_main", fit_with(cfg, as_double(Ns), main, -1.0));
  r.checks.push_back(make_check("N_gap_small_spread", fit::spread(small), "<", 4.0));
  return r;
}

Report run_fourier_pieces(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "N,H,f1_sup,f2_sup,fs_sup,E_sup,reconstruction_error";
  const auto& Ns = *cfg.N;
  struct P {
    double H, f1, f2, fs, E, err;
  };
  const auto ps = sweep<P>(Ns.size(), [&](std::size_t i) {
    const double H = kernels::default_H(Ns[i], cfg.c, cfg.delta);
    const auto fp = kernels::fourier_pieces(Ns[i], cfg.c, H);
    return P{H,
             kernels::fourier_sup(fp.f1, cfg.oversample).value,
             kernels::fourier_sup(fp.f2, cfg.oversample).value,
             kernels::fourier_sup(fp.fs, cfg.oversample).value,
             kernels::fourier_sup(fp.E, cfg.oversample).value,
             fp.reconstruction_error};
  });
  std::vector<double> f1, f2;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    Row row;
    row << Ns[i] << ps[i].H << ps[i].f1 << ps[i].f2 << ps[i].fs << ps[i].E << ps[i].err;
    r.rows.push_back(row.str());
    f1.push_back(ps[i].f1);
    f2.push_back(ps[i].f2);
  }
  r.fits.emplace_back("f1_sup", fit_with(cfg, as_double(Ns), f1, 1.0 - 1.0 / (2.0 * cfg.c)));
  r.fits.emplace_back("f2_sup", fit_with(cfg, as_double(Ns), f2, 2.0 / cfg.c - 1.0 - cfg.delta));
  return r;
}

Report run_min_sum(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "N,u,H,value,majorant,ratio";
  std::vector<std::pair<std::int64_t, double>> pts;
  for (auto N : *cfg.N) {
    for (double u : *cfg.u) pts.emplace_back(N, u);
  }
  const auto ms = sweep<expsum::MinSum>(pts.size(), [&](std::size_t i) {
    return expsum::min_sum_check(pts[i].first, pts[i].second, cfg.c, cfg.delta);
  });
  std::vector<double> ratios;
  for (const auto& m : ms) {
    Row row;
    row << m.N << m.u << m.H << m.value << m.majorant << m.ratio();
    r.rows.push_back(row.str());
    ratios.push_back(m.ratio());
  }
  r.checks.push_back(make_check("ratio_spread", fit::spread(ratios), "<", 4.0));
  return r;
}

Report run_random_model(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "seed,N,deviation,envelope,ehat_sup,ee_off,cross";
  const auto& Ns = *cfg.N;
  const std::int64_t maxN = *std::max_element(Ns.begin(), Ns.end());
  struct P {
    double dev, env, ehat, ee, cross;
  };
  const auto S = static_cast<std::size_t>(cfg.seed_count);
  const auto per_seed = sweep<std::vector<P>>(S, [&](std::size_t s) {
    const std::uint64_t seed = cfg.seed + s;
    const auto ind = seq::bernoulli_indicators(cfg.alpha, maxN, seed);
    std::vector<P> out;
    for (auto N : Ns) {
      P p{};
      p.dev = std::abs(static_cast<double>(ind.mass(N / 2, N)) - ind.expected_mass(N / 2, N));
      p.env = seq::concentration_envelope(N, cfg.alpha);
      const auto A = kernels::random_average_kernel(ind, N);
      const auto B = kernels::random_main_kernel(cfg.alpha, N);
      const auto E = kernels::subtract(A, B);
      p.ehat = kernels::fourier_sup(E, cfg.oversample).value;
      const auto EE = kernels::correlate(E, E);
      for (std::size_t i = 0; i < EE.values.size(); ++i) {
        if (EE.offset + static_cast<std::int64_t>(i) != 0) p.ee = std::max(p.ee, std::abs(EE.values[i]));
      }
      p.cross = kernels::correlate(B, E).linf() + kernels::correlate(E, B).linf();
      out.push_back(p);
    }
    return out;
  });
  std::int64_t inside = 0, total = 0;
  std::vector<double> ehat_med, ee_med, cross_med, C;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    std::vector<double> eh, ee, cr;
    for (std::size_t s = 0; s < S; ++s) {
      const auto& p = per_seed[s][k];
      Row row;
      row << (cfg.seed + s) << Ns[k] << p.dev << p.env << p.ehat << p.ee << p.cross;
      r.rows.push_back(row.str());
      ++total;
      inside += p.dev <= p.env;
      eh.push_back(p.ehat);
      ee.push_back(p.ee);
      cr.push_back(p.cross);
    }
    const double N = static_cast<double>(Ns[k]);
    ehat_med.push_back(median(eh) / std::sqrt(std::log(N)));
    ee_med.push_back(median(ee));
    cross_med.push_back(median(cr));
    C.push_back(median(cr) / (std::log(N) * std::pow(N, cfg.alpha - 2.0)));
  }
  const auto Nd = as_double(Ns);
  r.checks.push_back(make_check("envelope_fraction", static_cast<double>(inside) / static_cast<double>(total), ">=", 0.99));
  r.fits.emplace_back("ehat_over_sqrtlog", fit_with(cfg, Nd, ehat_med, (cfg.alpha - 1.0) / 2.0));
  r.fits.emplace_back("ee_off_zero", fit_with(cfg, Nd, ee_med, -1.0));
  r.fits.emplace_back("cross", fit_with(cfg, Nd, cross_med, cfg.alpha - 2.0));
  r.fits.emplace_back("cross_constant", fit_with(cfg, Nd, C, std::nullopt));
  r.checks.push_back(make_check("cross_constant_spread", fit::spread(C), "<", 4.0));
  r.extra["cross_constant"] = C;
  return r;
}

Report run_cz_corpus(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "case,n,length,l1,intervals,reconstruction_error,atom_mean,atom_ratio,E_size,E_bound,good_sup,set_ratio";
  const double level = cfg.level;
  struct P {
    std::string row;
    bool recon, mean, atom, E, good, set;
  };
  const auto ps = sweep<P>(static_cast<std::size_t>(cfg.trials), [&](std::size_t ci) {
    std::uint64_t draw = ci * 1024;
    auto U = [&] { return uniform(cfg.seed, draw++); };
    const auto len = static_cast<std::int64_t>(8 + std::floor(U() * 121));
    czd::Signal f;
    f.offset = static_cast<std::int64_t>(std::floor(U() * 200)) - 100;
    f.values.resize(static_cast<std::size_t>(len));
    for (auto& v : f.values) {
      const double t = U();
      if (t < 0.6) v = 0.0;
      else if (t < 0.95) v = (U() < 0.5 ? -1.0 : 1.0) * U();
      else v = (U() < 0.5 ? -1.0 : 1.0) * std::exp2(U() * 8.0);  // spikes
    }
    const int n = static_cast<int>(std::floor(U() * 13));
    const auto seqs = seq::floor_power_sequence(cfg.c, static_cast<std::int64_t>(std::pow(std::exp2(n), 1.0 / cfg.c)) + 1);
    std::vector<std::int64_t> support;
    for (auto t : seqs.terms) {
      if (t <= (std::int64_t{1} << n)) support.push_back(t);
    }
    const auto d = czd::cz_split(f, n, cfg.alpha, level, support);
    const double scale = std::max(1.0, f.linf());
    double worst_set = 0.0;
    for (int w = 0; w < 4; ++w) {
      const int m = static_cast<int>(std::floor(U() * 7));
      const std::int64_t jl = (std::int64_t{1} << m) + static_cast<std::int64_t>(std::floor(U() * 64));
      const std::int64_t jlo = d.offset + static_cast<std::int64_t>(std::floor(U() * static_cast<double>(d.width + 1))) - jl / 2;
      worst_set = std::max(worst_set, czd::set_estimate_ratio(d, m, jlo, jl));
    }
    P p;
    p.recon = d.reconstruction_error <= 1e-12 * scale;
    double max_l1 = 1.0;
    for (const auto& a : d.atoms) max_l1 = std::max(max_l1, a.l1);
    p.mean = d.max_atom_mean <= 1e-12 * max_l1;
    p.atom = d.max_atom_ratio <= 8.0 * level;
    p.E = static_cast<double>(d.E_size) <= d.E_bound;
    p.good = d.good_sup <= 4.0 * level;
    p.set = worst_set <= czd::set_estimate_constant(level);
    Row row;
    row << ci << n << len << f.l1() << d.stopping.intervals.size() << d.reconstruction_error << d.max_atom_mean
        << d.max_atom_ratio << d.E_size << d.E_bound << d.good_sup << worst_set;
    p.row = row.str();
    return p;
  });
  std::int64_t bad[6] = {};
  for (const auto& p : ps) {
    r.rows.push_back(p.row);
    bad[0] += !p.recon;
    bad[1] += !p.mean;
    bad[2] += !p.atom;
    bad[3] += !p.E;
    bad[4] += !p.good;
    bad[5] += !p.set;
  }
  r.checks.push_back(make_check("reconstruction_failures", static_cast<double>(bad[0]), "==", 0.0));
  r.checks.push_back(make_check("mean_zero_failures", static_cast<double>(bad[1]), "==", 0.0));
  r.checks.push_back(make_check("atom_l1_failures", static_cast<double>(bad[2]), "==", 0.0));
  r.checks.push_back(make_check("E_size_failures", static_cast<double>(bad[3]), "==", 0.0));
  r.checks.push_back(make_check("good_sup_failures", static_cast<double>(bad[4]), "==", 0.0));
  r.checks.push_back(make_check("set_estimate_failures", static_cast<double>(bad[5]), "==", 0.0));
  return r;
}

Report run_weak_type(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "K,ratio,argmax,max_value";
  std::vector<kernels::Kernel> family;
  for (auto N : *cfg.N) family.push_back(kernels::power_average_kernel(N, cfg.c));
  const std::int64_t W = std::int64_t{1} << cfg.window_log2;
  const double weight = 1024.0;
  const auto fun = oscfun::OscillationFunctional::jump(cfg.epsilon);
  std::vector<double> ratios;
  for (auto K : *cfg.K) {
    if (K < 1) throw ConfigError("K must be >= 1");
    std::vector<std::pair<std::int64_t, double>> masses;
    const std::int64_t gap = W / K;
    for (std::int64_t k = 0; k < K; ++k) {
      const auto jitter = static_cast<std::int64_t>(std::floor(uniform(cfg.seed, static_cast<std::uint64_t>(K * 4096 + k)) * static_cast<double>(gap / 2)));
      masses.emplace_back(k * gap + jitter, weight);
    }
    const auto w = czd::weak_type_ratio(family, fun, czd::Signal::point_masses(masses));
    Row row;
    row << K << w.ratio << w.argmax << w.max_value;
    r.rows.push_back(row.str());
    ratios.push_back(w.ratio);
  }
  r.checks.push_back(make_check("ratio_spread", fit::spread(ratios), "<", 4.0));
  return r;
}

Report run_ergodic(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "state,average,deviation";
  const std::int64_t m = cfg.modulus;
  const std::int64_t N = cfg.trials;
  std::vector<double> f(static_cast<std::size_t>(m));
  for (std::int64_t x = 0; x < m; ++x) f[static_cast<std::size_t>(x)] = 2 * x < m ? 1.0 : 0.0;
  const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(m);
  const auto s = seq::floor_power_sequence(cfg.c, N);
  const ergosim::ToySystem sys = ergosim::CyclicRotation{m, 1};
  const std::vector<std::int64_t> t{N};
  const auto field = ergosim::ergodic_averages(sys, f, s, t);
  std::int64_t inside = 0;
  for (std::int64_t x = 0; x < m; ++x) {
    const double v = field.at(x, 0);
    inside += std::abs(v - mean) <= 0.02;
    Row row;
    row << x << v << v - mean;
    r.rows.push_back(row.str());
  }
  const auto grid = seq::lacunary_grid(cfg.R, std::min<std::int64_t>(N, 100000)).times;
  const double lip = ergosim::lipschitz_check(sys, f, s, std::vector<std::int64_t>(grid.begin(), grid.end() - 1), cfg.R);
  r.extra["mean"] = mean;
  r.checks.push_back(make_check("fraction_within_0.02", static_cast<double>(inside) / static_cast<double>(m), ">=", 0.99));
  r.checks.push_back(make_check("lipschitz_change_times_R", lip, "<=", 10.0));
  return r;
}

Report run_census(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "H,times,max_time,K";
  const auto& Hs = *cfg.H;
  const seq::SequenceKind kind = seq::Deterministic{cfg.c};
  std::vector<double> Ks;
  for (auto H : Hs) {
    const auto times = ergosim::census_times(kind, H, cfg.R);
    if (times.empty()) throw ConfigError("census: H too small for any time");
    const auto s = seq::floor_power_sequence(cfg.c, times.back());
    const auto f = ergosim::random_indicator(H + s.terms.back() + 1, cfg.seed + static_cast<std::uint64_t>(H));
    const auto c = ergosim::census_stream(ergosim::IntegerShift{H}, f, s, times, cfg.tau);
    Row row;
    row << H << times.size() << times.back() << c.K;
    r.rows.push_back(row.str());
    Ks.push_back(static_cast<double>(c.K));
  }
  const double rho = Hs.size() >= 2 ? fit::spearman(as_double(Hs), Ks) : 0.0;
  r.extra["spearman"] = rho;
  r.checks.push_back(make_check("abs_spearman", std::abs(rho), "<", 0.5));
  return r;
}

Report run_transfer(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "instance,H,lhs,z_census,rhs,ratio";
  const std::int64_t m = cfg.modulus;
  const auto instances = static_cast<std::size_t>(std::min<std::int64_t>(cfg.trials, 1000));
  const auto H = cfg.H->front();
  const auto times = ergosim::census_times(seq::Deterministic{cfg.c}, H, cfg.R);
  if (times.empty()) throw ConfigError("transfer: H too small for any time");
  const auto s = seq::floor_power_sequence(cfg.c, times.back());
  const auto res = sweep<ergosim::TransferComparison>(instances, [&](std::size_t i) {
    const auto f = ergosim::random_indicator(m, cfg.seed * 1000003 + i);
    return ergosim::transfer_compare(ergosim::CyclicRotation{m, 1}, f, s, cfg.tau, H, cfg.c0, cfg.R);
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& t = res[i];
    Row row;
    row << i << H << t.lhs << t.z_census << t.rhs << t.ratio;
    r.rows.push_back(row.str());
    worst = std::max(worst, t.ratio);
  }
  r.checks.push_back(make_check("max_ratio", worst, "<=", 10.0));
  return r;
}

Report run_vdc(const ExperimentConfig& cfg) {
  Report r;
  r.csv_header = "family,instance,N,c,direct,bound,ratio";
  const auto& Ns = *cfg.N;
  const auto per = static_cast<std::size_t>(cfg.trials);
  const char* names[4] = {"second_derivative", "case1", "case2", "case3"};
  struct P {
    std::int64_t N;
    double c, direct, bound;
  };
  double worst[4] = {};
  for (int fam = 0; fam < 4; ++fam) {
    const auto ps = sweep<P>(per, [&](std::size_t i) {
      std::uint64_t draw = (static_cast<std::uint64_t>(fam) << 40) + i * 64;
      auto U = [&] { return uniform(cfg.seed, draw++); };
      auto logu = [&](double lo, double hi) { return lo * std::pow(hi / lo, U()); };
      const std::int64_t N = Ns[static_cast<std::size_t>(std::floor(U() * static_cast<double>(Ns.size())))];
      const double Nd = static_cast<double>(N);
      const double c = 1.0 + U() / 6.0 * 0.999 + 1e-4;
      if (fam == 0) {
        expsum::PhaseSum ps;
        ps.lo = N / 2 + 1;
        ps.hi = N;
        ps.N = N;
        ps.theta = U();
        const double e = 1.0 / c;
        const double h = (U() < 0.5 ? -1.0 : 1.0) * logu(1.0, Nd);
        ps.terms = {{h, 0.0, e}};
        auto d2 = [&](double k) { return std::abs(h * e * (e - 1.0) * std::pow(k, e - 2.0)); };
        const double lam = d2(static_cast<double>(ps.hi));
        const double v = d2(static_cast<double>(ps.lo)) / lam;
        const auto res = expsum::vdc_certify(lam, v, ps);
        return P{N, c, res.direct, res.bound};
      }
      expsum::TwoFreqParams p;
      p.which = fam;
      p.N = N;
      p.c = c;
      p.theta = U();
      p.t = N / 2 + 1 + static_cast<std::int64_t>(std::floor(U() * static_cast<double>(N - N / 2)));
      const double sgn1 = U() < 0.5 ? -1.0 : 1.0;
      const double sgn2 = U() < 0.5 ? -1.0 : 1.0;
      if (fam == 1) {
        p.h = sgn1 * std::round(logu(1.0, Nd));
        p.u = U();
      } else if (fam == 2) {
        p.u1 = U();
        p.u2 = U();
        p.x = std::round(logu(1.0, Nd));
        const double a2 = std::round(logu(1.0, Nd));
        p.h2 = sgn2 * a2;
        p.h1 = sgn1 * std::round(logu(a2, Nd));
        p.N0 = logu(2.0, Nd);
      } else {
        p.u1 = U();
        p.u2 = U();
        const double Hlo = std::pow(Nd, 2.0 - 2.0 / c);
        p.H = logu(std::max(Hlo * 1.0001, 2.0), Nd);
        if (p.H <= Hlo) p.H = Nd;
        const double xmax = std::max(1.0, std::min(Nd, Nd * (p.H / 2.0 - 1.0) / 100.0));
        p.x = std::floor(logu(1.0, xmax));
        const double grow = 1.0 + 100.0 * p.x / Nd;
        const double a2 = std::max(1.0, std::floor(logu(1.0, std::max(1.0, std::floor(p.H) / grow))));
        p.h2 = sgn2 * a2;
        const double lo1 = std::ceil(grow * a2);
        p.h1 = sgn1 * std::min(std::floor(p.H), std::round(logu(lo1, std::max(lo1, p.H))));
      }
      const auto chk = expsum::twofreq_check(p);
      return P{N, c, chk.direct, chk.bound};
    });
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double ratio = ps[i].direct / ps[i].bound;
      worst[fam] = std::max(worst[fam], ratio);
      Row row;
      row << names[fam] << i << ps[i].N << ps[i].c << ps[i].direct << ps[i].bound << ratio;
      r.rows.push_back(row.str());
    }
    r.checks.push_back(make_check(std::string("max_ratio_") + names[fam], worst[fam], "<=", 10.0));
  }
  return r;
}

}  // namespace

Report compute(const ExperimentConfig& in) {
  const ExperimentConfig cfg = resolve(in);
  if (cfg.threads > 0) set_worker_threads(cfg.threads);
  Report r;
  const auto& n = cfg.name;
  if (n == "axioms") r = run_axioms(cfg);
  else if (n == "sawtooth") r = run_sawtooth(cfg);
  else if (n == "counting-function") r = run_counting(cfg);
  else if (n == "correlation-gap") r = run_correlation_gap(cfg);
  else if (n == "fourier-pieces") r = run_fourier_pieces(cfg);
  else if (n == "min-sum") r = run_min_sum(cfg);
  else if (n == "random-model") r = run_random_model(cfg);
  else if (n == "cz-corpus") r = run_cz_corpus(cfg);
  else if (n == "weak-type") r = run_weak_type(cfg);
  else if (n == "ergodic") r = run_ergodic(cfg);
  else if (n == "census") r = run_census(cfg);
  else if (n == "transfer") r = run_transfer(cfg);
  else r = run_vdc(cfg);
  r.experiment = n;
  return r;
}

Written run_experiment(const ExperimentConfig& cfg) {
  const ExperimentConfig resolved = resolve(cfg);
  Written w;
  w.report = compute(resolved);
  w.csv = resolved.out / (resolved.name + ".csv");
  w.json = resolved.out / (resolved.name + ".json");
  io::write_file(w.csv, w.report.csv());
  io::write_file(w.json, w.report.summary(resolved).dump(2) + "\n");
  return w;
}

}  // namespace sparse_ergodic::experiments
