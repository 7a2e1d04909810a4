#include "sparse_ergodic/oscfun.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"

namespace sparse_ergodic::oscfun {

namespace {

template <class T>
double gap(const T& x, const T& y) {
  return std::abs(x - y);
}

void check_length(std::size_t k, bool force, const char* who) {
  if (k > kMaxDpLength && !force) {
    throw DomainError(std::string(who) + ": series longer than " + std::to_string(kMaxDpLength) +
                      " needs force=true (quadratic DP)");
  }
}

template <class T>
std::int64_t jump_count_impl(std::span<const T> a, double epsilon, bool force) {
  if (!(epsilon > 0.0)) throw DomainError("jump_count: epsilon must be > 0");
  check_length(a.size(), force, "jump_count");
  std::vector<std::int64_t> dp(a.size(), 0);
  std::int64_t best = 0;
  for (std::size_t j = 1; j < a.size(); ++j) {
    std::int64_t v = 0;
    for (std::size_t i = 0; i < j; ++i) {
      if (dp[i] + 1 > v && gap(a[j], a[i]) > epsilon) v = dp[i] + 1;
    }
    dp[j] = v;
    best = std::max(best, v);
  }
  return best;
}

template <class T>
std::int64_t jump_greedy_impl(std::span<const T> a, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("jump_count_greedy: epsilon must be > 0");
  if (a.empty()) return 0;
  std::int64_t count = 0;
  T anchor = a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    if (gap(a[k], anchor) > epsilon) {
      ++count;
      anchor = a[k];
    }
  }
  return count;
}

template <class T>
double diameter_impl(std::span<const T> a) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) d = std::max(d, gap(a[j], a[i]));
  }
  return d;
}

template <>
double diameter_impl<double>(std::span<const double> a) {
  if (a.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  return *hi - *lo;
}

template <class T>
double variation_impl(std::span<const T> a, double r, bool force) {
  if (!(r >= 1.0)) throw DomainError("variation: r must be >= 1");
  if (std::isinf(r)) return diameter_impl(a);
  check_length(a.size(), force, "variation");
  std::vector<double> dp(a.size(), 0.0);
  double best = 0.0;
  for (std::size_t j = 1; j < a.size(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double d = gap(a[j], a[i]);
      v = std::max(v, dp[i] + (r == 1.0 ? d : r == 2.0 ? d * d : std::pow(d, r)));
    }
    dp[j] = v;
    best = std::max(best, v);
  }
  return r == 1.0 ? best : std::pow(best, 1.0 / r);
}

template <class T>
double oscillation_impl(std::span<const T> a, std::span<const std::size_t> bps) {
  if (bps.size() < 2) throw DomainError("oscillation: need at least two breakpoints");
  for (std::size_t j = 0; j < bps.size(); ++j) {
    if (bps[j] >= a.size()) throw DomainError("oscillation: breakpoint out of range");
    if (j > 0 && bps[j] <= bps[j - 1]) {
      throw DomainError("oscillation: breakpoints must be strictly increasing");
    }
  }
  CompensatedSum<double> acc;
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    double m = 0.0;
    for (std::size_t k = bps[j]; k <= bps[j + 1]; ++k) m = std::max(m, gap(a[k], a[bps[j]]));
    acc.add(m * m);
  }
  return std::sqrt(acc.value());
}

template <class T>
double evaluate_impl(const OscillationFunctional& f, std::span<const T> a) {
  f.validate();
  switch (f.kind) {
    case Kind::jump:
      return f.epsilon * std::sqrt(static_cast<double>(jump_count_impl(a, f.epsilon, false)));
    case Kind::variation:
      return variation_impl(a, f.r, false);
    case Kind::oscillation:
      return oscillation_impl(a, std::span<const std::size_t>(f.breakpoints));
    case Kind::diameter:
      return diameter_impl(a);
  }
  return 0.0;
}

}  // namespace

std::int64_t jump_count(std::span<const double> a, double epsilon, bool force) {
  return jump_count_impl(a, epsilon, force);
}
std::int64_t jump_count(std::span<const Complex> a, double epsilon, bool force) {
  return jump_count_impl(a, epsilon, force);
}
std::int64_t jump_count_greedy(std::span<const double> a, double epsilon) {
  return jump_greedy_impl(a, epsilon);
}
std::int64_t jump_count_greedy(std::span<const Complex> a, double epsilon) {
  return jump_greedy_impl(a, epsilon);
}
double variation(std::span<const double> a, double r, bool force) {
  return variation_impl(a, r, force);
}
double variation(std::span<const Complex> a, double r, bool force) {
  return variation_impl(a, r, force);
}
double diameter(std::span<const double> a) { return diameter_impl(a); }
double diameter(std::span<const Complex> a) { return diameter_impl(a); }
double oscillation(std::span<const double> a, std::span<const std::size_t> bps) {
  return oscillation_impl(a, bps);
}
double oscillation(std::span<const Complex> a, std::span<const std::size_t> bps) {
  return oscillation_impl(a, bps);
}

const char* to_string(Kind k) {
  switch (k) {
    case Kind::jump:
      return "jump";
    case Kind::variation:
      return "variation";
    case Kind::oscillation:
      return "oscillation";
    case Kind::diameter:
      return "diameter";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "jump") return Kind::jump;
  if (s == "variation") return Kind::variation;
  if (s == "oscillation") return Kind::oscillation;
  if (s == "diameter") return Kind::diameter;
  throw ConfigError("unknown functional kind '" + s + "'");
}

OscillationFunctional OscillationFunctional::jump(double eps) {
  OscillationFunctional f;
  f.kind = Kind::jump;
  f.epsilon = eps;
  return f;
}
OscillationFunctional OscillationFunctional::var(double r) {
  OscillationFunctional f;
  f.kind = Kind::variation;
  f.r = r;
  return f;
}
OscillationFunctional OscillationFunctional::osc(std::vector<std::size_t> bps) {
  OscillationFunctional f;
  f.kind = Kind::oscillation;
  f.breakpoints = std::move(bps);
  return f;
}
OscillationFunctional OscillationFunctional::diam() {
  OscillationFunctional f;
  f.kind = Kind::diameter;
  return f;
}

void OscillationFunctional::validate() const {
  if (kind == Kind::jump && !(epsilon > 0.0)) throw DomainError("jump functional: epsilon must be > 0");
  if (kind == Kind::variation && !(r >= 1.0)) throw DomainError("variation functional: r must be >= 1");
  if (kind == Kind::oscillation) {
    for (std::size_t j = 1; j < breakpoints.size(); ++j) {
      if (breakpoints[j] <= breakpoints[j - 1]) {
        throw DomainError("oscillation functional: breakpoints must be strictly increasing");
      }
    }
  }
}

double evaluate(const OscillationFunctional& f, std::span<const double> a) { return evaluate_impl(f, a); }
double evaluate(const OscillationFunctional& f, std::span<const Complex> a) { return evaluate_impl(f, a); }

std::int64_t AxiomReport::total_violations() const {
  std::int64_t v = 0;
  for (const auto& e : entries) v += e.violations;
  return v;
}

// ---------------------------------------------------------------------------
// Axiom suite

namespace {

constexpr double kSlack = 1e-12;

class Draw {
 public:
  Draw(std::uint64_t seed, std::uint64_t trial) : seed_(seed), base_(trial << 20) {}
  double uniform() { return counter_uniform(seed_, streams::axiom_suite, base_ + next_++); }
  std::size_t below(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
  std::uint64_t next_ = 0;
};

std::vector<double> random_series(Draw& d, std::size_t len) {
  std::vector<double> a(len);
  const double scale = std::exp2(std::floor(d.uniform() * 8.0) - 4.0);
  switch (d.below(4)) {
    case 0:  // iid
      for (auto& v : a) v = scale * d.symmetric();
      break;
    case 1: {  // random walk
      double s = 0.0;
      for (auto& v : a) v = (s += scale * d.symmetric());
      break;
    }
    case 2:  // small integers, forces ties at epsilon
      for (auto& v : a) v = static_cast<double>(d.below(4));
      break;
    default: {  // damped oscillation
      for (std::size_t k = 0; k < len; ++k) {
        a[k] = scale * (d.symmetric() / static_cast<double>(k + 1) + (k % 2 ? 1.0 : -1.0) * d.uniform());
      }
      break;
    }
  }
  return a;
}

std::vector<std::size_t> random_breakpoints(Draw& d, std::size_t len) {
  const std::size_t count = 2 + d.below(std::max<std::size_t>(1, std::min<std::size_t>(len - 1, 8)));
  std::vector<std::size_t> idx(len);
  for (std::size_t i = 0; i < len; ++i) idx[i] = i;
  for (std::size_t i = 0; i < std::min(count, len); ++i) std::swap(idx[i], idx[i + d.below(len - i)]);
  idx.resize(std::min(count, len));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double pick_epsilon(Draw& d, std::span<const double> a) {
  const double diam = diameter(a);
  if (diam == 0.0) return 0.5;
  if (d.below(4) == 0) {  // exactly one of the pairwise gaps
    const std::size_t i = d.below(a.size());
    const std::size_t j = d.below(a.size());
    const double g = std::abs(a[i] - a[j]);
    if (g > 0.0) return g;
  }
  return diam * (0.01 + 1.2 * d.uniform());
}

struct Tracker {
  AxiomEntry e;
  Tracker(std::string name, double constant) {
    e.name = std::move(name);
    e.constant = constant;
  }
  void record(double lhs, double rhs) {
    ++e.trials;
    const double bound = e.constant * rhs;
    double ratio = 0.0;
    if (lhs > 0.0) ratio = bound > 0.0 ? lhs / bound : kInfinity;
    e.worst_ratio = std::max(e.worst_ratio, ratio);
    if (lhs > bound * (1.0 + kSlack)) ++e.violations;
  }
  void record_equal(double lhs, double rhs, double rel) {
    ++e.trials;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    const double err = std::abs(lhs - rhs);
    const double ratio = scale > 0.0 ? err / scale : 0.0;
    e.worst_ratio = std::max(e.worst_ratio, ratio);
    if (err > rel * scale) ++e.violations;
  }
};

double l2norm(std::span<const double> a) {
  CompensatedSum<double> s;
  for (double v : a) s.add(v * v);
  return std::sqrt(s.value());
}

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

double jump_value(std::span<const double> a, double eps) {
  return eps * std::sqrt(static_cast<double>(jump_count(a, eps)));
}

}  // namespace

AxiomReport axiom_suite(Family family, std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("axiom_suite: trials must be >= 1");
  const bool jump = family == Family::all || family == Family::jump;
  const bool var = family == Family::all || family == Family::variation;
  const bool osc = family == Family::all || family == Family::oscillation;

  Tracker jv2("jump_le_variation_r2", 1.0);
  Tracker jv3("jump_le_variation_r3", 1.0);
  Tracker ov("oscillation_le_J_power_variation", 1.0);
  Tracker l2v("l2_bound_variation_r_ge_2", 2.0);
  Tracker l2j("l2_bound_jump", 2.0);
  Tracker l2o("l2_bound_oscillation", 2.0);
  Tracker trL("triangle_jump_altitude_eps_over_L", 2.0);
  Tracker trW("triangle_jump_weighted_altitudes", 10.0);
  Tracker hj("homogeneity_jump", 1.0);
  Tracker hv("homogeneity_variation", 1.0);
  Tracker ho("homogeneity_oscillation", 1.0);
  Tracker sv("subadditivity_variation", 1.0);
  Tracker so("subadditivity_oscillation", 1.0);

  const double rs[] = {1.0, 1.5, 2.0, 3.0, 4.0, kInfinity};
  for (std::int64_t t = 0; t < trials; ++t) {
    Draw d(seed, static_cast<std::uint64_t>(t));
    const std::size_t len = 2 + d.below(31);
    const auto a = random_series(d, len);
    const auto b = random_series(d, len);
    const double eps = pick_epsilon(d, a);
    const auto bps = random_breakpoints(d, len);
    const double r_any = rs[d.below(6)];
    const double r_big = 2.0 + 4.0 * d.uniform();
    const double lam = (d.below(2) ? 1.0 : -1.0) * std::exp2(static_cast<double>(d.below(17)) - 8.0);

    if (jump && var) {
      const double n = static_cast<double>(jump_count(a, eps));
      jv2.record(eps * std::sqrt(n), variation(a, 2.0));
      jv3.record(eps * std::cbrt(n), variation(a, 3.0));
    }
    if (osc && var) {
      const double J = static_cast<double>(bps.size() - 1);
      const double expo = std::max(0.5 - 1.0 / r_any, 0.0);
      ov.record(oscillation(a, bps), std::pow(J, expo) * variation(a, r_any));
    }
    const double l2 = l2norm(a);
    if (var) l2v.record(variation(a, r_big), l2);
    if (jump) l2j.record(jump_value(a, eps), l2);
    if (osc) l2o.record(oscillation(a, bps), l2);

    if (jump) {
      const std::size_t L = 2 + d.below(4);
      std::vector<std::vector<double>> parts;
      std::vector<double> sum(len, 0.0);
      for (std::size_t l = 0; l < L; ++l) {
        parts.push_back(random_series(d, len));
        for (std::size_t k = 0; k < len; ++k) sum[k] += parts.back()[k];
      }
      const double e = pick_epsilon(d, sum);
      const double lhs = jump_value(sum, e);
      double first = 0.0;
      double second = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double Ld = static_cast<double>(L);
        first += Ld * jump_value(parts[l], e / Ld);
        const double w = static_cast<double>((l + 1) * (l + 1));
        second += w * jump_value(parts[l], e / (10.0 * w));
      }
      trL.record(lhs, first);
      trW.record(lhs, second);

      std::vector<double> la(len);
      for (std::size_t k = 0; k < len; ++k) la[k] = lam * a[k];
      const double al = std::abs(lam);
      hj.record_equal(static_cast<double>(jump_count(la, eps)),
                      static_cast<double>(jump_count(a, eps / al)), 0.0);
      if (var) hv.record_equal(variation(la, r_any), al * variation(a, r_any), kSlack);
      if (osc) ho.record_equal(oscillation(la, bps), al * oscillation(a, bps), kSlack);
    } else {
      std::vector<double> la(len);
      for (std::size_t k = 0; k < len; ++k) la[k] = lam * a[k];
      const double al = std::abs(lam);
      if (var) hv.record_equal(variation(la, r_any), al * variation(a, r_any), kSlack);
      if (osc) ho.record_equal(oscillation(la, bps), al * oscillation(a, bps), kSlack);
    }
    const auto ab = add(a, b);
    if (var) sv.record(variation(ab, r_any), variation(a, r_any) + variation(b, r_any));
    if (osc) so.record(oscillation(ab, bps), oscillation(a, bps) + oscillation(b, bps));
  }

  AxiomReport rep;
  for (Tracker* tr : {&jv2, &jv3, &ov, &l2v, &l2j, &l2o, &trL, &trW, &hj, &hv, &ho, &sv, &so}) {
    if (tr->e.trials > 0) rep.entries.push_back(tr->e);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// I/O

std::vector<double> series_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_array() || j.empty()) throw ConfigError("series: expected a nonempty JSON array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("series: array entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string series_to_json(std::span<const double> a) {
  return nlohmann::json(std::vector<double>(a.begin(), a.end())).dump();
}

std::vector<double> series_from_binary(const std::string& bytes) {
  if (bytes.empty() || bytes.size() % 8 != 0) {
    throw ConfigError("series: binary block size must be a positive multiple of 8");
  }
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 7; b >= 0; --b) u = (u << 8) | static_cast<unsigned char>(bytes[i * 8 + b]);
    out[i] = std::bit_cast<double>(u);
  }
  return out;
}

std::string series_to_binary(std::span<const double> a) {
  std::string out(a.size() * 8, '\0');
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(a[i]);
    for (int b = 0; b < 8; ++b) {
      out[i * 8 + b] = static_cast<char>(u & 0xff);
      u >>= 8;
    }
  }
  return out;
}

}  // namespace sparse_ergodic::oscfun
