#include "sparse_ergodic/czd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/fft.hpp"
#include "sparse_ergodic/fit.hpp"

namespace sparse_ergodic::czd {

double Signal::at(std::int64_t x) const {
  if (x < offset || x >= end()) return 0.0;
  return values[static_cast<std::size_t>(x - offset)];
}

double Signal::l1() const {
  CompensatedSum<double> s;
  for (double v : values) s.add(std::abs(v));
  return s.value();
}

double Signal::linf() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Signal Signal::point_masses(const std::vector<std::pair<std::int64_t, double>>& masses) {
  Signal s;
  if (masses.empty()) return s;
  std::int64_t lo = masses.front().first;
  std::int64_t hi = lo;
  for (const auto& [x, w] : masses) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  s.offset = lo;
  s.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [x, w] : masses) s.values[static_cast<std::size_t>(x - lo)] += w;
  return s;
}

DyadicInterval DyadicInterval::parent() const {
  // floor division keeps the lattice anchored at 0 for negative indices
  const std::int64_t k = index >= 0 ? index / 2 : -((-index + 1) / 2);
  return {scale + 1, k};
}

// ---------------------------------------------------------------------------
// Maximal function

namespace {

struct Prefix {
  std::int64_t offset = 0;
  std::vector<double> p;  // p[i] = sum_{j<i} |f|
  explicit Prefix(const Signal& f) : offset(f.offset), p(f.values.size() + 1, 0.0) {
    for (std::size_t i = 0; i < f.values.size(); ++i) p[i + 1] = p[i] + std::abs(f.values[i]);
  }
  // sum of |f| over [a, b]
  double mass(std::int64_t a, std::int64_t b) const {
    const auto n = static_cast<std::int64_t>(p.size()) - 1;
    const std::int64_t lo = std::clamp<std::int64_t>(a - offset, 0, n);
    const std::int64_t hi = std::clamp<std::int64_t>(b - offset + 1, 0, n);
    return hi > lo ? p[static_cast<std::size_t>(hi)] - p[static_cast<std::size_t>(lo)] : 0.0;
  }
};

std::vector<std::int64_t> support_of(const Signal& f) {
  std::vector<std::int64_t> s;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] != 0.0) s.push_back(f.offset + static_cast<std::int64_t>(i));
  }
  return s;
}

// floor(a / 2^s) * 2^s == a
bool aligned(std::int64_t a, int s) {
  const std::int64_t len = std::int64_t{1} << s;
  return ((a % len) + len) % len == 0;
}

}  // namespace

std::vector<double> hl_maximal(const Signal& f, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw DomainError("hl_maximal: empty window");
  std::vector<double> out(static_cast<std::size_t>(hi - lo), 0.0);
  const auto supp = support_of(f);
  if (supp.empty()) return out;
  const Prefix pre(f);
  for (std::int64_t x = lo; x < hi; ++x) {
    // The average can only increase when the window reaches a new support point.
    double best = 0.0;
    for (std::int64_t p : supp) {
      const std::int64_t r = p > x ? p - x : x - p;
      best = std::max(best, pre.mass(x - r, x + r) / static_cast<double>(2 * r + 1));
    }
    out[static_cast<std::size_t>(x - lo)] = best;
  }
  return out;
}

std::pair<std::int64_t, std::int64_t> level_window(const Signal& f, double level) {
  if (!(level > 0.0)) throw DomainError("level_window: level must be > 0");
  const auto supp = support_of(f);
  if (supp.empty()) return {f.offset, f.offset};
  const double R = std::ceil(f.l1() / level / 2.0) + 1.0;
  if (R > 1e9) throw DomainError("level_window: ||f||_1 / level too large");
  const auto r = static_cast<std::int64_t>(R);
  return {supp.front() - r, supp.back() + r + 1};
}

StoppingIntervals cz_stopping(const Signal& f, double level) {
  if (!(level > 0.0)) throw DomainError("cz_stopping: level must be > 0");
  StoppingIntervals out;
  out.level = level;
  const auto [lo, hi] = level_window(f, level);
  if (hi <= lo) return out;
  const auto M = hl_maximal(f, lo, hi);
  const Prefix pre(f);
  std::int64_t x = lo;
  while (x < hi) {
    if (M[static_cast<std::size_t>(x - lo)] < level) {
      ++x;
      continue;
    }
    std::int64_t b = x;
    while (b < hi && M[static_cast<std::size_t>(b - lo)] >= level) ++b;
    out.covered += b - x;
    // Greedy aligned blocks give the maximal dyadic intervals inside [x, b).
    std::int64_t a = x;
    while (a < b) {
      int s = 0;
      while (s < 62 && aligned(a, s + 1) && a + (std::int64_t{2} << s) <= b) ++s;
      const std::int64_t len = std::int64_t{1} << s;
      const std::int64_t k = a / len;  // exact, a is aligned
      out.intervals.push_back({s, k});
      out.masses.push_back(pre.mass(a, a + len - 1));
      a += len;
    }
    x = b;
  }
  if (!out.intervals.empty()) {
    out.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.intervals.size(); ++i) {
      const double r = out.masses[i] / static_cast<double>(out.intervals[i].length());
      out.min_ratio = std::min(out.min_ratio, r);
      out.max_ratio = std::max(out.max_ratio, r);
    }
  }
  // The parent of Q holds a point with M_HL f < level, whose ball of radius
  // 2|Q| - 1 contains Q.
  if (out.max_ratio >= 4.0 * level) {
    throw std::logic_error("cz_stopping: interval mass above 4 * level * |Q|");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split

std::int64_t CZDecomposition::E_intersect(std::int64_t lo, std::int64_t hi) const {
  std::int64_t n = 0;
  for (const auto& r : E) {
    const std::int64_t a = std::max(lo, r.lo);
    const std::int64_t b = std::min(hi, r.hi);
    if (b > a) n += b - a;
  }
  return n;
}

CZDecomposition cz_split(const Signal& f, int n, double alpha, double level, std::span<const std::int64_t> support) {
  if (n < 0 || n > 62) throw DomainError("cz_split: scale n must lie in [0, 62]");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("cz_split: alpha must lie in [0, 1)");
  CZDecomposition d;
  d.n = n;
  d.alpha = alpha;
  d.level = level;
  d.threshold = std::exp2((1.0 - alpha) * n);
  d.stopping = cz_stopping(f, level);
  const auto [wlo, whi] = level_window(f, level);
  const std::int64_t lo = f.values.empty() ? wlo : std::min(f.offset, wlo);
  const std::int64_t hi = f.values.empty() ? whi : std::max(f.end(), whi);
  d.offset = lo;
  d.width = static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo));
  d.f.assign(d.width, 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i) d.f[static_cast<std::size_t>(f.offset - lo) + i] = f.values[i];

  d.heavy.assign(d.width, 0.0);
  std::vector<double> light(d.width, 0.0);
  std::vector<std::int64_t> large;
  for (std::size_t i = 0; i < d.width; ++i) {
    if (std::abs(d.f[i]) >= d.threshold) {
      d.heavy[i] = d.f[i];
      large.push_back(lo + static_cast<std::int64_t>(i));
    } else {
      light[i] = d.f[i];
    }
  }
  d.large_count = static_cast<std::int64_t>(large.size());

  d.good = light;
  std::map<int, std::vector<double>> bad;
  for (const auto& Q : d.stopping.intervals) {
    const auto a = static_cast<std::size_t>(Q.start() - lo);
    const auto len = static_cast<std::size_t>(Q.length());
    CompensatedSum<double> s;
    for (std::size_t i = a; i < a + len; ++i) s.add(light[i]);
    const double mean = s.value() / static_cast<double>(len);
    auto& B = bad[Q.scale];
    if (B.empty()) B.assign(d.width, 0.0);
    Atom atom;
    atom.Q = Q;
    CompensatedSum<double> bs;
    for (std::size_t i = a; i < a + len; ++i) {
      const double b = light[i] - mean;
      B[i] = b;
      d.good[i] = mean;
      bs.add(b);
      atom.l1 += std::abs(b);
    }
    atom.sum = bs.value();
    d.max_atom_mean = std::max(d.max_atom_mean, std::abs(atom.sum));
    d.max_atom_ratio = std::max(d.max_atom_ratio, atom.l1 / static_cast<double>(len));
    d.atoms.push_back(atom);
  }
  for (auto& [s, B] : bad) {
    d.bad_scales.push_back(s);
    d.bad.push_back(std::move(B));
  }
  for (std::size_t i = 0; i < d.width; ++i) {
    double r = d.f[i] - d.heavy[i] - d.good[i];
    for (const auto& B : d.bad) r -= B[i];
    d.reconstruction_error = std::max(d.reconstruction_error, std::abs(r));
    d.good_sup = std::max(d.good_sup, std::abs(d.good[i]));
  }

  // E = union of 100Q
  std::vector<Run> runs;
  for (const auto& Q : d.stopping.intervals) {
    const std::int64_t len = Q.length();
    const std::int64_t a = Q.start() - (99 * len) / 2;
    runs.push_back({a, a + 100 * len});
  }
  std::sort(runs.begin(), runs.end(), [](const Run& x, const Run& y) { return x.lo < y.lo; });
  for (const auto& r : runs) {
    if (!d.E.empty() && r.lo <= d.E.back().hi) {
      d.E.back().hi = std::max(d.E.back().hi, r.hi);
    } else {
      d.E.push_back(r);
    }
  }
  for (const auto& r : d.E) d.E_size += r.hi - r.lo;
  d.E_bound = 300.0 * f.l1() / level;

  // X = support + large set, taken literally
  for (std::int64_t s : support) {
    for (std::int64_t l : large) d.X.push_back(s + l);
  }
  std::sort(d.X.begin(), d.X.end());
  d.X.erase(std::unique(d.X.begin(), d.X.end()), d.X.end());
  return d;
}

double set_estimate_ratio(const CZDecomposition& d, int m, std::int64_t lo, std::int64_t len) {
  if (m < 0) throw DomainError("set_estimate_ratio: m must be >= 0");
  if (len < (std::int64_t{1} << m)) throw DomainError("set_estimate_ratio: window shorter than 2^m");
  CompensatedSum<double> mass;
  for (std::int64_t x = lo; x < lo + len; ++x) {
    const std::int64_t i = x - d.offset;
    if (i < 0 || i >= static_cast<std::int64_t>(d.width)) continue;
    double v = 0.0;
    for (std::size_t k = 0; k < d.bad_scales.size(); ++k) {
      if (d.bad_scales[k] <= m) v += d.bad[k][static_cast<std::size_t>(i)];
    }
    mass.add(std::abs(v));
  }
  const double num = mass.value();
  const auto den = static_cast<double>(d.E_intersect(lo, lo + len));
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

// ---------------------------------------------------------------------------
// Weak type

std::vector<double> lambda_grid(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw DomainError("lambda_grid: need 0 < lo <= hi");
  std::vector<double> g;
  const double step = std::exp2(0.25);
  for (int k = 0;; ++k) {
    const double v = lo * std::pow(step, k);
    g.push_back(v);
    if (v >= hi) break;
  }
  return g;
}

WeakType weak_type_ratio(const std::vector<kernels::Kernel>& family, const oscfun::OscillationFunctional& functional,
                         const Signal& f, const std::optional<std::vector<double>>& grid) {
  if (family.empty()) throw DomainError("weak_type_ratio: empty kernel family");
  if (grid && grid->empty()) throw DomainError("weak_type_ratio: empty lambda grid");
  functional.validate();
  WeakType w;
  w.l1 = f.l1();
  if (w.l1 == 0.0) throw DomainError("weak_type_ratio: f vanishes");

  std::int64_t xlo = std::numeric_limits<std::int64_t>::max();
  std::int64_t xhi = std::numeric_limits<std::int64_t>::min();
  for (const auto& k : family) {
    if (k.values.empty()) continue;
    xlo = std::min(xlo, k.offset + f.offset);
    xhi = std::max(xhi, k.end() + f.end() - 1);
  }
  if (xhi <= xlo) return w;
  const auto width = static_cast<std::size_t>(xhi - xlo);
  const std::size_t S = family.size();
  std::vector<double> field(width * S, 0.0);  // field[x * S + i]
  for (std::size_t i = 0; i < S; ++i) {
    const auto& k = family[i];
    if (k.values.empty()) continue;
    const auto conv = fft::convolve(k.values, f.values);
    const auto base = static_cast<std::size_t>(k.offset + f.offset - xlo);
    for (std::size_t j = 0; j < conv.size(); ++j) field[(base + j) * S + i] = conv[j];
  }
  std::vector<double> F(width);
  parallel_for(width, [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      F[x] = oscfun::evaluate(functional, std::span<const double>(field.data() + x * S, S));
    }
  });
  w.max_value = *std::max_element(F.begin(), F.end());
  std::sort(F.begin(), F.end());
  if (!grid) {
    // sup over lambda of lambda |{F > lambda}| is approached as lambda rises to a value of F
    for (std::size_t i = 0; i < F.size(); ++i) {
      if (!(F[i] > 0.0) || (i > 0 && F[i] == F[i - 1])) continue;
      ++w.grid_size;
      const double r = F[i] * static_cast<double>(F.size() - i) / w.l1;
      if (r > w.ratio) {
        w.ratio = r;
        w.argmax = F[i];
      }
    }
    return w;
  }
  w.grid_size = grid->size();
  for (double l : *grid) {
    if (!(l > 0.0)) throw DomainError("weak_type_ratio: lambda must be > 0");
    const auto count = static_cast<double>(F.end() - std::upper_bound(F.begin(), F.end(), l));
    const double r = l * count / w.l1;
    if (r > w.ratio) {
      w.ratio = r;
      w.argmax = l;
    }
  }
  return w;
}

RhoDecay rho_bad_decay(const CZDecomposition& d, const kernels::Kernel& rho) {
  RhoDecay out;
  out.n = d.n;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int s = 0; s <= d.n; ++s) {
    const int scale = d.n - s;
    const auto it = std::find(d.bad_scales.begin(), d.bad_scales.end(), scale);
    if (it == d.bad_scales.end()) continue;
    const auto& B = d.bad[static_cast<std::size_t>(it - d.bad_scales.begin())];
    const auto conv = fft::convolve(rho.values, B);
    double m = 0.0;
    for (double v : conv) m = std::max(m, std::abs(v));
    out.s.push_back(s);
    out.sup.push_back(m);
    if (m > 0.0) {
      xs.push_back(std::exp2(s));
      ys.push_back(m);
    }
  }
  if (xs.size() >= 2) out.kappa = -fit::fit_slope(xs, ys).slope;
  return out;
}

std::string intervals_csv(const StoppingIntervals& s) {
  std::ostringstream os;
  os.precision(17);
  os << "scale,start,length,mass\n";
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    const auto& q = s.intervals[i];
    os << q.scale << ',' << q.start() << ',' << q.length() << ',' << s.masses[i] << '\n';
  }
  return os.str();
}

std::string to_json(const CZDecomposition& d) {
  nlohmann::json j;
  j["n"] = d.n;
  j["alpha"] = d.alpha;
  j["level"] = d.level;
  j["threshold"] = d.threshold;
  j["window"] = {d.offset, d.offset + static_cast<std::int64_t>(d.width)};
  j["intervals"] = d.stopping.intervals.size();
  j["covered"] = d.stopping.covered;
  j["mass_ratio"] = {{"min", d.stopping.min_ratio}, {"max", d.stopping.max_ratio}};
  j["bad_scales"] = d.bad_scales;
  j["large_count"] = d.large_count;
  j["X_size"] = d.X.size();
  j["E_size"] = d.E_size;
  j["E_bound"] = d.E_bound;
  j["reconstruction_error"] = d.reconstruction_error;
  j["max_atom_mean"] = d.max_atom_mean;
  j["max_atom_ratio"] = d.max_atom_ratio;
  j["good_sup"] = d.good_sup;
  return j.dump();
}

}  // namespace sparse_ergodic::czd
