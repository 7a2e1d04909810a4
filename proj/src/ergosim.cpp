#include "sparse_ergodic/ergosim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/fft.hpp"

namespace sparse_ergodic::ergosim {

std::string describe(const ToySystem& sys) {
  if (const auto* r = std::get_if<CyclicRotation>(&sys)) {
    return "cyclic_rotation(m=" + std::to_string(r->m) + ", a=" + std::to_string(r->a) + ")";
  }
  return "integer_shift(H=" + std::to_string(std::get<IntegerShift>(sys).H) + ")";
}

std::int64_t state_count(const ToySystem& sys) {
  if (const auto* r = std::get_if<CyclicRotation>(&sys)) return r->m;
  return std::get<IntegerShift>(sys).H;
}

namespace {

void check_times(std::span<const std::int64_t> times, const seq::SparseSequence& seq) {
  if (times.empty()) throw DomainError("ergodic averages: empty time grid");
  if (times.front() < 1) throw DomainError("ergodic averages: times must be >= 1");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) throw DomainError("ergodic averages: times must be strictly increasing");
  }
  if (static_cast<std::size_t>(times.back()) > seq.size()) {
    throw DomainError("ergodic averages: sequence has " + std::to_string(seq.size()) + " terms, time " +
                      std::to_string(times.back()) + " requested");
  }
}

void stream_rotation(const CyclicRotation& r, std::span<const double> f, const seq::SparseSequence& seq,
                     std::span<const std::int64_t> times, const TimeSink& sink) {
  if (r.m < 1) throw DomainError("cyclic rotation: modulus must be >= 1");
  if (static_cast<std::int64_t>(f.size()) != r.m) throw DomainError("cyclic rotation: f must have m entries");
  const auto m = static_cast<std::size_t>(r.m);
  const std::int64_t a = ((r.a % r.m) + r.m) % r.m;
  // hr[s] counts n with a * a_n = -s mod m
  std::vector<double> hr(m, 0.0);
  std::vector<double> avg(m);
  std::size_t n = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (; n < static_cast<std::size_t>(times[j]); ++n) {
      const auto t = static_cast<unsigned __int128>(seq.terms[n] % r.m) * static_cast<unsigned __int128>(a);
      const auto res = static_cast<std::int64_t>(t % static_cast<unsigned __int128>(r.m));
      hr[static_cast<std::size_t>((r.m - res) % r.m)] += 1.0;
    }
    const auto conv = fft::cyclic_convolve(hr, f);
    const double inv = 1.0 / static_cast<double>(times[j]);
    for (std::size_t x = 0; x < m; ++x) avg[x] = conv[x] * inv;
    sink(j, times[j], avg);
  }
}

void stream_shift(const IntegerShift& s, std::span<const double> f, const seq::SparseSequence& seq,
                  std::span<const std::int64_t> times, const TimeSink& sink) {
  if (s.H < 1) throw DomainError("integer shift: H must be >= 1");
  const auto H = static_cast<std::size_t>(s.H);
  const auto L = static_cast<std::int64_t>(f.size());
  std::vector<double> S(H, 0.0);
  std::vector<double> avg(H);
  std::size_t n = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto target = static_cast<std::size_t>(times[j]);
    if (target - n <= 24) {
      for (; n < target; ++n) {
        const std::int64_t an = seq.terms[n];
        for (std::size_t x = 0; x < H; ++x) {
          const std::int64_t y = static_cast<std::int64_t>(x) + an;
          if (y >= 0 && y < L) S[x] += f[static_cast<std::size_t>(y)];
        }
      }
    } else {
      n = target;
      const std::int64_t top = seq.terms[n - 1];
      if (top < 0) throw DomainError("integer shift: negative sequence term");
      std::vector<double> rev(static_cast<std::size_t>(top) + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) rev[static_cast<std::size_t>(top - seq.terms[i])] = 1.0;
      std::fill(S.begin(), S.end(), 0.0);
      if (L > 0) {
        const auto conv = fft::convolve(rev, f);
        for (std::size_t x = 0; x < H; ++x) {
          const std::size_t k = x + static_cast<std::size_t>(top);
          if (k < conv.size()) S[x] = conv[k];
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(times[j]);
    for (std::size_t x = 0; x < H; ++x) avg[x] = S[x] * inv;
    sink(j, times[j], avg);
  }
}

class GreedyCensus {
 public:
  GreedyCensus(double tau, std::int64_t states) {
    if (!(tau > 0.0)) throw DomainError("census: tau must be > 0");
    out_.tau = tau;
    out_.states = states;
  }
  void consume(std::int64_t time, std::span<const double> v) {
    if (!open_) {
      out_.breakpoints.push_back(time);
      mx_.assign(v.begin(), v.end());
      mn_.assign(v.begin(), v.end());
      open_ = true;
      return;
    }
    std::int64_t count = 0;
    for (std::size_t x = 0; x < v.size(); ++x) {
      mx_[x] = std::max(mx_[x], v[x]);
      mn_[x] = std::min(mn_[x], v[x]);
      if (mx_[x] - v[x] >= out_.tau || v[x] - mn_[x] >= out_.tau) ++count;
    }
    const double density = static_cast<double>(count) / static_cast<double>(out_.states);
    if (density >= out_.tau) {
      ++out_.K;
      out_.breakpoints.push_back(time);
      out_.densities.push_back(density);
      mx_.assign(v.begin(), v.end());
      mn_.assign(v.begin(), v.end());
    }
  }
  OscillationCensus result() const { return out_; }

 private:
  OscillationCensus out_;
  bool open_ = false;
  std::vector<double> mx_;
  std::vector<double> mn_;
};

}  // namespace

void stream_averages(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                     std::span<const std::int64_t> times, const TimeSink& sink) {
  check_times(times, seq);
  if (const auto* r = std::get_if<CyclicRotation>(&sys)) {
    stream_rotation(*r, f, seq, times, sink);
  } else {
    stream_shift(std::get<IntegerShift>(sys), f, seq, times, sink);
  }
}

SeriesField ergodic_averages(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                             std::span<const std::int64_t> times) {
  SeriesField out;
  out.times.assign(times.begin(), times.end());
  out.states = state_count(sys);
  const std::size_t T = times.size();
  out.values.assign(static_cast<std::size_t>(out.states) * T, 0.0);
  stream_averages(sys, f, seq, times, [&](std::size_t j, std::int64_t, std::span<const double> avg) {
    for (std::size_t x = 0; x < avg.size(); ++x) out.values[x * T + j] = avg[x];
  });
  return out;
}

OscillationCensus c_tau_census(const SeriesField& field, double tau) {
  GreedyCensus g(tau, field.states);
  std::vector<double> col(static_cast<std::size_t>(field.states));
  for (std::size_t j = 0; j < field.times.size(); ++j) {
    for (std::int64_t x = 0; x < field.states; ++x) col[static_cast<std::size_t>(x)] = field.at(x, j);
    g.consume(field.times[j], col);
  }
  return g.result();
}

OscillationCensus c_tau_census_exact(const SeriesField& field, double tau) {
  if (!(tau > 0.0)) throw DomainError("census: tau must be > 0");
  const std::size_t T = field.times.size();
  if (T > 12) throw DomainError("c_tau_census_exact: at most 12 times");
  OscillationCensus out;
  out.tau = tau;
  out.states = field.states;
  if (T == 0) return out;
  // density[i][j]: exceedance density of the block [times[i], times[j]]
  std::vector<std::vector<double>> density(T, std::vector<double>(T, 0.0));
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = i + 1; j < T; ++j) {
      std::int64_t count = 0;
      for (std::int64_t x = 0; x < field.states; ++x) {
        const double vj = field.at(x, j);
        double dev = 0.0;
        for (std::size_t k = i; k < j; ++k) dev = std::max(dev, std::abs(field.at(x, k) - vj));
        if (dev >= tau) ++count;
      }
      density[i][j] = static_cast<double>(count) / static_cast<double>(field.states);
    }
  }
  std::vector<std::int64_t> best(T, 0);
  std::vector<std::int64_t> prev(T, -1);
  for (std::size_t j = 0; j < T; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (density[i][j] >= tau && best[i] + 1 > best[j]) {
        best[j] = best[i] + 1;
        prev[j] = static_cast<std::int64_t>(i);
      }
    }
  }
  const auto it = std::max_element(best.begin(), best.end());
  out.K = *it;
  std::vector<std::size_t> chain;
  for (auto j = static_cast<std::int64_t>(it - best.begin()); j >= 0; j = prev[static_cast<std::size_t>(j)]) {
    chain.push_back(static_cast<std::size_t>(j));
  }
  std::reverse(chain.begin(), chain.end());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    out.breakpoints.push_back(field.times[chain[k]]);
    if (k > 0) out.densities.push_back(density[chain[k - 1]][chain[k]]);
  }
  return out;
}

OscillationCensus census_stream(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                                std::span<const std::int64_t> times, double tau) {
  GreedyCensus g(tau, state_count(sys));
  stream_averages(sys, f, seq, times,
                  [&](std::size_t, std::int64_t time, std::span<const double> avg) { g.consume(time, avg); });
  return g.result();
}

double growth_majorant(const seq::SequenceKind& kind, double n) {
  if (const auto* d = std::get_if<seq::Deterministic>(&kind)) return std::ceil(std::pow(n, d->c));
  const double alpha = std::get<seq::Random>(kind).alpha;
  return 2.0 * std::pow(n, 1.0 / (1.0 - alpha));
}

std::int64_t inverse_majorant(const seq::SequenceKind& kind, double y) {
  if (y < 1.0) return 0;
  double guess = 0.0;
  if (const auto* d = std::get_if<seq::Deterministic>(&kind)) {
    guess = std::pow(y, 1.0 / d->c);
  } else {
    guess = std::pow(y / 2.0, 1.0 - std::get<seq::Random>(kind).alpha);
  }
  auto n = static_cast<std::int64_t>(std::floor(guess));
  while (n > 0 && growth_majorant(kind, static_cast<double>(n)) > y) --n;
  while (growth_majorant(kind, static_cast<double>(n + 1)) <= y) ++n;
  return n;
}

std::vector<std::int64_t> census_times(const seq::SequenceKind& kind, std::int64_t H, int R) {
  const std::int64_t top = inverse_majorant(kind, static_cast<double>(H) / 100.0);
  return seq::lacunary_grid(R, top).times;
}

std::vector<double> random_indicator(std::int64_t len, std::uint64_t seed) {
  std::vector<double> f(static_cast<std::size_t>(std::max<std::int64_t>(0, len)));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = counter_uniform(seed, streams::experiment, i) < 0.5 ? 1.0 : 0.0;
  return f;
}

TransferComparison transfer_compare(const CyclicRotation& sys, std::span<const double> f,
                                    const seq::SparseSequence& seq, double tau, std::int64_t H, double c0, int R,
                                    std::int64_t base_points) {
  if (!(c0 > 0.0 && c0 <= 1.0)) throw DomainError("transfer_compare: c0 must lie in (0, 1]");
  if (base_points < 1) throw DomainError("transfer_compare: need at least one base point");
  TransferComparison out;
  out.tau = tau;
  out.c0 = c0;
  out.H = H;
  const auto times = census_times(seq.kind, H, R);
  if (times.empty()) return out;
  out.lhs = census_stream(sys, f, seq, times, tau).K;
  const std::int64_t reach = seq.terms[static_cast<std::size_t>(times.back()) - 1];
  const std::int64_t a = ((sys.a % sys.m) + sys.m) % sys.m;
  std::vector<double> lift(static_cast<std::size_t>(H + reach + 1));
  for (std::int64_t b = 0; b < base_points; ++b) {
    const std::int64_t x0 = b * sys.m / base_points;
    for (std::size_t n = 0; n < lift.size(); ++n) {
      const auto step = static_cast<std::int64_t>((static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(a)) %
                                                  static_cast<unsigned __int128>(sys.m));
      lift[n] = f[static_cast<std::size_t>((x0 + step) % sys.m)];
    }
    const auto z = census_stream(IntegerShift{H}, lift, seq, times, c0 * tau);
    out.z_census = std::max(out.z_census, z.K);
  }
  out.rhs = static_cast<double>(out.z_census) / tau;
  if (out.lhs == 0) {
    out.ratio = 0.0;
  } else {
    out.ratio = out.rhs > 0.0 ? static_cast<double>(out.lhs) / out.rhs : std::numeric_limits<double>::infinity();
  }
  return out;
}

double lipschitz_check(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                       std::span<const std::int64_t> times, int R) {
  if (R < 1) throw DomainError("lipschitz_check: R must be >= 1");
  check_times(times, seq);
  const double step = std::exp2(1.0 / R);
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::vector<std::int64_t> all(times.begin(), times.end());
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::int64_t np = static_cast<std::int64_t>(std::floor(step * static_cast<double>(times[j])));
    if (static_cast<double>(np) >= step * static_cast<double>(times[j])) --np;  // keep N' < 2^(1/R) N
    if (j + 1 < times.size()) np = std::min(np, times[j + 1] - 1);
    np = std::min<std::int64_t>(np, static_cast<std::int64_t>(seq.size()));
    if (np > times[j]) {
      pairs.emplace_back(times[j], np);
      all.push_back(np);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  const auto field = ergodic_averages(sys, f, seq, all);
  auto index = [&](std::int64_t t) { return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), t) - all.begin()); };
  double worst = 0.0;
  for (const auto& [N, Np] : pairs) {
    const std::size_t i = index(N);
    const std::size_t k = index(Np);
    for (std::int64_t x = 0; x < field.states; ++x) worst = std::max(worst, std::abs(field.at(x, i) - field.at(x, k)));
  }
  return worst * R;
}

std::string to_json(const OscillationCensus& c) {
  nlohmann::json j;
  j["tau"] = c.tau;
  j["states"] = c.states;
  j["K"] = c.K;
  j["breakpoints"] = c.breakpoints;
  j["densities"] = c.densities;
  return j.dump();
}

std::string traces_csv(const SeriesField& field, std::int64_t max_states) {
  std::ostringstream os;
  os.precision(17);
  os << "state,N,value\n";
  const std::int64_t S = max_states < 0 ? field.states : std::min(field.states, max_states);
  for (std::int64_t x = 0; x < S; ++x) {
    for (std::size_t j = 0; j < field.times.size(); ++j) os << x << ',' << field.times[j] << ',' << field.at(x, j) << '\n';
  }
  return os.str();
}

}  // namespace sparse_ergodic::ergosim
