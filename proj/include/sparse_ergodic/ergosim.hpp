#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sparse_ergodic/seq.hpp"

namespace sparse_ergodic::ergosim {

/// x -> x + a mod m on Z/mZ
struct CyclicRotation {
  std::int64_t m = 2;
  std::int64_t a = 1;
};

/// x -> x + 1 on Z, observed on the states [0, H); f is read on [0, f.size()).
struct IntegerShift {
  std::int64_t H = 1;
};

using ToySystem = std::variant<CyclicRotation, IntegerShift>;

std::string describe(const ToySystem& sys);
std::int64_t state_count(const ToySystem& sys);

/// values[x * times.size() + j] = (1/M_j) sum_{n <= M_j} f(T^{a_n} x)
struct SeriesField {
  std::vector<std::int64_t> times;
  std::int64_t states = 0;
  std::vector<double> values;

  double at(std::int64_t x, std::size_t j) const {
    return values[static_cast<std::size_t>(x) * times.size() + j];
  }
  std::span<const double> row(std::int64_t x) const {
    return {values.data() + static_cast<std::size_t>(x) * times.size(), times.size()};
  }
};

/// Receives the averages over all states at time index j.
using TimeSink = std::function<void(std::size_t j, std::int64_t time, std::span<const double> averages)>;

/// Streams the averages time by time; times must be increasing and covered by seq.
void stream_averages(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                     std::span<const std::int64_t> times, const TimeSink& sink);

SeriesField ergodic_averages(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                             std::span<const std::int64_t> times);

struct OscillationCensus {
  double tau = 0.0;
  std::int64_t states = 0;
  std::vector<std::int64_t> breakpoints;  ///< M_0 < M_1 < ... < M_K
  std::vector<double> densities;          ///< exceedance density of each closed block
  std::int64_t K = 0;
};

/// Greedy census over the field's times: a block closes as soon as the
/// exceedance density reaches tau.
OscillationCensus c_tau_census(const SeriesField& field, double tau);
/// Exact maximum over all breakpoint choices; at most 12 times.
OscillationCensus c_tau_census_exact(const SeriesField& field, double tau);

/// Streaming greedy census without storing the field.
OscillationCensus census_stream(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                                std::span<const std::int64_t> times, double tau);

/// Growth majorant h(n) >= a_n: ceil(n^c) or 2 n^(1/(1-alpha)).
double growth_majorant(const seq::SequenceKind& kind, double n);
/// Largest n with h(n) <= y.
std::int64_t inverse_majorant(const seq::SequenceKind& kind, double y);
/// Lacunary times floor(2^(k/R)) <= h^{-1}(H/100).
std::vector<std::int64_t> census_times(const seq::SequenceKind& kind, std::int64_t H, int R = 16);

/// Bernoulli(1/2) indicator of length len from the experiment stream.
std::vector<double> random_indicator(std::int64_t len, std::uint64_t seed);

struct TransferComparison {
  double tau = 0.0;
  double c0 = 0.01;
  std::int64_t H = 0;
  std::int64_t lhs = 0;        ///< census on the system at tau
  std::int64_t z_census = 0;   ///< max census on Z at c0 tau over the lifted base points
  double rhs = 0.0;            ///< z_census / tau
  double ratio = 0.0;          ///< lhs / rhs, 0/0 = 0
};

/// Both sides of the transference bound on a rotation. Lifts
/// F(n) = f(T^n x) 1_[0,H+reach)(n) are taken at `base_points` states.
TransferComparison transfer_compare(const CyclicRotation& sys, std::span<const double> f,
                                    const seq::SparseSequence& seq, double tau, std::int64_t H, double c0 = 0.01,
                                    int R = 16, std::int64_t base_points = 8);

/// max_x |f_N(x) - f_N'(x)| * R over grid times N and N' = floor(2^(1/R) N) - 1
/// (or the next grid time minus one).
double lipschitz_check(const ToySystem& sys, std::span<const double> f, const seq::SparseSequence& seq,
                       std::span<const std::int64_t> times, int R);

std::string to_json(const OscillationCensus& c);
/// state,N,value
std::string traces_csv(const SeriesField& field, std::int64_t max_states = -1);

}  // namespace sparse_ergodic::ergosim
