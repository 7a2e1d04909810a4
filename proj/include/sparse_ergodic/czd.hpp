#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparse_ergodic/kernels.hpp"
#include "sparse_ergodic/oscfun.hpp"

namespace sparse_ergodic::czd {

inline constexpr double kDefaultLevel = 0.125;

/// Finitely supported real function on Z: f(x) = values[x - offset].
struct Signal {
  std::int64_t offset = 0;
  std::vector<double> values;

  std::int64_t end() const { return offset + static_cast<std::int64_t>(values.size()); }
  double at(std::int64_t x) const;
  double l1() const;
  double linf() const;
  /// Point masses; repeated positions accumulate.
  static Signal point_masses(const std::vector<std::pair<std::int64_t, double>>& masses);
};

/// [k 2^s, (k+1) 2^s)
struct DyadicInterval {
  int scale = 0;
  std::int64_t index = 0;

  std::int64_t length() const { return std::int64_t{1} << scale; }
  std::int64_t start() const { return index * length(); }
  std::int64_t end() const { return start() + length(); }
  bool contains(std::int64_t x) const { return x >= start() && x < end(); }
  DyadicInterval parent() const;
  bool operator==(const DyadicInterval&) const = default;
};

/// M_HL f(x) for x in [lo, hi), exact.
std::vector<double> hl_maximal(const Signal& f, std::int64_t lo, std::int64_t hi);

/// Window outside which M_HL f < level.
std::pair<std::int64_t, std::int64_t> level_window(const Signal& f, double level);

struct StoppingIntervals {
  double level = kDefaultLevel;
  std::vector<DyadicInterval> intervals;  ///< sorted by start
  std::vector<double> masses;             ///< sum_{Q} |f|
  double min_ratio = 0.0;  ///< min mass / |Q|
  double max_ratio = 0.0;  ///< max mass / |Q|; always < 4 level
  std::int64_t covered = 0;  ///< |{M_HL f >= level}|
};

/// Maximal dyadic intervals inside {M_HL f >= level}.
StoppingIntervals cz_stopping(const Signal& f, double level = kDefaultLevel);

struct Atom {
  DyadicInterval Q;
  double sum = 0.0;  ///< sum of b_Q over Q
  double l1 = 0.0;   ///< ||b_Q||_1
};

struct Run {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  ///< exclusive
};

struct CZDecomposition {
  int n = 0;
  double alpha = 0.0;
  double level = kDefaultLevel;
  double threshold = 0.0;  ///< 2^((1-alpha) n)
  std::int64_t offset = 0;  ///< all parts live on [offset, offset + width)
  std::size_t width = 0;
  std::vector<double> f;
  std::vector<double> heavy;
  std::vector<int> bad_scales;               ///< scales with at least one atom
  std::vector<std::vector<double>> bad;      ///< B_s, aligned with bad_scales
  std::vector<double> good;
  std::vector<Atom> atoms;
  StoppingIntervals stopping;
  std::vector<Run> E;        ///< union of 100Q, merged
  std::vector<std::int64_t> X;  ///< sorted
  std::int64_t large_count = 0;  ///< |{|f| >= threshold}|

  // invariants, filled by cz_split
  double reconstruction_error = 0.0;
  double max_atom_mean = 0.0;   ///< max |sum b_Q|
  double max_atom_ratio = 0.0;  ///< max ||b_Q||_1 / |Q|
  double good_sup = 0.0;
  std::int64_t E_size = 0;
  double E_bound = 0.0;  ///< 300 ||f||_1 / level

  std::int64_t E_intersect(std::int64_t lo, std::int64_t hi) const;
};

/// Scale-n split f = f^{>=n} + sum_s B_s + g. `support` is the union of the
/// kernel supports entering the set X (may be empty).
CZDecomposition cz_split(const Signal& f, int n, double alpha, double level = kDefaultLevel,
                         std::span<const std::int64_t> support = {});

/// ||sum_{s<=m} B_s||_{l1(J)} / |E cap J| with J = [lo, lo + len); 0 when both vanish.
double set_estimate_ratio(const CZDecomposition& d, int m, std::int64_t lo, std::int64_t len);
/// The constant the set estimate is checked against.
inline double set_estimate_constant(double level) { return 24.0 * level; }

/// Geometric grid with ratio 2^(1/4) covering [lo, hi].
std::vector<double> lambda_grid(double lo, double hi);

struct WeakType {
  double ratio = 0.0;
  double argmax = 0.0;  ///< lambda attaining the sup
  double l1 = 0.0;
  double max_value = 0.0;
  std::size_t grid_size = 0;
};

/// sup_lambda lambda |{x : F(x) > lambda}| / ||f||_1 with F(x) the functional
/// applied to N -> (K_N * f)(x). Without a grid the supremum is exact (taken as
/// lambda rises to each value of F); an explicit empty grid is an error.
WeakType weak_type_ratio(const std::vector<kernels::Kernel>& family, const oscfun::OscillationFunctional& functional,
                         const Signal& f, const std::optional<std::vector<double>>& grid = std::nullopt);

struct RhoDecay {
  int n = 0;
  std::vector<int> s;
  std::vector<double> sup;  ///< ||rho * B_{n-s}||_inf
  double kappa = 0.0;       ///< fitted decay rate, 0 with fewer than 2 usable points
};

RhoDecay rho_bad_decay(const CZDecomposition& d, const kernels::Kernel& rho);

/// scale,start,length,mass
std::string intervals_csv(const StoppingIntervals& s);
std::string to_json(const CZDecomposition& d);

}  // namespace sparse_ergodic::czd
