#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sparse_ergodic::fit {

inline constexpr double kSlopeTolerance = 0.05;
inline constexpr double kResidualTolerance = 0.2;
inline constexpr std::size_t kMinVerdictPoints = 4;

struct AsymptoticFit {
  std::vector<double> log_n;
  std::vector<double> log_value;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::optional<double> claimed;
  double slope_tolerance = kSlopeTolerance;
  double residual_tolerance = kResidualTolerance;
  /// Set only with a claimed exponent and at least kMinVerdictPoints points.
  std::optional<bool> verdict;
};

/// OLS on (ln N, ln value). Throws DomainError naming the first nonpositive
/// value, or when fewer than two points (or a single distinct N) are given.
AsymptoticFit fit_slope(std::span<const double> N, std::span<const double> value,
                        std::optional<double> claimed = std::nullopt,
                        double slope_tol = kSlopeTolerance, double residual_tol = kResidualTolerance);

/// Spearman rank correlation with average ranks for ties; 0 when either
/// input is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// max / min of positive values.
double spread(std::span<const double> v);

std::string to_json(const AsymptoticFit& f);

}  // namespace sparse_ergodic::fit
