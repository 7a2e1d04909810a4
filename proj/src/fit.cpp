#include "sparse_ergodic/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sparse_ergodic/common.hpp"

namespace sparse_ergodic::fit {

AsymptoticFit fit_slope(std::span<const double> N, std::span<const double> value,
                        std::optional<double> claimed, double slope_tol, double residual_tol) {
  if (N.size() != value.size()) throw DomainError("fit_slope: N and value lengths differ");
  if (N.size() < 2) throw DomainError("fit_slope: need at least 2 points");
  AsymptoticFit f;
  f.claimed = claimed;
  f.slope_tolerance = slope_tol;
  f.residual_tolerance = residual_tol;
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(N[i] > 0.0)) throw DomainError("fit_slope: point " + std::to_string(i) + " has N <= 0");
    if (!(value[i] > 0.0) || !std::isfinite(value[i])) {
      throw DomainError("fit_slope: point " + std::to_string(i) + " (N=" + std::to_string(N[i]) +
                        ") has nonpositive value " + std::to_string(value[i]));
    }
    f.log_n.push_back(std::log(N[i]));
    f.log_value.push_back(std::log(value[i]));
  }
  const double n = static_cast<double>(N.size());
  const double mx = std::accumulate(f.log_n.begin(), f.log_n.end(), 0.0) / n;
  const double my = std::accumulate(f.log_value.begin(), f.log_value.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < N.size(); ++i) {
    sxx += (f.log_n[i] - mx) * (f.log_n[i] - mx);
    sxy += (f.log_n[i] - mx) * (f.log_value[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_slope: all N are equal");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < N.size(); ++i) {
    const double r = f.log_value[i] - (f.intercept + f.slope * f.log_n[i]);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / n);
  if (claimed && N.size() >= kMinVerdictPoints) {
    f.verdict = f.slope <= *claimed + slope_tol && f.residual_rms <= residual_tol;
  }
  return f;
}

namespace {
std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman: need two equal-length samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spread(std::span<const double> v) {
  if (v.empty()) throw DomainError("spread: empty sample");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*lo > 0.0)) throw DomainError("spread: values must be positive");
  return *hi / *lo;
}

std::string to_json(const AsymptoticFit& f) {
  nlohmann::json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["residual_rms"] = f.residual_rms;
  j["points"] = f.log_n.size();
  j["log_n"] = f.log_n;
  j["log_value"] = f.log_value;
  j["claimed"] = f.claimed ? nlohmann::json(*f.claimed) : nlohmann::json(nullptr);
  j["slope_tolerance"] = f.slope_tolerance;
  j["residual_tolerance"] = f.residual_tolerance;
  j["verdict"] = f.verdict ? nlohmann::json(*f.verdict ? "pass" : "fail") : nlohmann::json(nullptr);
  return j.dump();
}

}  // namespace sparse_ergodic::fit
