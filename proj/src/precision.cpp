#include "sparse_ergodic/precision.hpp"

#include <cmath>
#include <limits>

#include "sparse_ergodic/common.hpp"

namespace sparse_ergodic {

namespace {

constexpr double kBoundaryGap = 1e-9;

struct Eval {
  std::int64_t floor;
  double frac;
  bool near_boundary;
};

Eval eval_double(double base, double c, bool reciprocal) {
  const double e = reciprocal ? 1.0 / c : c;
  const double x = std::pow(base, e);
  const double fl = std::floor(x);
  const double fr = x - fl;
  // pow is within an ulp; the rounded reciprocal exponent adds |ln base| ulps.
  const double ulp = std::nextafter(x, std::numeric_limits<double>::infinity()) - x;
  const double err = reciprocal ? 2.0 * x * (std::abs(std::log(base)) + 2.0) * 0x1.0p-53 : 4.0 * ulp;
  const double gap = std::max(kBoundaryGap, err);
  return {static_cast<std::int64_t>(fl), fr, fr < gap || fr > 1.0 - gap};
}

template <class Real>
Eval eval_multi(double base, double c, bool reciprocal, double rel_margin) {
  const Real b(base);
  const Real cc(c);
  const Real e = reciprocal ? Real(1) / cc : cc;
  const Real x = boost::multiprecision::pow(b, e);
  const Real fl = boost::multiprecision::floor(x);
  const Real fr = x - fl;
  const Real gap = x * Real(rel_margin) + Real(rel_margin);
  const bool near = fr < gap || fr > Real(1) - gap;
  return {static_cast<std::int64_t>(fl), static_cast<double>(fr), near};
}

}  // namespace

const char* to_string(Precision p) {
  switch (p) {
    case Precision::binary64:
      return "binary64";
    case Precision::binary113:
      return "binary113";
    case Precision::decimal100:
      return "decimal100";
  }
  return "?";
}

FloorPow floor_pow(double base, double c, bool reciprocal) {
  if (!(base > 0.0) || !std::isfinite(c) || c <= 0.0) {
    throw DomainError("floor_pow: base must be positive and exponent finite");
  }
  Eval ev = eval_double(base, c, reciprocal);
  if (!ev.near_boundary) return {ev.floor, Precision::binary64, false};
  ev = eval_multi<QuadReal>(base, c, reciprocal, 1e-28);
  if (!ev.near_boundary) return {ev.floor, Precision::binary113, false};
  ev = eval_multi<WideReal>(base, c, reciprocal, 1e-90);
  if (!ev.near_boundary) return {ev.floor, Precision::decimal100, false};
  // Within 1e-90 of an integer: treat the power as that integer.
  const std::int64_t k = ev.frac > 0.5 ? ev.floor + 1 : ev.floor;
  return {k, Precision::decimal100, true};
}

FracPow frac_pow(double base, double c, bool reciprocal) {
  if (!(base > 0.0) || !std::isfinite(c) || c <= 0.0) {
    throw DomainError("frac_pow: base must be positive and exponent finite");
  }
  Eval ev = eval_double(base, c, reciprocal);
  if (!ev.near_boundary) return {ev.frac, ev.floor, Precision::binary64, false, true};
  ev = eval_multi<QuadReal>(base, c, reciprocal, 1e-28);
  if (!ev.near_boundary) return {ev.frac, ev.floor, Precision::binary113, false, true};
  ev = eval_multi<WideReal>(base, c, reciprocal, 1e-90);
  if (!ev.near_boundary) return {ev.frac, ev.floor, Precision::decimal100, false, true};

  const std::int64_t k = ev.frac > 0.5 ? ev.floor + 1 : ev.floor;
  if (!reciprocal) return {0.0, k, Precision::decimal100, true, true};
  // base^(1/c) == k exactly iff k^c == base exactly.
  if (base == std::floor(base) && k > 0) {
    const FloorPow fwd = floor_pow(static_cast<double>(k), c, false);
    if (fwd.integral && static_cast<double>(fwd.floor) == base) {
      return {0.0, k, Precision::decimal100, true, true};
    }
  }
  return {ev.frac, ev.floor, Precision::decimal100, false, false};
}

double root_increment(double base, double c) {
  // x0 * expm1(log1p(1/base)/c)
  const double x0 = std::pow(base, 1.0 / c);
  return x0 * std::expm1(std::log1p(1.0 / base) / c);
}

double dist_to_int(double t) { return std::abs(t - std::nearbyint(t)); }

}  // namespace sparse_ergodic
