#include "sparse_ergodic/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace sparse_ergodic::fft {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuf = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuf<T> alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw std::bad_alloc();
  return FftwBuf<T>(p);
}

struct Plan {
  fftw_plan p = nullptr;
  explicit Plan(fftw_plan plan) : p(plan) {
    if (!p) throw std::runtime_error("fftw: planning failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
  void run() const { fftw_execute(p); }
};

Plan make_r2c(std::size_t n, double* in, fftw_complex* out) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE));
}

Plan make_c2r(std::size_t n, fftw_complex* in, double* out) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE));
}

// Real circular convolution of length n; inputs zero-padded.
std::vector<double> circular(std::span<const double> a, std::span<const double> b, std::size_t n,
                             std::size_t out_len) {
  const std::size_t nc = n / 2 + 1;
  auto ra = alloc<double>(n);
  auto rb = alloc<double>(n);
  auto ca = alloc<fftw_complex>(nc);
  auto cb = alloc<fftw_complex>(nc);
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(a.begin(), a.end(), ra.get());
  std::copy(b.begin(), b.end(), rb.get());
  {
    Plan pa = make_r2c(n, ra.get(), ca.get());
    Plan pb = make_r2c(n, rb.get(), cb.get());
    pa.run();
    pb.run();
  }
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
    const double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
    ca[k][0] = re;
    ca[k][1] = im;
  }
  {
    Plan pi = make_c2r(n, ca.get(), ra.get());
    pi.run();
  }
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < out_len; ++k) out[k] = ra[k] * scale;
  return out;
}

}  // namespace

std::size_t good_size(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = 1;
  while (best < n) best <<= 1;
  for (std::size_t p7 = 1; p7 < best; p7 *= 7) {
    for (std::size_t p5 = p7; p5 < best; p5 *= 5) {
      for (std::size_t p3 = p5; p3 < best; p3 *= 3) {
        std::size_t v = p3;
        while (v < n) v <<= 1;
        best = std::min(best, v);
      }
    }
  }
  return best;
}

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 32) return convolve_direct(a, b);
  return circular(a, b, good_size(len), len);
}

CountConvolution convolve_counts(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  CountConvolution res;
  if (a.empty() || b.empty()) return res;
  const std::size_t len = a.size() + b.size() - 1;
  std::size_t nnz_a = 0;
  for (auto v : a) nnz_a += v != 0;
  if (static_cast<double>(nnz_a) * static_cast<double>(b.size()) <= 4.0e7) {
    res.values.assign(len, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) res.values[i + j] += a[i] * b[j];
    }
    return res;
  }
  std::vector<double> da(a.begin(), a.end());
  std::vector<double> db(b.begin(), b.end());
  const auto out = circular(da, db, good_size(len), len);
  res.used_fft = true;
  res.values.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double r = std::nearbyint(out[k]);
    res.max_residual = std::max(res.max_residual, std::abs(out[k] - r));
    res.values[k] = static_cast<std::int64_t>(r);
  }
  res.exact = res.max_residual < 0.25;
  return res;
}

std::vector<double> dft_modulus(std::span<const double> a, std::size_t len) {
  if (len < a.size()) throw std::invalid_argument("dft_modulus: len shorter than input");
  const std::size_t nc = len / 2 + 1;
  auto in = alloc<double>(len);
  auto out = alloc<fftw_complex>(nc);
  std::fill(in.get(), in.get() + len, 0.0);
  std::copy(a.begin(), a.end(), in.get());
  {
    Plan p = make_r2c(len, in.get(), out.get());
    p.run();
  }
  std::vector<double> mod(nc);
  for (std::size_t k = 0; k < nc; ++k) mod[k] = std::hypot(out[k][0], out[k][1]);
  return mod;
}

std::vector<double> cyclic_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cyclic_convolve: size mismatch");
  return circular(a, b, a.size(), a.size());
}

}  // namespace sparse_ergodic::fft
