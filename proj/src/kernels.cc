#include "qsim/kernels.hh"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

namespace qsim::kernels {
namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

// Scalar reference kernels.  Complex products are written out long-hand so
// that the vector backends can reproduce the exact operation order (the
// std::complex operator* may route through the library's NaN-handling
// helper, which the intrinsics cannot imitate bit-for-bit).

void s_scale(cd* x, std::size_t n, cd z) {
  const double zr = z.real(), zi = z.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = x[i].real(), im = x[i].imag();
    x[i] = cd(r * zr - im * zi, im * zr + r * zi);
  }
}

void s_mul(cd* x, const cd* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double r = x[i].real(), im = x[i].imag();
    const double s = y[i].real(), t = y[i].imag();
    x[i] = cd(r * s - im * t, im * s + r * t);
  }
}

void s_butterfly(cd* a, cd* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double sr = (a[i].real() + b[i].real()) * inv_sqrt2;
    const double si = (a[i].imag() + b[i].imag()) * inv_sqrt2;
    const double dr = (a[i].real() - b[i].real()) * inv_sqrt2;
    const double di = (a[i].imag() - b[i].imag()) * inv_sqrt2;
    a[i] = cd(sr, si);
    b[i] = cd(dr, di);
  }
}

void s_swap(cd* a, cd* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cd t = a[i];
    a[i] = b[i];
    b[i] = t;
  }
}

void s_negate(cd* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = cd(-x[i].real(), -x[i].imag());
}

double s_norm_sq(const cd* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return acc;
}

cd s_cdot(const cd* a, const cd* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return cd(re, im);
}

const backend scalar_impl = {
    "scalar", s_scale, s_mul, s_butterfly, s_swap, s_negate, s_norm_sq, s_cdot,
};

const backend& pick() {
  const backend* avx2 = avx2_backend();
  if (const char* env = std::getenv("QSIM_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return scalar_impl;
    if (want == "avx2" && avx2) return *avx2;
    // Unknown or unavailable request: fall through to auto-detection.
  }
  return avx2 ? *avx2 : scalar_impl;
}

}  // namespace

const backend& scalar_backend() { return scalar_impl; }

const backend& active() {
  static const backend& chosen = pick();
  return chosen;
}

}  // namespace qsim::kernels
