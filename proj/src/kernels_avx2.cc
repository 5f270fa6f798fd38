// AVX2 kernels.  Compiled with -mavx2 (and QSIM_AVX2 defined) on x86-64;
// on other targets this translation unit only provides the nullptr stub.
//
// The element-wise kernels deliberately avoid FMA and keep the per-element
// operation order of the scalar reference, so results are bit-identical
// across backends (the whole build uses -ffp-contract=off for the same
// reason).  Reductions use four-lane accumulators and differ from the
// scalar sum order by design; see kernels.hh for the contract.

#include "qsim/kernels.hh"

#ifdef QSIM_AVX2

#include <immintrin.h>

namespace qsim::kernels {
namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

inline void mul1(cd* x, cd y) {
  const double r = x->real(), im = x->imag();
  const double s = y.real(), t = y.imag();
  *x = cd(r * s - im * t, im * s + r * t);
}

// [r0,i0,r1,i1] * [s0,t0,s1,t1] -> [r*s - i*t, i*s + r*t] per complex lane
inline __m256d cmul2(__m256d x, __m256d y) {
  const __m256d ys = _mm256_movedup_pd(y);            // [s0,s0,s1,s1]
  const __m256d yt = _mm256_permute_pd(y, 0xF);       // [t0,t0,t1,t1]
  const __m256d xs = _mm256_permute_pd(x, 0x5);       // [i0,r0,i1,r1]
  return _mm256_addsub_pd(_mm256_mul_pd(x, ys), _mm256_mul_pd(xs, yt));
}

void a_scale(cd* x, std::size_t n, cd z) {
  double* p = reinterpret_cast<double*>(x);
  const __m256d zv = _mm256_setr_pd(z.real(), z.imag(), z.real(), z.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, p += 4)
    _mm256_storeu_pd(p, cmul2(_mm256_loadu_pd(p), zv));
  for (; i < n; ++i) mul1(x + i, z);
}

void a_mul(cd* x, const cd* y, std::size_t n) {
  double* p = reinterpret_cast<double*>(x);
  const double* q = reinterpret_cast<const double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, p += 4, q += 4)
    _mm256_storeu_pd(p, cmul2(_mm256_loadu_pd(p), _mm256_loadu_pd(q)));
  for (; i < n; ++i) mul1(x + i, y[i]);
}

void a_butterfly(cd* a, cd* b, std::size_t n) {
  double* pa = reinterpret_cast<double*>(a);
  double* pb = reinterpret_cast<double*>(b);
  const __m256d k = _mm256_set1_pd(inv_sqrt2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, pa += 4, pb += 4) {
    const __m256d va = _mm256_loadu_pd(pa);
    const __m256d vb = _mm256_loadu_pd(pb);
    _mm256_storeu_pd(pa, _mm256_mul_pd(_mm256_add_pd(va, vb), k));
    _mm256_storeu_pd(pb, _mm256_mul_pd(_mm256_sub_pd(va, vb), k));
  }
  for (; i < n; ++i) {
    const cd s((a[i].real() + b[i].real()) * inv_sqrt2,
               (a[i].imag() + b[i].imag()) * inv_sqrt2);
    const cd d((a[i].real() - b[i].real()) * inv_sqrt2,
               (a[i].imag() - b[i].imag()) * inv_sqrt2);
    a[i] = s;
    b[i] = d;
  }
}

void a_swap(cd* a, cd* b, std::size_t n) {
  double* pa = reinterpret_cast<double*>(a);
  double* pb = reinterpret_cast<double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, pa += 4, pb += 4) {
    const __m256d va = _mm256_loadu_pd(pa);
    const __m256d vb = _mm256_loadu_pd(pb);
    _mm256_storeu_pd(pa, vb);
    _mm256_storeu_pd(pb, va);
  }
  for (; i < n; ++i) {
    const cd t = a[i];
    a[i] = b[i];
    b[i] = t;
  }
}

void a_negate(cd* x, std::size_t n) {
  double* p = reinterpret_cast<double*>(x);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, p += 4)
    _mm256_storeu_pd(p, _mm256_xor_pd(_mm256_loadu_pd(p), sign));
  for (; i < n; ++i) x[i] = cd(-x[i].real(), -x[i].imag());
}

double a_norm_sq(const cd* x, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, p += 4) {
    const __m256d v = _mm256_loadu_pd(p);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i)
    total += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return total;
}

cd a_cdot(const cd* a, const cd* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();  // pairs (ar*br, ai*bi)
  __m256d acc_im = _mm256_setzero_pd();  // pairs (ai*br, ar*bi)
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2, pa += 4, pb += 4) {
    const __m256d va = _mm256_loadu_pd(pa);
    const __m256d vb = _mm256_loadu_pd(pb);
    acc_re = _mm256_add_pd(acc_re, _mm256_mul_pd(va, vb));
    acc_im = _mm256_add_pd(acc_im, _mm256_mul_pd(_mm256_permute_pd(va, 0x5), vb));
  }
  alignas(32) double re4[4], im4[4];
  _mm256_store_pd(re4, acc_re);
  _mm256_store_pd(im4, acc_im);
  double re = (re4[0] + re4[1]) + (re4[2] + re4[3]);
  double im = (im4[1] - im4[0]) + (im4[3] - im4[2]);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return cd(re, im);
}

const backend avx2_impl = {
    "avx2", a_scale, a_mul, a_butterfly, a_swap, a_negate, a_norm_sq, a_cdot,
};

}  // namespace

const backend* avx2_backend() {
  return __builtin_cpu_supports("avx2") ? &avx2_impl : nullptr;
}

}  // namespace qsim::kernels

#else  // !QSIM_AVX2

namespace qsim::kernels {
const backend* avx2_backend() { return nullptr; }
}  // namespace qsim::kernels

#endif
