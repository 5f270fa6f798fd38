#pragma once
// Low-level complex-vector kernels used by the state engine.
//
// Every operation has a scalar reference implementation and (on x86-64)
// an AVX2 variant; the active backend is chosen once at startup.  Selection
// order: the QSIM_KERNELS environment variable ("scalar" or "avx2") if set,
// otherwise AVX2 when the CPU supports it, otherwise scalar.
//
// Equivalence contract (checked in tests): the element-wise kernels
// (scale, mul, butterfly, swap_ranges, negate) produce bit-identical
// results across backends -- the vector code performs the same IEEE
// operations in the same per-element order and avoids FMA contractions.
// The reductions (norm_sq, cdot) accumulate in a different order and are
// only guaranteed to agree to ~1e-14 relative tolerance.

#include <complex>
#include <cstddef>

namespace qsim::kernels {

using cd = std::complex<double>;

struct backend {
  const char* name;
  void (*scale)(cd* x, std::size_t n, cd z);              // x[i] *= z
  void (*mul)(cd* x, const cd* y, std::size_t n);         // x[i] *= y[i]
  void (*butterfly)(cd* a, cd* b, std::size_t n);         // (a,b) <- ((a+b), (a-b)) / sqrt(2)
  void (*swap_ranges)(cd* a, cd* b, std::size_t n);       // a[i] <-> b[i]
  void (*negate)(cd* x, std::size_t n);                   // x[i] = -x[i]
  double (*norm_sq)(const cd* x, std::size_t n);          // sum |x[i]|^2
  cd (*cdot)(const cd* a, const cd* b, std::size_t n);    // sum conj(a[i]) * b[i]
};

// Active backend (resolved once, thread-safe).
const backend& active();

// Individual backends, mainly for the equivalence tests.
const backend& scalar_backend();
const backend* avx2_backend();  // nullptr when unavailable on this machine

// Convenience wrappers through the active backend.
inline void scale(cd* x, std::size_t n, cd z) { active().scale(x, n, z); }
inline void mul(cd* x, const cd* y, std::size_t n) { active().mul(x, y, n); }
inline void butterfly(cd* a, cd* b, std::size_t n) { active().butterfly(a, b, n); }
inline void swap_ranges(cd* a, cd* b, std::size_t n) { active().swap_ranges(a, b, n); }
inline void negate(cd* x, std::size_t n) { active().negate(x, n); }
inline double norm_sq(const cd* x, std::size_t n) { return active().norm_sq(x, n); }
inline cd cdot(const cd* a, const cd* b, std::size_t n) { return active().cdot(a, b, n); }

}  // namespace qsim::kernels
