#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "qsim/kernels.hh"

namespace {

using qsim::kernels::cd;

std::vector<cd> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cd> v(n);
  for (cd& z : v) z = cd(u(rng), u(rng));
  return v;
}

bool bitwise_equal(const std::vector<cd>& a, const std::vector<cd>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(cd)) == 0;
}

}  // namespace

TEST_CASE("scalar kernel semantics") {
  std::mt19937_64 rng(7);
  const auto& k = qsim::kernels::scalar_backend();

  SUBCASE("scale and mul match std::complex arithmetic") {
    auto x = random_vec(rng, 17);
    auto y = random_vec(rng, 17);
    auto xs = x;
    const cd z(0.3, -0.8);
    k.scale(xs.data(), xs.size(), z);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(xs[i] == x[i] * z);  // same formula, same roundings
    auto xm = x;
    k.mul(xm.data(), y.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(xm[i] == x[i] * y[i]);
  }

  SUBCASE("butterfly is norm-preserving and self-inverse to 1e-12") {
    auto a = random_vec(rng, 33);
    auto b = random_vec(rng, 33);
    const double n0 = k.norm_sq(a.data(), a.size()) + k.norm_sq(b.data(), b.size());
    auto a1 = a, b1 = b;
    k.butterfly(a1.data(), b1.data(), a1.size());
    const double n1 =
        k.norm_sq(a1.data(), a1.size()) + k.norm_sq(b1.data(), b1.size());
    CHECK(n1 == doctest::Approx(n0).epsilon(1e-12));
    k.butterfly(a1.data(), b1.data(), a1.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a1[i] - a[i]) < 1e-12);
      CHECK(std::abs(b1[i] - b[i]) < 1e-12);
    }
  }

  SUBCASE("negate, swap_ranges, norm_sq, cdot") {
    auto a = random_vec(rng, 9);
    auto b = random_vec(rng, 9);
    auto an = a;
    k.negate(an.data(), an.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(an[i] == -a[i]);
    auto as = a, bs = b;
    k.swap_ranges(as.data(), bs.data(), as.size());
    CHECK(bitwise_equal(as, b));
    CHECK(bitwise_equal(bs, a));
    double n = 0.0;
    cd dot(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      n += std::norm(a[i]);
      dot += std::conj(a[i]) * b[i];
    }
    CHECK(k.norm_sq(a.data(), a.size()) == doctest::Approx(n).epsilon(1e-14));
    CHECK(std::abs(k.cdot(a.data(), b.data(), a.size()) - dot) < 1e-14);
  }
}

TEST_CASE("AVX2 backend matches scalar bitwise on element-wise kernels") {
  const auto* va = qsim::kernels::avx2_backend();
  if (va == nullptr) {
    MESSAGE("AVX2 backend unavailable on this machine; skipping");
    return;
  }
  const auto& vs = qsim::kernels::scalar_backend();
  std::mt19937_64 rng(11);
  // Odd lengths exercise the scalar tails of the vector code.
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                        std::size_t{7}, std::size_t{8}, std::size_t{16},
                        std::size_t{97}}) {
    CAPTURE(n);
    const auto x0 = random_vec(rng, n);
    const auto y0 = random_vec(rng, n);
    const cd z(-0.4, 0.9);

    auto a = x0, b = x0;
    vs.scale(a.data(), n, z);
    va->scale(b.data(), n, z);
    CHECK(bitwise_equal(a, b));

    a = x0, b = x0;
    vs.mul(a.data(), y0.data(), n);
    va->mul(b.data(), y0.data(), n);
    CHECK(bitwise_equal(a, b));

    auto a2 = x0, b2 = y0, a3 = x0, b3 = y0;
    vs.butterfly(a2.data(), b2.data(), n);
    va->butterfly(a3.data(), b3.data(), n);
    CHECK(bitwise_equal(a2, a3));
    CHECK(bitwise_equal(b2, b3));

    a2 = x0, b2 = y0, a3 = x0, b3 = y0;
    vs.swap_ranges(a2.data(), b2.data(), n);
    va->swap_ranges(a3.data(), b3.data(), n);
    CHECK(bitwise_equal(a2, a3));
    CHECK(bitwise_equal(b2, b3));

    a = x0, b = x0;
    vs.negate(a.data(), n);
    va->negate(b.data(), n);
    CHECK(bitwise_equal(a, b));

    // Reductions accumulate in different orders: tolerance, not bitwise.
    const double ns = vs.norm_sq(x0.data(), n);
    const double nv = va->norm_sq(x0.data(), n);
    CHECK(nv == doctest::Approx(ns).epsilon(1e-14));
    const cd ds = vs.cdot(x0.data(), y0.data(), n);
    const cd dv = va->cdot(x0.data(), y0.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-14 * (1.0 + std::abs(ds)));
  }
}

TEST_CASE("active backend is one of the registered implementations") {
  const auto& act = qsim::kernels::active();
  const bool is_scalar = &act == &qsim::kernels::scalar_backend();
  const bool is_avx2 = qsim::kernels::avx2_backend() != nullptr &&
                       &act == qsim::kernels::avx2_backend();
  CHECK((is_scalar || is_avx2));
  CHECK(act.name != nullptr);
}
