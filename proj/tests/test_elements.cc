#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qsim/elements.hh"
#include "qsim/state.hh"

namespace {

using qsim::cd;
using qsim::config_of;
using qsim::Element;
using qsim::HybridState;
using qsim::n_configs;
using qsim::Pol;

constexpr double inv_sqrt2 = 0.70710678118654752440;

HybridState blank(std::vector<int> paths) { return HybridState(paths); }

HybridState random_state(std::mt19937_64& rng, const std::vector<int>& paths) {
  HybridState s(paths);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (cd& z : s.flat()) z = cd(u(rng), u(rng));
  s.scale(cd(1.0 / std::sqrt(s.norm_sq()), 0.0));
  return s;
}

double max_diff(const HybridState& a, const HybridState& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.flat().size(); ++i)
    worst = std::max(worst, std::abs(a.flat()[i] - b.flat()[i]));
  return worst;
}

// All (mode, config) pairs of a path set, for element_matrix.
std::vector<qsim::ModeConfig> full_basis(const std::vector<int>& paths) {
  std::vector<qsim::ModeConfig> basis;
  for (int p : paths)
    for (Pol pol : {Pol::H, Pol::V})
      for (int cfg = 0; cfg < n_configs; ++cfg)
        basis.push_back({{p, pol}, cfg});
  return basis;
}

double unitarity_defect(const std::vector<std::vector<cd>>& m) {
  const std::size_t n = m.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cd acc(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k) acc += std::conj(m[k][i]) * m[k][j];
      worst = std::max(worst, std::abs(acc - (i == j ? cd(1, 0) : cd(0, 0))));
    }
  return worst;
}

}  // namespace

TEST_CASE("beam splitter mixes both polarizations and is self-inverse") {
  HybridState s = blank({1, 2});
  s.at(1, Pol::H, 0) = cd(1, 0);
  apply_element(s, Element{qsim::BeamSplitter{1, 2}});
  CHECK(s.at(1, Pol::H, 0) == cd(inv_sqrt2, 0));
  CHECK(s.at(2, Pol::H, 0) == cd(inv_sqrt2, 0));

  HybridState t = blank({1, 2});
  t.at(2, Pol::V, 5) = cd(0, 1);
  apply_element(t, Element{qsim::BeamSplitter{1, 2}});
  CHECK(std::abs(t.at(1, Pol::V, 5) - cd(0, inv_sqrt2)) < 1e-15);
  CHECK(std::abs(t.at(2, Pol::V, 5) + cd(0, inv_sqrt2)) < 1e-15);

  std::mt19937_64 rng(3);
  HybridState r = random_state(rng, {1, 2});
  HybridState r0 = r;
  apply_element(r, Element{qsim::BeamSplitter{1, 2}});
  CHECK(r.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  apply_element(r, Element{qsim::BeamSplitter{1, 2}});
  CHECK(max_diff(r, r0) < 1e-12);
}

TEST_CASE("polarizing beam splitter routes by polarization") {
  // Two-input form: H transmits from A, V reflects from A; B is swapped.
  HybridState s = blank({1, 2, 3, 4});
  s.at(1, Pol::H, 0) = cd(0.5, 0);
  s.at(1, Pol::V, 1) = cd(0.5, 0);
  s.at(2, Pol::H, 2) = cd(0.5, 0);
  s.at(2, Pol::V, 3) = cd(0.5, 0);
  apply_element(s, Element{qsim::Pbs{1, 2, 3, 4}});
  CHECK(s.at(3, Pol::H, 0) == cd(0.5, 0));  // A,H -> T
  CHECK(s.at(4, Pol::V, 1) == cd(0.5, 0));  // A,V -> R
  CHECK(s.at(4, Pol::H, 2) == cd(0.5, 0));  // B,H -> R
  CHECK(s.at(3, Pol::V, 3) == cd(0.5, 0));  // B,V -> T
  CHECK(s.at(1, Pol::H, 0) == cd(0, 0));
  CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));

  // Single-input form reusing the input as an output port.
  HybridState t = blank({1, 2});
  t.at(1, Pol::H, 0) = cd(inv_sqrt2, 0);
  t.at(1, Pol::V, 0) = cd(inv_sqrt2, 0);
  apply_element(t, Element{qsim::Pbs{1, std::nullopt, 1, 2}});
  CHECK(t.at(1, Pol::H, 0) == cd(inv_sqrt2, 0));
  CHECK(t.at(2, Pol::V, 0) == cd(inv_sqrt2, 0));
  CHECK(t.at(1, Pol::V, 0) == cd(0, 0));
}

TEST_CASE("PBS rejects light already sitting on a fresh output port") {
  HybridState s = blank({1, 2, 3});
  s.at(1, Pol::H, 0) = cd(1, 0);
  s.at(3, Pol::V, 0) = cd(1e-6, 0);  // occupied reflected port
  CHECK_THROWS_WITH_AS(apply_element(s, Element{qsim::Pbs{1, std::nullopt, 2, 3}}),
                       doctest::Contains("already carries amplitude"), qsim::error);
}

TEST_CASE("wave plates") {
  SUBCASE("quarter-wave mixes polarizations on one path only") {
    HybridState s = blank({1, 2});
    s.at(1, Pol::H, 7) = cd(1, 0);
    s.at(2, Pol::H, 7) = cd(0, 0.5);
    apply_element(s, Element{qsim::QuarterWave{1}});
    CHECK(s.at(1, Pol::H, 7) == cd(inv_sqrt2, 0));
    CHECK(s.at(1, Pol::V, 7) == cd(inv_sqrt2, 0));
    CHECK(s.at(2, Pol::H, 7) == cd(0, 0.5));  // untouched path
    // |V> -> (|H> - |V>)/sqrt2
    HybridState t = blank({1});
    t.at(1, Pol::V, 0) = cd(1, 0);
    apply_element(t, Element{qsim::QuarterWave{1}});
    CHECK(t.at(1, Pol::H, 0) == cd(inv_sqrt2, 0));
    CHECK(t.at(1, Pol::V, 0) == cd(-inv_sqrt2, 0));
  }

  SUBCASE("half-wave X plate swaps H and V exactly") {
    HybridState s = blank({1});
    s.at(1, Pol::H, 3) = cd(0.6, 0);
    s.at(1, Pol::V, 3) = cd(0, 0.8);
    apply_element(s, Element{qsim::HalfWaveX{1}});
    CHECK(s.at(1, Pol::H, 3) == cd(0, 0.8));
    CHECK(s.at(1, Pol::V, 3) == cd(0.6, 0));
  }

  SUBCASE("phase plate: literal -1 vs conventional H/V-relative") {
    HybridState s = blank({1});
    s.at(1, Pol::H, 0) = cd(0.6, 0);
    s.at(1, Pol::V, 0) = cd(0.8, 0);
    HybridState lit = s, conv = s;
    apply_element(lit, Element{qsim::PhasePlate{1, false}});
    CHECK(lit.at(1, Pol::H, 0) == cd(-0.6, 0));
    CHECK(lit.at(1, Pol::V, 0) == cd(-0.8, 0));
    apply_element(conv, Element{qsim::PhasePlate{1, true}});
    CHECK(conv.at(1, Pol::H, 0) == cd(0.6, 0));
    CHECK(conv.at(1, Pol::V, 0) == cd(-0.8, 0));
    // On a single-polarization arm the two differ by a global phase only.
    HybridState arm = blank({1});
    arm.at(1, Pol::V, 5) = cd(1, 0);
    HybridState a1 = arm, a2 = arm;
    apply_element(a1, Element{qsim::PhasePlate{1, false}});
    apply_element(a2, Element{qsim::PhasePlate{1, true}});
    CHECK(qsim::state_distance(a1, a2) < 1e-15);
  }
}

TEST_CASE("cavity scattering is spin-conditioned and H-only") {
  HybridState s = blank({1});
  // (|down> + |up>)/sqrt2 on spin 4: configs 0 and 1.
  s.at(1, Pol::H, 0) = cd(inv_sqrt2, 0);
  s.at(1, Pol::H, 1) = cd(inv_sqrt2, 0);
  apply_element(s, Element{qsim::CavityScatter{4, 1, cd(1, 0), cd(-1, 0)}});
  CHECK(s.at(1, Pol::H, 0) == cd(inv_sqrt2, 0));
  CHECK(s.at(1, Pol::H, 1) == cd(-inv_sqrt2, 0));

  // Sub-unit magnitudes attenuate.
  HybridState t = blank({1});
  t.at(1, Pol::H, 8) = cd(1, 0);  // spin 1 up
  apply_element(t, Element{qsim::CavityScatter{1, 1, cd(0.9, 0), cd(0, -0.8)}});
  CHECK(t.at(1, Pol::H, 8) == cd(0, -0.8));
  CHECK(t.norm_sq() == doctest::Approx(0.64).epsilon(1e-14));

  // V light incident on the cavity path is a wiring error.
  HybridState v = blank({1, 2});
  v.at(1, Pol::V, 0) = cd(1e-3, 0);
  CHECK_THROWS_WITH_AS(apply_element(v, Element{qsim::CavityScatter{1, 1}}),
                       doctest::Contains("V-polarized"), qsim::error);
  // ... but V light elsewhere is fine.
  HybridState w = blank({1, 2});
  w.at(2, Pol::V, 0) = cd(1, 0);
  CHECK_NOTHROW(apply_element(w, Element{qsim::CavityScatter{1, 1}}));
}

TEST_CASE("spin rotations act on every photon mode") {
  SUBCASE("Hadamard splits and recombines") {
    HybridState s = blank({1, 2});
    s.at(2, Pol::V, config_of(0, 0)) = cd(1, 0);  // all spins down
    apply_element(s, Element{qsim::SpinHadamard{3}});
    CHECK(s.at(2, Pol::V, config_of(0, 0)) == cd(inv_sqrt2, 0));
    CHECK(s.at(2, Pol::V, config_of(0, 2)) == cd(inv_sqrt2, 0));  // s3 up
    apply_element(s, Element{qsim::SpinHadamard{3}});
    CHECK(std::abs(s.at(2, Pol::V, config_of(0, 0)) - cd(1, 0)) < 1e-12);
    CHECK(std::abs(s.at(2, Pol::V, config_of(0, 2))) < 1e-12);
  }

  SUBCASE("SpinZ negates the up half; sign flips the overall factor") {
    HybridState s = blank({1});
    s.at(1, Pol::H, config_of(2, 0)) = cd(1, 0);  // spin 1 up
    HybridState plus = s, minus = s;
    apply_element(plus, Element{qsim::SpinZ{1, +1}});
    CHECK(plus.at(1, Pol::H, config_of(2, 0)) == cd(-1, 0));
    apply_element(minus, Element{qsim::SpinZ{1, -1}});
    CHECK(minus.at(1, Pol::H, config_of(2, 0)) == cd(1, 0));

    HybridState d = blank({1});
    d.at(1, Pol::H, config_of(0, 0)) = cd(1, 0);  // spin 1 down
    apply_element(d, Element{qsim::SpinZ{1, -1}});
    CHECK(d.at(1, Pol::H, config_of(0, 0)) == cd(-1, 0));
  }

  SUBCASE("Hadamard-cavity-Hadamard sandwich is a spin flip") {
    std::mt19937_64 rng(5);
    HybridState s = random_state(rng, {1});
    HybridState expected(std::vector<int>{1});
    for (Pol pol : {Pol::H, Pol::V})
      for (int cfg = 0; cfg < n_configs; ++cfg)
        expected.at(1, pol, cfg ^ 1) = s.at(1, pol, cfg);  // flip spin 4
    // V light cannot hit the cavity: fold it away first for this check.
    for (int cfg = 0; cfg < n_configs; ++cfg) {
      s.at(1, Pol::V, cfg) = cd(0, 0);
      expected.at(1, Pol::V, cfg ^ 1) = cd(0, 0);
    }
    apply_element(s, Element{qsim::SpinHadamard{4}});
    apply_element(s, Element{qsim::CavityScatter{4, 1, cd(1, 0), cd(-1, 0)}});
    apply_element(s, Element{qsim::SpinHadamard{4}});
    double worst = 0.0;
    for (int cfg = 0; cfg < n_configs; ++cfg)
      worst = std::max(worst,
                       std::abs(s.at(1, Pol::H, cfg) - expected.at(1, Pol::H, cfg)));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("detect markers do not change the state") {
  std::mt19937_64 rng(9);
  HybridState s = random_state(rng, {1, 2});
  HybridState s0 = s;
  apply_element(s, Element{qsim::Detect{2, Pol::V, "D"}});
  CHECK(max_diff(s, s0) == 0.0);
}

TEST_CASE("every element is unitary at ideal reflection") {
  const std::vector<int> paths = {1, 2, 3};
  const auto basis = full_basis(paths);
  // Elements whose output ports coincide with their inputs act on the whole
  // mode space; a PBS with a fresh output port is handled below.
  const std::vector<Element> elements = {
      Element{qsim::BeamSplitter{1, 2}},
      Element{qsim::Pbs{1, 2, 2, 1}},
      Element{qsim::QuarterWave{2}},
      Element{qsim::HalfWaveX{3}},
      Element{qsim::PhasePlate{1, false}},
      Element{qsim::PhasePlate{1, true}},
      Element{qsim::SpinHadamard{2}},
      Element{qsim::SpinZ{3, +1}},
      Element{qsim::SpinZ{3, -1}},
      Element{qsim::Detect{1, Pol::H, "D"}},
  };
  for (std::size_t i = 0; i < elements.size(); ++i) {
    CAPTURE(i);
    CHECK(unitarity_defect(element_matrix(elements[i], basis, paths)) < 1e-12);
  }
  // The cavity acts on the H subspace only; restrict the basis accordingly.
  std::vector<qsim::ModeConfig> h_basis;
  for (const auto& mc : basis)
    if (mc.mode.pol == Pol::H) h_basis.push_back(mc);
  const Element cav{qsim::CavityScatter{2, 1, cd(1, 0), cd(-1, 0)}};
  CHECK(unitarity_defect(element_matrix(cav, h_basis, paths)) < 1e-12);
}

TEST_CASE("pbs with fresh output ports is an isometry on its input modes") {
  // A PBS routing onto previously-empty paths is not an endomorphism of the
  // occupied-mode space, so unitarity is checked as column orthonormality of
  // the rectangular matrix built from input-mode basis states.
  struct Case {
    qsim::Pbs pbs;
    std::vector<int> in_paths;
  };
  const std::vector<Case> cases = {
      {qsim::Pbs{1, std::nullopt, 2, 3}, {1}},
      {qsim::Pbs{1, 2, 3, 4}, {1, 2}},
      {qsim::Pbs{1, std::nullopt, 1, 2}, {1}},
  };
  const std::vector<int> paths = {1, 2, 3, 4};
  for (const Case& c : cases) {
    std::vector<std::vector<cd>> cols;
    for (int p : c.in_paths)
      for (Pol pol : {Pol::H, Pol::V})
        for (int cfg = 0; cfg < n_configs; ++cfg) {
          HybridState s = blank(paths);
          s.at(p, pol, cfg) = cd(1, 0);
          apply_element(s, Element{c.pbs});
          cols.emplace_back(s.flat().begin(), s.flat().end());
        }
    double worst = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) {
        cd acc(0, 0);
        for (std::size_t k = 0; k < cols[i].size(); ++k)
          acc += std::conj(cols[i][k]) * cols[j][k];
        worst = std::max(worst, std::abs(acc - (i == j ? cd(1, 0) : cd(0, 0))));
      }
    CHECK(worst == 0.0);  // pure routing: amplitudes are moved, never mixed
  }
}

TEST_CASE("operations on disjoint supports commute") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    HybridState s = random_state(rng, {1, 2, 3, 4});
    const Element a{qsim::BeamSplitter{1, 2}};
    const Element b{qsim::QuarterWave{3}};
    const Element c{qsim::SpinHadamard{1}};
    HybridState ab = s, ba = s;
    apply_element(ab, a);
    apply_element(ab, b);
    apply_element(ba, b);
    apply_element(ba, a);
    CHECK(max_diff(ab, ba) < 1e-15);
    // Spin rotations commute with photonic routing.
    HybridState ac = s, ca = s;
    apply_element(ac, a);
    apply_element(ac, c);
    apply_element(ca, c);
    apply_element(ca, a);
    CHECK(max_diff(ac, ca) < 1e-15);
  }
}
