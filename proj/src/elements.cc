#include "qsim/elements.hh"

#include <array>
#include <cmath>
#include <string>

#include "qsim/kernels.hh"

namespace qsim {
namespace {

// Spin operators act on every photon mode; configs pair up as contiguous
// runs of length 2^(4-k) (bit k of the config index), so the kernels can
// work on contiguous spans.
void for_each_mode_row(HybridState& s, auto&& fn) {
  for (int path : s.path_labels())
    for (Pol pol : {Pol::H, Pol::V}) fn(s.row(path, pol));
}

void apply(HybridState& s, const BeamSplitter& e) {
  for (Pol pol : {Pol::H, Pol::V})
    kernels::butterfly(s.row(e.path_u, pol), s.row(e.path_d, pol), n_configs);
}

void apply(HybridState& s, const Pbs& e) {
  // Stage the four input rows, then place them on the outputs.  A
  // destination that is not also an input must be empty beforehand;
  // anything else means two beams were wired onto one port.
  std::array<std::array<cd, n_configs>, 4> hold{};  // A_H, A_V, B_H, B_V
  auto grab = [&](int path, Pol pol, int slot) {
    cd* r = s.row(path, pol);
    std::copy(r, r + n_configs, hold[slot].begin());
    std::fill(r, r + n_configs, cd(0.0, 0.0));
  };
  grab(e.in_a, Pol::H, 0);
  grab(e.in_a, Pol::V, 1);
  if (e.in_b) {
    grab(*e.in_b, Pol::H, 2);
    grab(*e.in_b, Pol::V, 3);
  }
  auto place = [&](int path, Pol pol, int slot) {
    cd* r = s.row(path, pol);
    if (kernels::norm_sq(r, n_configs) > 1e-24)
      throw error("pbs: output port (path " + std::to_string(path) +
                  ") already carries amplitude");
    std::copy(hold[slot].begin(), hold[slot].end(), r);
  };
  place(e.out_t, Pol::H, 0);
  place(e.out_r, Pol::V, 1);
  if (e.in_b) {
    place(e.out_r, Pol::H, 2);
    place(e.out_t, Pol::V, 3);
  }
}

void apply(HybridState& s, const QuarterWave& e) {
  kernels::butterfly(s.row(e.path, Pol::H), s.row(e.path, Pol::V), n_configs);
}

void apply(HybridState& s, const HalfWaveX& e) {
  kernels::swap_ranges(s.row(e.path, Pol::H), s.row(e.path, Pol::V), n_configs);
}

void apply(HybridState& s, const PhasePlate& e) {
  if (e.conventional) {
    kernels::negate(s.row(e.path, Pol::V), n_configs);
  } else {
    kernels::negate(s.row(e.path, Pol::H), n_configs);
    kernels::negate(s.row(e.path, Pol::V), n_configs);
  }
}

void apply(HybridState& s, const CavityScatter& e) {
  if (kernels::norm_sq(s.row(e.path, Pol::V), n_configs) > 1e-24)
    throw error("cavity on spin " + std::to_string(e.spin) + ", path " +
                std::to_string(e.path) +
                ": V-polarized light incident (miswired circuit)");
  std::array<cd, n_configs> table;
  for (int cfg = 0; cfg < n_configs; ++cfg)
    table[cfg] = spin_bit(cfg, e.spin) ? e.r_up : e.r_down;
  kernels::mul(s.row(e.path, Pol::H), table.data(), n_configs);
}

void apply(HybridState& s, const SpinHadamard& e) {
  const int run = 1 << (4 - e.spin);
  for_each_mode_row(s, [&](cd* row) {
    for (int base = 0; base < n_configs; base += 2 * run)
      kernels::butterfly(row + base, row + base + run, run);
  });
}

void apply(HybridState& s, const SpinZ& e) {
  const int run = 1 << (4 - e.spin);
  // sign +1 negates the spin-up half of each run pair; sign -1 the other.
  const int offset = e.sign > 0 ? run : 0;
  for_each_mode_row(s, [&](cd* row) {
    for (int base = 0; base < n_configs; base += 2 * run)
      kernels::negate(row + base + offset, run);
  });
}

void apply(HybridState&, const Detect&) {}  // projection happens in protocol

}  // namespace

void apply_element(HybridState& state, const Element& e) {
  std::visit([&](const auto& el) { apply(state, el); }, e);
}

std::vector<std::vector<cd>> element_matrix(const Element& e,
                                            const std::vector<ModeConfig>& basis,
                                            const std::vector<int>& path_labels) {
  const std::size_t n = basis.size();
  std::vector<std::vector<cd>> m(n, std::vector<cd>(n, cd(0.0, 0.0)));
  for (std::size_t j = 0; j < n; ++j) {
    HybridState s(path_labels);
    s.at(basis[j].mode.path, basis[j].mode.pol, basis[j].config) = 1.0;
    apply_element(s, e);
    for (std::size_t i = 0; i < n; ++i)
      m[i][j] = s.at(basis[i].mode.path, basis[i].mode.pol, basis[i].config);
  }
  return m;
}

}  // namespace qsim
