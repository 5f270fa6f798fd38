#include "qsim/state.hh"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsim/kernels.hh"

namespace qsim {

HybridState::HybridState(const std::vector<int>& path_labels)
    : labels_(path_labels) {
  slot_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!slot_.emplace(labels_[i], static_cast<int>(i)).second)
      throw error("duplicate path label " + std::to_string(labels_[i]));
  }
  amp_.assign(labels_.size() * 2 * n_configs, cd(0.0, 0.0));
}

cd* HybridState::row(int path, Pol pol) {
  auto it = slot_.find(path);
  if (it == slot_.end())
    throw error("undeclared path " + std::to_string(path));
  return amp_.data() + (it->second * 2 + static_cast<int>(pol)) * n_configs;
}

const cd* HybridState::row(int path, Pol pol) const {
  return const_cast<HybridState*>(this)->row(path, pol);
}

double HybridState::norm_sq() const {
  return kernels::norm_sq(amp_.data(), amp_.size());
}

void HybridState::scale(cd z) { kernels::scale(amp_.data(), amp_.size(), z); }

namespace {

double vec4_norm_sq(std::span<const cd, 4> v) {
  return kernels::norm_sq(v.data(), 4);
}

}  // namespace

HybridState prepare_initial(const std::vector<int>& path_labels,
                            std::span<const cd, 4> control_amps,
                            std::span<const cd, 4> target_amps,
                            PhotonMode mode) {
  for (auto [name, v] : {std::pair{"control", control_amps},
                         std::pair{"target", target_amps}}) {
    const double n = vec4_norm_sq(v);
    if (std::abs(n - 1.0) > 1e-9)
      throw error(std::string(name) + " amplitudes not normalized: |.|^2 = " +
                  std::to_string(n));
  }
  HybridState s(path_labels);
  cd* r = s.row(mode.path, mode.pol);
  for (int c = 0; c < 4; ++c)
    for (int t = 0; t < 4; ++t)
      r[config_of(c, t)] = qudit_amp(control_amps, c) * qudit_amp(target_amps, t);
  return s;
}

SpinState Projection::normalized() const {
  SpinState out = conditional;
  if (probability > 0.0)
    kernels::scale(out.data(), out.size(), cd(1.0 / std::sqrt(probability), 0.0));
  return out;
}

Projection project_detector(const HybridState& state, PhotonMode mode,
                            std::span<const PhotonMode> detector_ports) {
  if (std::find(detector_ports.begin(), detector_ports.end(), mode) ==
      detector_ports.end())
    throw error("mode (path " + std::to_string(mode.path) + ", " +
                (mode.pol == Pol::H ? "H" : "V") +
                ") is not a declared detector port");
  Projection p;
  const cd* r = state.row(mode.path, mode.pol);
  p.conditional.assign(r, r + n_configs);
  p.probability = kernels::norm_sq(r, n_configs);
  return p;
}

namespace {

double phase_aligned_max_diff(const cd* a, const cd* b, std::size_t n) {
  const cd overlap = kernels::cdot(b, a, n);  // <b|a>
  cd phase(1.0, 0.0);
  const double mag = std::abs(overlap);
  if (mag > 0.0) phase = overlap / mag;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(a[i] - phase * b[i]));
  return worst;
}

}  // namespace

double state_distance(const HybridState& a, const HybridState& b) {
  if (a.path_labels() != b.path_labels())
    throw error("state_distance: path sets differ");
  return phase_aligned_max_diff(a.flat().data(), b.flat().data(),
                                a.flat().size());
}

double state_distance(const SpinState& a, const SpinState& b) {
  if (a.size() != b.size()) throw error("state_distance: dimension mismatch");
  return phase_aligned_max_diff(a.data(), b.data(), a.size());
}

}  // namespace qsim
