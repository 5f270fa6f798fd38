#pragma once
// Joint photon-spin state: a dense complex amplitude vector over
// (path, polarization) photon modes tensored with the 16 configurations of
// the four SiV spins.  Sub-normalized states encode photon loss.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace qsim {

using cd = std::complex<double>;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Pol : int { H = 0, V = 1 };

struct PhotonMode {
  int path = 0;
  Pol pol = Pol::H;
  friend bool operator==(const PhotonMode&, const PhotonMode&) = default;
};

// Spin configurations are indexed 0..15 as s1*8 + s2*4 + s3*2 + s4, with
// down = 0 and up = 1.  Control qudit c = 2*bit(s1)+bit(s2), target
// t = 2*bit(s3)+bit(s4), so |dd> = |0>, |du> = |1>, |ud> = |2>, |uu> = |3>.
inline constexpr int n_configs = 16;

constexpr int spin_bit(int config, int spin /* 1..4 */) {
  return (config >> (4 - spin)) & 1;
}
constexpr int config_of(int control, int target) {
  return ((control & 3) << 2) | (target & 3);
}
constexpr int control_of(int config) { return (config >> 2) & 3; }
constexpr int target_of(int config) { return config & 3; }

// 16-entry spin amplitude vector (used after photon detection).
using SpinState = std::vector<cd>;  // size 16, SpinConfig order

class HybridState {
 public:
  HybridState() = default;
  explicit HybridState(const std::vector<int>& path_labels);

  std::size_t n_paths() const { return labels_.size(); }
  const std::vector<int>& path_labels() const { return labels_; }
  bool has_path(int label) const { return slot_.count(label) != 0; }

  // Contiguous 16-amplitude row for one photon mode.
  cd* row(int path, Pol pol);
  const cd* row(int path, Pol pol) const;

  cd& at(int path, Pol pol, int config) { return row(path, pol)[config]; }
  cd at(int path, Pol pol, int config) const { return row(path, pol)[config]; }

  std::span<cd> flat() { return amp_; }
  std::span<const cd> flat() const { return amp_; }

  double norm_sq() const;
  void scale(cd z);

 private:
  std::vector<int> labels_;              // slot -> path label (declaration order)
  std::unordered_map<int, int> slot_;    // path label -> slot
  std::vector<cd> amp_;                  // [slot][pol][config], row-major
};

// |Psi>_0 = photon at `mode` tensored with the product of the control and
// target qudit amplitude vectors.  IMPORTANT ordering convention: the four
// amplitudes are given in descending qudit order, amps[0] multiplying |3>
// down to amps[3] multiplying |0>.  Rejects vectors whose norm deviates
// from 1 by more than 1e-9 (the error message carries the measured norm).
HybridState prepare_initial(const std::vector<int>& path_labels,
                            std::span<const cd, 4> control_amps,
                            std::span<const cd, 4> target_amps,
                            PhotonMode mode);

// Qudit-value amplitude accessor for the descending-order convention.
inline cd qudit_amp(std::span<const cd, 4> amps, int value /* 0..3 */) {
  return amps[3 - value];
}

// Projects onto a detector mode: probability mass riding on `mode` plus the
// (unnormalized) conditional spin vector.  `detector_ports` is the declared
// detector port list; projecting on an undeclared port is a wiring error.
struct Projection {
  double probability = 0.0;
  SpinState conditional;  // unnormalized
  SpinState normalized() const;
};
Projection project_detector(const HybridState& state, PhotonMode mode,
                            std::span<const PhotonMode> detector_ports);

// max_k |a_k - e^{i theta} b_k| minimized over a single global phase theta
// (theta = arg <b|a>; 0 when the overlap vanishes).  Zero iff the states are
// equal up to global phase; 1 for orthogonal unit basis vectors.
double state_distance(const HybridState& a, const HybridState& b);
double state_distance(const SpinState& a, const SpinState& b);

}  // namespace qsim
