#pragma once
// Full gate protocol: initialization, staged evolution with analytic
// checkpoints, polarization-resolved detection, and feed-forward.

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsim/cavity.hh"
#include "qsim/circuit.hh"
#include "qsim/state.hh"

namespace qsim {

// How sub-unit reflection magnitudes enter the detection probabilities.
//
//   absorbing:    every reflection keeps its literal |r| (photon absorption
//                 at each cavity bounce reduces the norm).
//   routing_only: reflections marked as microwave-sandwiched spin flips
//                 (Circuit::flip_cavities) are normalized to unit modulus,
//                 so only interferometric routing loss -- the (1 +- r)/2
//                 port amplitudes -- reaches the loss budget.  At a flip
//                 reflection the ideal operator is proportional to a spin
//                 unitary and the modulus is a state-independent global
//                 attenuation, which does not count against the loss
//                 budget.  This convention is the one calibrated against
//                 the reference efficiency/conversion anchors; see metrics.
//
// Circuits without flip marks behave identically under both.
enum class LossModel { routing_only, absorbing };

struct RunParams {
  std::array<CavityParams, 4> spin_params;  // for spins 1..4
  LossModel loss_model = LossModel::routing_only;

  // Default-constructed params describe the ideal gate (r = +1/-1).
  RunParams() {
    for (auto& s : spin_params)
      s.override_r = std::make_pair(cd(1.0, 0.0), cd(-1.0, 0.0));
  }

  // All four spins share an explicit (r_down, r_up) pair.
  static RunParams overridden(cd r_down, cd r_up);
  // Sweep grid point: r_down = r, r_up = -r on all four spins.
  static RunParams swept(double r);
};

struct StageCheckpoint {
  int stage = 0;  // 0..6
  HybridState expected;
  HybridState observed;
  double distance = 0.0;
};

struct OutcomeBranch {
  std::string detector;
  double probability = 0.0;
  SpinState raw_spin;        // unnormalized conditional spin vector
  SpinState corrected_spin;  // after feed-forward (same norm)
};

struct ProtocolResult {
  std::vector<OutcomeBranch> branches;   // one per detect, circuit order
  std::vector<StageCheckpoint> checkpoints;  // 7 entries when evaluated
  double loss = 0.0;                     // 1 - sum of branch probabilities
};

// Applies the circuit to |Psi>_0 built from (control, target) -- amplitude
// vectors in descending qudit order, see prepare_initial -- then projects
// every declared detector and applies feed-forward per branch.  Stage
// checkpoints are evaluated only for the built-in circuit layout (the
// boundaries metadata with the built-in path set) under exactly ideal
// reflection (r_down, r_up) = (+1, -1) on all spins.
ProtocolResult run_protocol(const Circuit& circuit, const RunParams& params,
                            std::span<const cd, 4> control_amps,
                            std::span<const cd, 4> target_amps);

// Detector-conditioned spin correction.  The table is derived at first use
// by brute force: for each detector, the product of SpinZ operators on
// spins 1 and/or 2 that maps the detector's analytic branch state onto the
// ideal-gate output for random (alpha, gamma) (global phase factored out,
// so an overall sign is absorbed).  Unknown detector names correct nothing.
SpinState feed_forward(const std::string& detector, const SpinState& raw_spin);

// The derived correction table: detector name -> spins to z-flip.
const std::map<std::string, std::vector<int>>& feed_forward_table();

// Analytic transcription of the staged states for arbitrary (alpha, gamma):
// the oracle the simulator is checked against.  Defined over the built-in
// circuit's paths.
HybridState checkpoint_expected(int stage, std::span<const cd, 4> control_amps,
                                std::span<const cd, 4> target_amps);

// Ideal-gate output spin vector for the same input (the feed-forward
// target): sum_(c,t) alpha_c gamma_t |c, (c+t) mod 4>.
SpinState ideal_output_spin(std::span<const cd, 4> control_amps,
                            std::span<const cd, 4> target_amps);

// One protocol run per fiducial input: the 16 computational basis states
// (control-major order) followed by the uniform superposition.  Raw
// material for the metrics module.
struct GateRun {
  std::array<cd, 4> control{}, target{};
  int basis_c = -1, basis_t = -1;  // -1 for superposition inputs
  std::vector<OutcomeBranch> branches;
  double loss = 0.0;
};
struct GateActionReport {
  std::vector<GateRun> runs;  // 16 basis runs + superposition runs
};
GateActionReport gate_action(const Circuit& circuit, const RunParams& params);

// ProtocolResult JSON report:
// { input, branches: [{detector, probability, corrected_spin}], loss,
//   checkpoint_distances }.
std::string to_json(const ProtocolResult& r, std::span<const cd, 4> control_amps,
                    std::span<const cd, 4> target_amps);

}  // namespace qsim
