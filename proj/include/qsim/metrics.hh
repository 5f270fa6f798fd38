#pragma once
// Gate quality figures: 16x16 conversion matrix, detection-conditioned
// fidelity, heralding efficiency, reflection sweeps, and the closed-form
// penalty models for spin dephasing and photon mode mismatch.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qsim/protocol.hh"

namespace qsim {

// Truth map of the ideal gate: control unchanged, target incremented by the
// control value modulo four.
constexpr std::pair<int, int> ideal_cnot44(int control, int target) {
  control &= 3;
  target &= 3;
  return {control, (control + target) % 4};
}

using ConversionMatrix = std::array<std::array<double, 16>, 16>;

struct GateMetrics {
  // conversion[i][j]: probability that basis input i (config index) is
  // detected, corrected, and found in basis output j.  Loss-inclusive: row i
  // sums to the input's total detection probability, not to 1.
  ConversionMatrix conversion{};
  double min_conversion = 0.0;  // worst truth-map diagonal entry
  double fidelity = 0.0;        // detection-conditioned fiducial mean
  double efficiency = 0.0;      // mean total detection probability
  // Calibration metadata carried into every report so the numbers are
  // self-describing (the definitions below are fixed by anchor calibration).
  std::string loss_convention;
  std::string fidelity_definition;
  std::string fiducial_set;
};

// The pieces (each takes a gate_action report over the fiducial set):
ConversionMatrix conversion_matrix(const GateActionReport& report);
double min_conversion(const ConversionMatrix& m);
// Mean over fiducial inputs of sum_b |<ideal|phi_b>|^2 / sum_b p_b, with
// phi_b the unnormalized corrected branch vectors.  A run with zero total
// detection probability has no conditioned state and is an error.
double fidelity(const GateActionReport& report);
// Mean over fiducial inputs of the total detection probability sum_b p_b.
double efficiency(const GateActionReport& report);
// All of the above plus the calibration metadata strings.
GateMetrics gate_metrics(const GateActionReport& report);

struct SweepRow {
  double r = 0.0;
  double efficiency = 0.0;
  double fidelity = 0.0;
  double min_conversion = 0.0;
};

// Evaluates the gate on an inclusive linear grid of `steps` reflection
// magnitudes r in [r_min, r_max], with (r_down, r_up) = (r, -r) on all four
// spins.  Deterministic: same grid, same rows.
std::vector<SweepRow> sweep(const Circuit& circuit, double r_min, double r_max,
                            int steps);

// CSV with header "r,efficiency,fidelity,min_conversion" and fixed
// 12-decimal rows.
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct DecoherenceParams {
  double transfer_time = 0.0;  // photon-spin transfer duration (same unit
  double t2_echo = 1.0;        // as t2_echo, the echo coherence time)
  double mode_match = 1.0;     // photon wave-packet overlap, in (0, 1]
};

// Fidelity retention factor (exp(-t/T2) + 1) / 2: 1 at t -> 0, 1/2 when the
// spin has fully dephased.
double spin_decoherence_penalty(const DecoherenceParams& p);

// Efficiency reduction 0.01 * (1 - mode_match).
double mode_match_penalty(const DecoherenceParams& p);

// JSON report embedding GateMetrics (matrix included) plus the calibration
// metadata and the swept reflection magnitude.
std::string metrics_json(const GateMetrics& m, double r);

}  // namespace qsim
