#include "qsim/metrics.hh"

#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace qsim {
namespace {

// Calibration metadata attached to every metrics report.
constexpr const char* kLossConvention =
    "routing-only: spin-flip reflections are normalized to unit modulus, so "
    "only the interferometric (1 +- r)/2 routing amplitudes carry loss";
constexpr const char* kFidelityDefinition =
    "detection-conditioned: sum_b |<ideal|phi_b>|^2 / sum_b p_b, averaged "
    "over the fiducial inputs";
constexpr const char* kFiducialSet =
    "16 computational basis inputs plus the uniform four-level superposition "
    "on both qudits";

double branch_weight(const OutcomeBranch& b, const SpinState& ideal) {
  cd overlap(0.0, 0.0);
  for (int k = 0; k < n_configs; ++k)
    overlap += std::conj(ideal[k]) * b.corrected_spin[k];
  return std::norm(overlap);
}

}  // namespace

ConversionMatrix conversion_matrix(const GateActionReport& report) {
  ConversionMatrix m{};
  int seen = 0;
  for (const GateRun& run : report.runs) {
    if (run.basis_c < 0) continue;  // superposition runs feed fidelity only
    const int i = config_of(run.basis_c, run.basis_t);
    for (const OutcomeBranch& b : run.branches)
      for (int j = 0; j < n_configs; ++j)
        m[i][j] += std::norm(b.corrected_spin[j]);
    ++seen;
  }
  if (seen != n_configs)
    throw error("conversion matrix needs all 16 basis runs, got " +
                std::to_string(seen));
  return m;
}

double min_conversion(const ConversionMatrix& m) {
  double worst = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 4; ++c)
    for (int t = 0; t < 4; ++t) {
      const auto [oc, ot] = ideal_cnot44(c, t);
      worst = std::min(worst, m[config_of(c, t)][config_of(oc, ot)]);
    }
  return worst;
}

double fidelity(const GateActionReport& report) {
  if (report.runs.empty()) throw error("fidelity of an empty gate-action report");
  double acc = 0.0;
  for (const GateRun& run : report.runs) {
    const SpinState ideal = ideal_output_spin(run.control, run.target);
    double num = 0.0, den = 0.0;
    for (const OutcomeBranch& b : run.branches) {
      num += branch_weight(b, ideal);
      den += b.probability;
    }
    if (den <= 0.0)
      throw error("fidelity undefined: an input produced no detections");
    acc += num / den;
  }
  return acc / static_cast<double>(report.runs.size());
}

double efficiency(const GateActionReport& report) {
  if (report.runs.empty())
    throw error("efficiency of an empty gate-action report");
  double acc = 0.0;
  for (const GateRun& run : report.runs) {
    double den = 0.0;
    for (const OutcomeBranch& b : run.branches) den += b.probability;
    acc += den;
  }
  return acc / static_cast<double>(report.runs.size());
}

GateMetrics gate_metrics(const GateActionReport& report) {
  GateMetrics m;
  m.conversion = conversion_matrix(report);
  m.min_conversion = min_conversion(m.conversion);
  m.fidelity = fidelity(report);
  m.efficiency = efficiency(report);
  m.loss_convention = kLossConvention;
  m.fidelity_definition = kFidelityDefinition;
  m.fiducial_set = kFiducialSet;
  return m;
}

std::vector<SweepRow> sweep(const Circuit& circuit, double r_min, double r_max,
                            int steps) {
  if (!(r_min >= 0.0 && r_min <= r_max && r_max <= 1.0))
    throw error("sweep range must satisfy 0 <= r_min <= r_max <= 1");
  if (steps < 1) throw error("sweep needs at least one step");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double r =
        steps == 1 ? r_min
                   : r_min + (r_max - r_min) * static_cast<double>(i) /
                                 static_cast<double>(steps - 1);
    const GateMetrics m =
        gate_metrics(gate_action(circuit, RunParams::swept(r)));
    rows.push_back(SweepRow{r, m.efficiency, m.fidelity, m.min_conversion});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "r,efficiency,fidelity,min_conversion\n";
  char buf[128];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.12f,%.12f,%.12f,%.12f\n", row.r,
                  row.efficiency, row.fidelity, row.min_conversion);
    out += buf;
  }
  return out;
}

double spin_decoherence_penalty(const DecoherenceParams& p) {
  if (p.transfer_time < 0.0) throw error("transfer_time must be >= 0");
  if (p.t2_echo <= 0.0) throw error("t2_echo must be > 0");
  return (std::exp(-p.transfer_time / p.t2_echo) + 1.0) / 2.0;
}

double mode_match_penalty(const DecoherenceParams& p) {
  if (!(p.mode_match > 0.0 && p.mode_match <= 1.0))
    throw error("mode_match must lie in (0, 1]");
  return 0.01 * (1.0 - p.mode_match);
}

std::string metrics_json(const GateMetrics& m, double r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["r"] = r;
  j["efficiency"] = m.efficiency;
  j["fidelity"] = m.fidelity;
  j["min_conversion"] = m.min_conversion;
  j["calibration"] = {{"loss_convention", m.loss_convention},
                      {"fidelity_definition", m.fidelity_definition},
                      {"fiducial_set", m.fiducial_set}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : m.conversion) {
    ordered_json jr = ordered_json::array();
    for (double v : row) jr.push_back(v);
    rows.push_back(std::move(jr));
  }
  j["conversion_matrix"] = std::move(rows);
  return j.dump(2);
}

}  // namespace qsim
