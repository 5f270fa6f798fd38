#include "qsim/cavity.hh"

#include <cmath>

#include "qsim/state.hh"  // qsim::error

namespace qsim {

cd reflection_coefficient(const CavityParams& p, Spin spin) {
  if (p.override_r)
    return spin == Spin::down ? p.override_r->first : p.override_r->second;
  const double delta_d = spin == Spin::down ? p.delta_down : p.delta_up;
  const cd one_i_dd(1.0, delta_d);
  const cd one_i_dc(1.0, p.delta_c);
  const cd denom = p.C + one_i_dd * one_i_dc;
  if (std::abs(denom) < 1e-15)
    throw error("reflection_coefficient: singular parameters");
  return 1.0 - 2.0 * one_i_dd / denom;
}

cd reflection_steady_state_oracle(const PhysicalParams& p, Spin spin) {
  const double omega_d = spin == Spin::down ? p.omega_down : p.omega_up;
  // Frame rotating at the input frequency; steady state of
  //   (i(omega_d - omega) + gamma/2) sigma  - g a            = 0
  //   (i(omega_c - omega) + kappa/2) a      + g sigma        = -sqrt(kappa) a_in
  // followed by a_out = a_in + sqrt(kappa) a, with a_in = 1.
  const cd dd(p.gamma / 2.0, omega_d - p.omega);
  const cd dc(p.kappa / 2.0, p.omega_c - p.omega);
  // 2x2 solve by elimination: sigma = g a / dd.
  if (std::abs(dd) < 1e-15)
    throw error("reflection_steady_state_oracle: singular dipole line");
  const cd denom = dc + p.g * p.g / dd;
  if (std::abs(denom) < 1e-15)
    throw error("reflection_steady_state_oracle: singular cavity line");
  const cd a = -std::sqrt(p.kappa) / denom;
  return 1.0 + std::sqrt(p.kappa) * a;
}

double cooperativity(const PhysicalParams& p) {
  if (p.kappa <= 0.0 || p.gamma <= 0.0)
    throw error("cooperativity: kappa and gamma must be positive");
  return 4.0 * p.g * p.g / (p.kappa * p.gamma);
}

Detunings detunings(const PhysicalParams& p) {
  return {2.0 * (p.omega_down - p.omega) / p.gamma,
          2.0 * (p.omega_up - p.omega) / p.gamma,
          2.0 * (p.omega_c - p.omega) / p.kappa};
}

CavityParams to_dimensionless(const PhysicalParams& p) {
  const Detunings d = detunings(p);
  return {cooperativity(p), d.delta_down, d.delta_up, d.delta_c, std::nullopt};
}

}  // namespace qsim
