#pragma once
// Spin-dependent reflection off a single-sided cavity containing one SiV
// spin, in the weak-excitation limit (<sigma_z> fixed at -1).
//
// Dimensionless-first API: the closed-form coefficient takes the
// cooperativity C and effective detunings directly.  PhysicalParams is a
// convenience layer over raw rates/frequencies, and the steady-state
// oracle solves the Langevin equations from those, providing an
// independent cross-check of the closed form.

#include <complex>
#include <optional>
#include <utility>

namespace qsim {

using cd = std::complex<double>;

enum class Spin { down, up };

struct CavityParams {
  double C = 0.0;           // cooperativity, >= 0
  double delta_down = 0.0;  // dimensionless dipole detuning for spin down
  double delta_up = 0.0;    // ... for spin up
  double delta_c = 0.0;     // dimensionless cavity detuning
  // When set, supersedes the formula entirely (used by the metric sweeps,
  // which treat |r| as the independent variable).
  std::optional<std::pair<cd, cd>> override_r;  // (r_down, r_up)
};

struct PhysicalParams {
  double g = 0.0;       // spin-cavity coupling rate (angular frequency)
  double kappa = 0.0;   // cavity field decay rate
  double gamma = 0.0;   // dipole decay rate
  double omega = 0.0;   // input photon frequency
  double omega_c = 0.0; // cavity resonance
  double omega_down = 0.0, omega_up = 0.0;  // dipole transitions
};

// r_d = 1 - 2(1 + i Delta_d) / (C + (1 + i Delta_d)(1 + i Delta_c)).
// Honors the override when present.  Near-zero denominator is a
// singular-parameter error.
cd reflection_coefficient(const CavityParams& p, Spin spin);

// Steady state of the Langevin pair (d a/dt = d sigma-/dt = 0) with the
// input-output relation a_out = a_in + sqrt(kappa) a.  The sign convention
// of the coupling terms is fixed so that the solution reproduces the closed
// form above exactly (conventions differ across the literature; this is the
// one consistent with the dimensionless formula).
cd reflection_steady_state_oracle(const PhysicalParams& p, Spin spin);

// C = 4 g^2 / (kappa gamma)
double cooperativity(const PhysicalParams& p);

struct Detunings {
  double delta_down = 0.0, delta_up = 0.0, delta_c = 0.0;
};

// Delta_d = 2(omega_d - omega)/gamma, Delta_c = 2(omega_c - omega)/kappa
Detunings detunings(const PhysicalParams& p);

// CavityParams equivalent of a physical parameter set.
CavityParams to_dimensionless(const PhysicalParams& p);

}  // namespace qsim
