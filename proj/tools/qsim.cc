// qsim: command-line front end for the photon-mediated 4x4 CNOT simulator.
//
// Subcommands:
//   verify       staged-evolution checkpoint suite + feed-forward fixture
//   truth-table  16-row conversion table (or full matrix as JSON)
//   simulate     one protocol run, ProtocolResult JSON
//   sweep        efficiency/fidelity/min-conversion CSV over a grid of r
//   reflection   cavity reflection coefficients, formula vs. oracle
//
// Exit codes: 0 success, 1 verification/physics failure, 2 usage/parse error.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsim/cavity.hh"
#include "qsim/circuit.hh"
#include "qsim/metrics.hh"
#include "qsim/protocol.hh"
#include "qsim/state.hh"

namespace {

using qsim::cd;

// Problems with how the tool was invoked (bad flags, bad files, malformed
// numbers) exit 2; physics failures exit 1.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_real(const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw usage_error("cannot parse number '" + text + "'");
  }
  if (pos != text.size())
    throw usage_error("cannot parse number '" + text + "'");
  return v;
}

// Accepts "0.5", "-0.7i", "0.5+0.5i", "1e-3-2e-3i", "i", "-i" (also 'j').
cd parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw usage_error("empty amplitude entry");
  const char tail = static_cast<char>(std::tolower(static_cast<unsigned char>(s.back())));
  if (tail != 'i' && tail != 'j') return cd(parse_real(s), 0.0);

  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    const char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string::npos) return cd(0.0, imag_of(body));
  return cd(parse_real(body.substr(0, split)), imag_of(body.substr(split)));
}

// Four comma-separated complex amplitudes in descending qudit order
// (first entry multiplies |3>).  Renormalizes small deviations with a
// warning; deviations beyond 1e-6 are rejected.
std::array<cd, 4> parse_amps(const std::string& text, const char* which) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw usage_error(std::string(which) +
                      " needs exactly 4 comma-separated amplitudes");
  std::array<cd, 4> amps;
  for (int k = 0; k < 4; ++k) amps[k] = parse_complex(parts[k]);
  double n2 = 0.0;
  for (const cd& z : amps) n2 += std::norm(z);
  if (n2 <= 0.0) throw usage_error(std::string(which) + " amplitudes are all zero");
  const double n = std::sqrt(n2);
  if (std::abs(n - 1.0) > 1e-6)
    throw usage_error(std::string(which) + " amplitudes are not normalized: |.| = " +
                      std::to_string(n) + " (renormalization threshold 1e-6)");
  if (std::abs(n - 1.0) > 1e-12)
    std::cerr << "warning: renormalizing " << which << " amplitudes (|.| = "
              << n << ")\n";
  for (cd& z : amps) z *= 1.0 / n;
  return amps;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw usage_error("cannot open output file: " + out_path);
  out << text;
}

// Loads and validates a netlist; empty path means the built-in gate.  A
// parsed circuit with the built-in shape inherits the built-in stage
// boundaries (for checkpointing), and -- only on exact element equality --
// its flip-reflection marks.
qsim::Circuit load_circuit(const std::string& path) {
  if (path.empty()) return qsim::builtin_gate_circuit();
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open circuit file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  qsim::ParseResult pr = qsim::parse_circuit(ss.str());
  auto print_diags = [&](const std::vector<qsim::Diagnostic>& ds) {
    bool bad = false;
    for (const qsim::Diagnostic& d : ds) {
      const bool err = d.severity == qsim::Diagnostic::Severity::error;
      bad = bad || err;
      std::cerr << path << ":" << d.line << ": " << (err ? "error" : "warning")
                << ": " << d.message << "\n";
    }
    return bad;
  };
  print_diags(pr.diagnostics);
  if (!pr.ok()) throw usage_error("circuit failed to parse");
  if (print_diags(qsim::validate(*pr.circuit)))
    throw usage_error("circuit failed validation");

  qsim::Circuit c = *pr.circuit;
  const qsim::Circuit b = qsim::builtin_gate_circuit();
  if (c.paths == b.paths && c.spins == b.spins &&
      c.elements.size() == b.elements.size()) {
    c.stage_boundaries = b.stage_boundaries;
    if (c.elements == b.elements) c.flip_cavities = b.flip_cavities;
  }
  return c;
}

std::array<cd, 4> random_unit4(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<cd, 4> v;
  double n2 = 0.0;
  for (cd& z : v) {
    z = cd(u(rng), u(rng));
    n2 += std::norm(z);
  }
  for (cd& z : v) z *= 1.0 / std::sqrt(n2);
  return v;
}

int cmd_verify(const std::string& circuit_path, double r, int trials) {
  qsim::Circuit c = load_circuit(circuit_path);

  if (r != 1.0) {
    std::cout << "reflection magnitude r = " << r
              << " is not ideal; stage checkpoints are skipped\n";
    const qsim::GateMetrics m =
        qsim::gate_metrics(qsim::gate_action(c, qsim::RunParams::swept(r)));
    std::cout << qsim::metrics_json(m, r) << "\n";
    return 0;
  }

  if (c.stage_boundaries.size() != 7)
    throw usage_error("circuit carries no stage-boundary metadata and cannot "
                      "be checkpointed");
  if (trials < 1) throw usage_error("--trials must be >= 1");

  std::mt19937_64 rng(1234u);
  std::array<double, 7> worst{};
  double worst_branch = 0.0, worst_quarter = 0.0;
  bool four_branches = true;
  for (int t = 0; t < trials; ++t) {
    const auto alpha = random_unit4(rng);
    const auto gamma = random_unit4(rng);
    const qsim::ProtocolResult res =
        qsim::run_protocol(c, qsim::RunParams{}, alpha, gamma);
    if (res.checkpoints.size() != 7)
      throw usage_error("stage checkpoints were not evaluated for this circuit");
    for (const qsim::StageCheckpoint& cp : res.checkpoints)
      worst[static_cast<std::size_t>(cp.stage)] =
          std::max(worst[static_cast<std::size_t>(cp.stage)], cp.distance);

    const qsim::SpinState ideal = qsim::ideal_output_spin(alpha, gamma);
    four_branches = four_branches && res.branches.size() == 4;
    for (const qsim::OutcomeBranch& b : res.branches) {
      qsim::SpinState unit = b.corrected_spin;
      const double bn = std::sqrt(b.probability);
      if (bn > 0.0)
        for (cd& z : unit) z *= 1.0 / bn;
      worst_branch = std::max(worst_branch, qsim::state_distance(unit, ideal));
      worst_quarter = std::max(worst_quarter, std::abs(b.probability - 0.25));
    }
  }

  int passed = 0;
  for (int s = 0; s < 7; ++s) {
    const bool ok = worst[static_cast<std::size_t>(s)] < 1e-10;
    passed += ok ? 1 : 0;
    std::printf("stage %d: max distance %.3e over %d trials %s\n", s,
                worst[static_cast<std::size_t>(s)], trials,
                ok ? "(ok)" : "(FAIL)");
  }
  const bool ff_ok =
      four_branches && worst_branch < 1e-10 && worst_quarter < 1e-10;
  std::printf(
      "feed-forward: max corrected-branch distance %.3e, max |p - 1/4| %.3e %s\n",
      worst_branch, worst_quarter, ff_ok ? "(ok)" : "(FAIL)");
  std::printf("%d/7 checkpoints pass\n", passed);
  return (passed == 7 && ff_ok) ? 0 : 1;
}

int cmd_truth_table(double r, bool as_json) {
  const qsim::Circuit c = qsim::builtin_gate_circuit();
  const qsim::GateMetrics m =
      qsim::gate_metrics(qsim::gate_action(c, qsim::RunParams::swept(r)));
  if (as_json) {
    std::cout << qsim::metrics_json(m, r) << "\n";
    return 0;
  }
  std::printf("truth table at r = %.6f (probability of the ideal output)\n", r);
  for (int ctrl = 0; ctrl < 4; ++ctrl)
    for (int tgt = 0; tgt < 4; ++tgt) {
      const auto [oc, ot] = qsim::ideal_cnot44(ctrl, tgt);
      std::printf("|%d_c, %d_t>  ->  |%d_c, %d_t>   %.6f\n", ctrl, tgt, oc, ot,
                  m.conversion[static_cast<std::size_t>(qsim::config_of(ctrl, tgt))]
                              [static_cast<std::size_t>(qsim::config_of(oc, ot))]);
    }
  std::printf("min conversion probability: %.6f\n", m.min_conversion);
  return 0;
}

int cmd_simulate(const std::string& circuit_path, const std::string& r_down,
                 const std::string& r_up, const std::string& control,
                 const std::string& target, const std::string& loss_model,
                 const std::string& out_path) {
  const qsim::Circuit c = load_circuit(circuit_path);
  qsim::RunParams params =
      qsim::RunParams::overridden(parse_complex(r_down), parse_complex(r_up));
  if (loss_model == "routing")
    params.loss_model = qsim::LossModel::routing_only;
  else if (loss_model == "absorbing")
    params.loss_model = qsim::LossModel::absorbing;
  else
    throw usage_error("--loss-model must be 'routing' or 'absorbing'");
  const std::array<cd, 4> a = parse_amps(control, "control");
  const std::array<cd, 4> g = parse_amps(target, "target");
  const qsim::ProtocolResult res = qsim::run_protocol(c, params, a, g);
  emit(qsim::to_json(res, a, g) + "\n", out_path);
  return 0;
}

int cmd_sweep(const std::string& circuit_path, double r_min, double r_max,
              int steps, const std::string& out_path) {
  const qsim::Circuit c = load_circuit(circuit_path);
  std::vector<qsim::SweepRow> rows;
  try {
    rows = qsim::sweep(c, r_min, r_max, steps);
  } catch (const qsim::error& e) {
    throw usage_error(e.what());  // range/step complaints are usage problems
  }
  emit(qsim::sweep_csv(rows), out_path);
  return 0;
}

int cmd_reflection(const CLI::App* sub, double C, double delta_down,
                   double delta_up, double delta_c, double g, double gamma,
                   double kappa, double omega, double omega_c,
                   double omega_down, double omega_up, bool two_pi_ghz) {
  qsim::CavityParams cp;
  qsim::PhysicalParams pp;
  if (sub->count("--C") != 0) {
    cp.C = C;
    cp.delta_down = delta_down;
    cp.delta_up = delta_up;
    cp.delta_c = delta_c;
    // Synthetic physical realization of the same dimensionless point
    // (gamma = kappa = 2 makes the detunings literal frequency offsets).
    pp.gamma = 2.0;
    pp.kappa = 2.0;
    pp.g = std::sqrt(C);
    pp.omega = 0.0;
    pp.omega_down = delta_down;
    pp.omega_up = delta_up;
    pp.omega_c = delta_c;
  } else if (sub->count("--g") != 0 && sub->count("--gamma") != 0 &&
             sub->count("--kappa") != 0) {
    const double scale = two_pi_ghz ? 2.0 * M_PI * 1e9 : 1.0;
    pp.g = g * scale;
    pp.gamma = gamma * scale;
    pp.kappa = kappa * scale;
    pp.omega = omega * scale;
    pp.omega_c = omega_c * scale;
    pp.omega_down = omega_down * scale;
    pp.omega_up = omega_up * scale;
    cp = qsim::to_dimensionless(pp);
  } else {
    throw usage_error(
        "reflection needs either --C (with --delta-*) or all of --g, "
        "--gamma, --kappa");
  }

  std::printf("cooperativity C = %.6f\n", qsim::cooperativity(pp));
  std::printf("detunings: delta_down = %.6f, delta_up = %.6f, delta_c = %.6f\n",
              cp.delta_down, cp.delta_up, cp.delta_c);
  std::printf("%-7s %28s %28s\n", "", "dimensionless formula",
              "steady-state oracle");
  double worst = 0.0;
  for (const auto& [label, spin] :
       {std::pair<const char*, qsim::Spin>{"r_down", qsim::Spin::down},
        std::pair<const char*, qsim::Spin>{"r_up", qsim::Spin::up}}) {
    const cd f = qsim::reflection_coefficient(cp, spin);
    const cd o = qsim::reflection_steady_state_oracle(pp, spin);
    worst = std::max(worst, std::abs(f - o));
    std::printf("%-7s %15.9f %+12.9fi %15.9f %+12.9fi   |r| = %.6f\n", label,
                f.real(), f.imag(), o.real(), o.imag(), std::abs(f));
  }
  std::printf("max |formula - oracle| = %.3e\n", worst);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic state-vector simulator for a photon-mediated "
               "4x4 CNOT gate on cavity-coupled spins"};
  app.require_subcommand(1);
  int rc = 0;

  // verify
  std::string v_circuit;
  double v_r = 1.0;
  int v_trials = 100;
  CLI::App* verify =
      app.add_subcommand("verify", "run the staged checkpoint suite");
  verify->add_option("--circuit", v_circuit, "netlist file (default: built-in gate)");
  verify->add_option("--r", v_r,
                     "reflection magnitude; values != 1 skip checkpoints and "
                     "print gate metrics instead");
  verify->add_option("--trials", v_trials, "random input draws (default 100)");
  verify->callback([&] { rc = cmd_verify(v_circuit, v_r, v_trials); });

  // truth-table
  double t_r = 1.0;
  bool t_json = false;
  CLI::App* tt = app.add_subcommand("truth-table",
                                    "16-row basis conversion table");
  tt->add_option("--r", t_r, "reflection magnitude (default 1)");
  tt->add_flag("--json", t_json, "print the full 16x16 matrix as JSON");
  tt->callback([&] { rc = cmd_truth_table(t_r, t_json); });

  // simulate
  std::string s_circuit, s_rd = "1", s_ru = "-1", s_out;
  std::string s_control = "0.5,0.5,0.5,0.5", s_target = "0.5,0.5,0.5,0.5";
  std::string s_loss = "routing";
  CLI::App* sim = app.add_subcommand("simulate",
                                     "run the protocol once, print JSON");
  sim->add_option("--circuit", s_circuit, "netlist file (default: built-in gate)");
  sim->add_option("--r-down", s_rd, "spin-down reflection (complex, default 1)");
  sim->add_option("--r-up", s_ru, "spin-up reflection (complex, default -1)");
  sim->add_option("--control", s_control,
                  "4 amplitudes, descending (|3>,|2>,|1>,|0>), default uniform");
  sim->add_option("--target", s_target, "4 amplitudes, descending, default uniform");
  sim->add_option("--loss-model", s_loss, "'routing' (default) or 'absorbing'");
  sim->add_option("--out", s_out, "write JSON here instead of stdout");
  sim->callback([&] {
    rc = cmd_simulate(s_circuit, s_rd, s_ru, s_control, s_target, s_loss, s_out);
  });

  // sweep
  std::string w_circuit, w_out;
  double w_min = 0.9, w_max = 1.0;
  int w_steps = 11;
  CLI::App* sw = app.add_subcommand("sweep", "metrics CSV over a grid of r");
  sw->add_option("--circuit", w_circuit, "netlist file (default: built-in gate)");
  sw->add_option("--r-min", w_min, "lowest reflection magnitude (default 0.9)");
  sw->add_option("--r-max", w_max, "highest reflection magnitude (default 1.0)");
  sw->add_option("--steps", w_steps, "grid points, inclusive (default 11)");
  sw->add_option("--out", w_out, "write CSV here instead of stdout");
  sw->callback([&] { rc = cmd_sweep(w_circuit, w_min, w_max, w_steps, w_out); });

  // reflection
  double r_C = 0.0, r_dd = 0.0, r_du = 0.0, r_dc = 0.0;
  double r_g = 0.0, r_gamma = 0.0, r_kappa = 0.0;
  double r_w = 0.0, r_wc = 0.0, r_wd = 0.0, r_wu = 0.0;
  bool r_tpg = false;
  CLI::App* refl = app.add_subcommand(
      "reflection", "cavity reflection coefficients, formula vs. oracle");
  refl->add_option("--C", r_C, "cooperativity (dimensionless mode)");
  refl->add_option("--delta-down", r_dd, "dipole detuning, spin down");
  refl->add_option("--delta-up", r_du, "dipole detuning, spin up");
  refl->add_option("--delta-c", r_dc, "cavity detuning");
  refl->add_option("--g", r_g, "coupling rate (physical mode)");
  refl->add_option("--gamma", r_gamma, "dipole decay rate");
  refl->add_option("--kappa", r_kappa, "cavity decay rate");
  refl->add_option("--omega", r_w, "photon frequency (default 0)");
  refl->add_option("--omega-c", r_wc, "cavity resonance (default 0)");
  refl->add_option("--omega-down", r_wd, "spin-down dipole frequency");
  refl->add_option("--omega-up", r_wu, "spin-up dipole frequency");
  refl->add_flag("--two-pi-ghz", r_tpg,
                 "interpret rates/frequencies as 2*pi*GHz");
  refl->callback([&] {
    rc = cmd_reflection(refl, r_C, r_dd, r_du, r_dc, r_g, r_gamma, r_kappa,
                        r_w, r_wc, r_wd, r_wu, r_tpg);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
