#pragma once
// Text netlist format for hybrid photon-spin circuits, plus the built-in
// gate circuit.
//
// Grammar (one instruction per line, `#` starts a comment, keywords are
// case-insensitive, LF or CRLF line endings):
//
//   paths <n1> <n2> ...          declare path labels (may repeat; union)
//   spins <k>                    declare spin count (1..4)
//   bs <pathU> <pathD>
//   pbs <inA> [<inB>] -> <outT> <outR>
//   qwp <path>
//   x <path>
//   pz <path>
//   cavity <spin#> <path>
//   spinh <spin#>
//   spinz <spin#> [+|-]
//   detect <path> <H|V> <name>
//
// Declarations must precede use.  The photon input port of a circuit is
// (first declared path, H).  Reflection coefficients are not part of the
// netlist; they are resolved per spin at run time (parsed CavityScatter
// elements carry the ideal +1/-1 defaults).  A PhasePlate with
// `conventional = true` is programmatic-only and not expressible here.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qsim/elements.hh"

namespace qsim {

struct Diagnostic {
  int line = 0;  // 1-based source line; 0 for programmatic circuits
  enum class Severity { error, warning } severity = Severity::error;
  std::string message;
};

struct Circuit {
  std::vector<int> paths;  // declaration order; front() is the input path
  int spins = 0;
  std::vector<Element> elements;

  // --- metadata (excluded from structural equality) ---
  // 1-based source line per element; empty for programmatic circuits.
  std::vector<int> element_lines;
  // Element-count prefixes marking the built-in circuit's stage snapshots
  // (7 entries, stages 0..6); empty for parsed circuits.
  std::vector<std::size_t> stage_boundaries;
  // Indices of CavityScatter elements that realize microwave-sandwiched
  // spin flips; the routing-only loss convention normalizes these to unit
  // modulus.  Set only by builtin_gate_circuit.
  std::vector<std::size_t> flip_cavities;

  PhotonMode input_mode() const;
  std::vector<Detect> detectors() const;
  std::vector<PhotonMode> detector_ports() const;

  // Structural equality: paths, spins, elements (metadata ignored).
  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.paths == b.paths && a.spins == b.spins && a.elements == b.elements;
  }
};

struct ParseResult {
  std::optional<Circuit> circuit;
  std::vector<Diagnostic> diagnostics;
  bool ok() const;  // circuit present and no error-severity diagnostics
};

// Total on arbitrary bytes: returns a Circuit or error diagnostics with
// line numbers, never throws on malformed input.
ParseResult parse_circuit(const std::string& source);

// Canonical netlist text; parse_circuit(serialize(c)) reparses to a
// structurally equal circuit.  Deterministic.
std::string serialize(const Circuit& c);

// Structural validation: declared references, PBS port sanity, spin ranges,
// unique detector names, detector-port terminality.  An empty list means
// the circuit is valid.
std::vector<Diagnostic> validate(const Circuit& c);

// The six-stage gate circuit reconstructed from the analytic state
// evolution (the stage checkpoints pin every wiring and sign choice).
// Carries stage_boundaries and flip_cavities metadata.
Circuit builtin_gate_circuit();

}  // namespace qsim
