#pragma once
// Circuit elements as linear operators on HybridState.
//
// Semantics:
//   BeamSplitter(u, d):   N_u -> (N_u + N_d)/sqrt2, N_d -> (N_u - N_d)/sqrt2
//                         for both polarizations N in {H, V}
//   Pbs(inA, inB?, outT, outR):
//                         H from inA -> outT, V from inA -> outR;
//                         H from inB -> outR, V from inB -> outT
//   QuarterWave(path):    |H> -> (|H>+|V>)/sqrt2, |V> -> (|H>-|V>)/sqrt2
//   HalfWaveX(path):      |H> <-> |V>
//   PhasePlate(path):     multiplies both polarizations by -1 (a
//                         path-relative pi phase; see `conventional` below)
//   CavityScatter(k, path): amplitude on (path, H) with spin k down x r_down,
//                         with spin k up x r_up; V light incident on the
//                         path is a hard circuit-validity error
//   SpinHadamard(k):      |down> -> (|down>+|up>)/sqrt2,
//                         |up>   -> (|down>-|up>)/sqrt2  on spin k
//   SpinZ(k, sign):       sign * (|down><down| - |up><up|) on spin k
//   Detect(path, pol, name): projection marker; applied as a no-op by
//                         apply_element (projection happens in the protocol)

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qsim/state.hh"

namespace qsim {

struct BeamSplitter {
  int path_u = 0, path_d = 0;
  friend bool operator==(const BeamSplitter&, const BeamSplitter&) = default;
};

struct Pbs {
  int in_a = 0;
  std::optional<int> in_b;
  int out_t = 0, out_r = 0;
  friend bool operator==(const Pbs&, const Pbs&) = default;
};

struct QuarterWave {
  int path = 0;
  friend bool operator==(const QuarterWave&, const QuarterWave&) = default;
};

struct HalfWaveX {
  int path = 0;
  friend bool operator==(const HalfWaveX&, const HalfWaveX&) = default;
};

struct PhasePlate {
  int path = 0;
  // The default plate is -|H><H| - |V><V| (= -1 on the whole path);
  // `conventional = true` selects |H><H| - |V><V| instead.  The checkpoint
  // suite arbitrates between the two (in the gate circuit the plate sits on
  // a single-polarization arm, where they coincide).
  bool conventional = false;
  friend bool operator==(const PhasePlate&, const PhasePlate&) = default;
};

struct CavityScatter {
  int spin = 1;  // 1..4
  int path = 0;
  cd r_down{1.0, 0.0};
  cd r_up{-1.0, 0.0};
  friend bool operator==(const CavityScatter&, const CavityScatter&) = default;
};

struct SpinHadamard {
  int spin = 1;
  friend bool operator==(const SpinHadamard&, const SpinHadamard&) = default;
};

struct SpinZ {
  int spin = 1;
  int sign = +1;  // +1 or -1 overall factor
  friend bool operator==(const SpinZ&, const SpinZ&) = default;
};

struct Detect {
  int path = 0;
  Pol pol = Pol::H;
  std::string name;
  friend bool operator==(const Detect&, const Detect&) = default;
};

using Element = std::variant<BeamSplitter, Pbs, QuarterWave, HalfWaveX,
                             PhasePlate, CavityScatter, SpinHadamard, SpinZ,
                             Detect>;

// Applies the element in place.  Detect is a no-op marker.  Throws
// qsim::error for physics violations (V light at a cavity, amplitude
// already present on a PBS output that is not one of its inputs).
void apply_element(HybridState& state, const Element& e);

// Dense matrix of the element over an explicit ordered basis of
// (mode, config) pairs; testing aid.  The basis must cover the element's
// support (all declared paths of the state passed to apply_element).
struct ModeConfig {
  PhotonMode mode;
  int config = 0;
};
std::vector<std::vector<cd>> element_matrix(const Element& e,
                                            const std::vector<ModeConfig>& basis,
                                            const std::vector<int>& path_labels);

}  // namespace qsim
