#include "qsim/circuit.hh"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace qsim {

PhotonMode Circuit::input_mode() const {
  if (paths.empty()) throw error("circuit declares no paths");
  return {paths.front(), Pol::H};
}

std::vector<Detect> Circuit::detectors() const {
  std::vector<Detect> out;
  for (const Element& e : elements)
    if (const auto* d = std::get_if<Detect>(&e)) out.push_back(*d);
  return out;
}

std::vector<PhotonMode> Circuit::detector_ports() const {
  std::vector<PhotonMode> out;
  for (const Detect& d : detectors()) out.push_back({d.path, d.pol});
  return out;
}

bool ParseResult::ok() const {
  if (!circuit) return false;
  return std::none_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::error;
  });
}

namespace {

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

bool parse_int(const std::string& tok, int& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

struct Parser {
  std::vector<Diagnostic> diags;
  Circuit c;
  std::set<int> declared_paths;
  bool spins_declared = false;

  void err(int line, std::string msg) {
    diags.push_back({line, Diagnostic::Severity::error, std::move(msg)});
  }

  bool path_arg(int line, const std::string& tok, int& out) {
    if (!parse_int(tok, out)) {
      err(line, "expected a path label, got '" + tok + "'");
      return false;
    }
    if (!declared_paths.count(out)) {
      err(line, "undeclared path " + std::to_string(out));
      return false;
    }
    return true;
  }

  bool spin_arg(int line, const std::string& tok, int& out) {
    if (!parse_int(tok, out)) {
      err(line, "expected a spin index, got '" + tok + "'");
      return false;
    }
    if (out < 1 || out > c.spins) {
      err(line, "undeclared spin " + std::to_string(out));
      return false;
    }
    return true;
  }

  void add(int line, Element e) {
    c.elements.push_back(std::move(e));
    c.element_lines.push_back(line);
  }

  void instruction(int line, const std::vector<std::string>& tok) {
    const std::string kw = lower(tok[0]);
    const std::size_t argc = tok.size() - 1;
    if (kw == "paths") {
      if (argc == 0) return err(line, "paths: expected at least one label");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        int p;
        if (!parse_int(tok[i], p))
          return err(line, "paths: bad label '" + tok[i] + "'");
        if (!declared_paths.insert(p).second)
          return err(line, "paths: duplicate label " + std::to_string(p));
        c.paths.push_back(p);
      }
    } else if (kw == "spins") {
      int k;
      if (argc != 1 || !parse_int(tok[1], k))
        return err(line, "spins: expected one count");
      if (spins_declared) return err(line, "spins: already declared");
      if (k < 1 || k > 4)
        return err(line, "spins: count must be between 1 and 4");
      c.spins = k;
      spins_declared = true;
    } else if (kw == "bs") {
      int u, d;
      if (argc != 2) return err(line, "bs: expected 2 paths");
      if (path_arg(line, tok[1], u) && path_arg(line, tok[2], d))
        add(line, BeamSplitter{u, d});
    } else if (kw == "pbs") {
      // pbs <inA> [<inB>] -> <outT> <outR>
      const auto arrow = std::find(tok.begin() + 1, tok.end(), "->");
      const std::size_t ins = static_cast<std::size_t>(arrow - tok.begin()) - 1;
      if (arrow == tok.end() || (ins != 1 && ins != 2) || tok.end() - arrow != 3)
        return err(line, "pbs: expected '<inA> [<inB>] -> <outT> <outR>'");
      Pbs p;
      int v;
      if (!path_arg(line, tok[1], v)) return;
      p.in_a = v;
      if (ins == 2) {
        if (!path_arg(line, tok[2], v)) return;
        p.in_b = v;
      }
      if (!path_arg(line, *(arrow + 1), v)) return;
      p.out_t = v;
      if (!path_arg(line, *(arrow + 2), v)) return;
      p.out_r = v;
      add(line, p);
    } else if (kw == "qwp" || kw == "x" || kw == "pz") {
      int p;
      if (argc != 1) return err(line, kw + ": expected 1 path");
      if (!path_arg(line, tok[1], p)) return;
      if (kw == "qwp")
        add(line, QuarterWave{p});
      else if (kw == "x")
        add(line, HalfWaveX{p});
      else
        add(line, PhasePlate{p});
    } else if (kw == "cavity") {
      int k, p;
      if (argc != 2) return err(line, "cavity: expected '<spin#> <path>'");
      if (spin_arg(line, tok[1], k) && path_arg(line, tok[2], p))
        add(line, CavityScatter{k, p});
    } else if (kw == "spinh") {
      int k;
      if (argc != 1) return err(line, "spinh: expected 1 spin index");
      if (spin_arg(line, tok[1], k)) add(line, SpinHadamard{k});
    } else if (kw == "spinz") {
      int k;
      if (argc != 1 && argc != 2)
        return err(line, "spinz: expected '<spin#> [+|-]'");
      if (!spin_arg(line, tok[1], k)) return;
      int sign = +1;
      if (argc == 2) {
        if (tok[2] == "+")
          sign = +1;
        else if (tok[2] == "-")
          sign = -1;
        else
          return err(line, "spinz: sign must be '+' or '-'");
      }
      add(line, SpinZ{k, sign});
    } else if (kw == "detect") {
      int p;
      if (argc != 3) return err(line, "detect: expected '<path> <H|V> <name>'");
      if (!path_arg(line, tok[1], p)) return;
      const std::string pol = lower(tok[2]);
      if (pol != "h" && pol != "v")
        return err(line, "detect: polarization must be H or V");
      add(line, Detect{p, pol == "h" ? Pol::H : Pol::V, tok[3]});
    } else {
      err(line, "unknown keyword '" + tok[0] + "'");
    }
  }
};

}  // namespace

ParseResult parse_circuit(const std::string& source) {
  Parser ps;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const std::size_t nl = source.find('\n', pos);
    std::string line = source.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? source.size() + 1 : nl + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::vector<std::string> tok;
    std::istringstream is(line);
    for (std::string t; is >> t;) tok.push_back(std::move(t));
    if (tok.empty()) continue;
    ps.instruction(line_no, tok);
  }
  ParseResult r;
  r.diagnostics = std::move(ps.diags);
  if (std::none_of(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::error;
      }))
    r.circuit = std::move(ps.c);
  return r;
}

std::string serialize(const Circuit& c) {
  std::ostringstream os;
  os << "paths";
  for (int p : c.paths) os << ' ' << p;
  os << '\n' << "spins " << c.spins << '\n';
  for (const Element& e : c.elements) {
    std::visit(
        [&](const auto& el) {
          using T = std::decay_t<decltype(el)>;
          if constexpr (std::is_same_v<T, BeamSplitter>)
            os << "bs " << el.path_u << ' ' << el.path_d;
          else if constexpr (std::is_same_v<T, Pbs>) {
            os << "pbs " << el.in_a;
            if (el.in_b) os << ' ' << *el.in_b;
            os << " -> " << el.out_t << ' ' << el.out_r;
          } else if constexpr (std::is_same_v<T, QuarterWave>)
            os << "qwp " << el.path;
          else if constexpr (std::is_same_v<T, HalfWaveX>)
            os << "x " << el.path;
          else if constexpr (std::is_same_v<T, PhasePlate>)
            os << "pz " << el.path;
          else if constexpr (std::is_same_v<T, CavityScatter>)
            os << "cavity " << el.spin << ' ' << el.path;
          else if constexpr (std::is_same_v<T, SpinHadamard>)
            os << "spinh " << el.spin;
          else if constexpr (std::is_same_v<T, SpinZ>)
            os << "spinz " << el.spin << ' ' << (el.sign > 0 ? '+' : '-');
          else if constexpr (std::is_same_v<T, Detect>)
            os << "detect " << el.path << ' ' << (el.pol == Pol::H ? 'H' : 'V')
               << ' ' << el.name;
        },
        e);
    os << '\n';
  }
  return os.str();
}

namespace {

// Photon ports an element touches (reads, writes, or gates on).  Spin
// operators act only on the spin factor and commute with photon detection,
// so they touch no ports.
std::vector<PhotonMode> touched_ports(const Element& e) {
  std::vector<PhotonMode> out;
  auto both = [&](int path) {
    out.push_back({path, Pol::H});
    out.push_back({path, Pol::V});
  };
  std::visit(
      [&](const auto& el) {
        using T = std::decay_t<decltype(el)>;
        if constexpr (std::is_same_v<T, BeamSplitter>) {
          both(el.path_u);
          both(el.path_d);
        } else if constexpr (std::is_same_v<T, Pbs>) {
          both(el.in_a);
          if (el.in_b) both(*el.in_b);
          both(el.out_t);
          both(el.out_r);
        } else if constexpr (std::is_same_v<T, QuarterWave>)
          both(el.path);
        else if constexpr (std::is_same_v<T, HalfWaveX>)
          both(el.path);
        else if constexpr (std::is_same_v<T, PhasePlate>)
          both(el.path);
        else if constexpr (std::is_same_v<T, CavityScatter>)
          both(el.path);  // scatters H, polices V
        else if constexpr (std::is_same_v<T, Detect>)
          out.push_back({el.path, el.pol});
      },
      e);
  return out;
}

}  // namespace

std::vector<Diagnostic> validate(const Circuit& c) {
  std::vector<Diagnostic> diags;
  auto line_of = [&](std::size_t idx) {
    return idx < c.element_lines.size() ? c.element_lines[idx] : 0;
  };
  auto err = [&](std::size_t idx, std::string msg) {
    diags.push_back({line_of(idx), Diagnostic::Severity::error, std::move(msg)});
  };

  const std::set<int> declared(c.paths.begin(), c.paths.end());
  if (declared.size() != c.paths.size())
    diags.push_back({0, Diagnostic::Severity::error, "duplicate path labels"});

  std::set<std::string> names;
  std::map<std::pair<int, int>, std::size_t> terminated;  // port -> detect idx

  for (std::size_t i = 0; i < c.elements.size(); ++i) {
    const Element& e = c.elements[i];
    for (const PhotonMode& m : touched_ports(e))
      if (!declared.count(m.path))
        err(i, "undeclared path " + std::to_string(m.path));
    std::visit(
        [&](const auto& el) {
          using T = std::decay_t<decltype(el)>;
          if constexpr (std::is_same_v<T, Pbs>) {
            if (el.out_t == el.out_r)
              err(i, "pbs: duplicate outputs " + std::to_string(el.out_t));
            if (el.in_b && *el.in_b == el.in_a)
              err(i, "pbs: duplicate inputs " + std::to_string(el.in_a));
          } else if constexpr (std::is_same_v<T, BeamSplitter>) {
            if (el.path_u == el.path_d)
              err(i, "bs: identical ports " + std::to_string(el.path_u));
          } else if constexpr (std::is_same_v<T, CavityScatter>) {
            if (el.spin < 1 || el.spin > c.spins)
              err(i, "cavity: spin index out of range");
          } else if constexpr (std::is_same_v<T, SpinHadamard>) {
            if (el.spin < 1 || el.spin > c.spins)
              err(i, "spinh: spin index out of range");
          } else if constexpr (std::is_same_v<T, SpinZ>) {
            if (el.spin < 1 || el.spin > c.spins)
              err(i, "spinz: spin index out of range");
          } else if constexpr (std::is_same_v<T, Detect>) {
            if (!names.insert(el.name).second)
              err(i, "detect: duplicate detector name '" + el.name + "'");
          }
        },
        e);
    // Detector terminality: no element may touch a port after a detect
    // claimed it (a detect on the sibling polarization is fine).
    for (const PhotonMode& m : touched_ports(e)) {
      auto it = terminated.find({m.path, static_cast<int>(m.pol)});
      if (it != terminated.end())
        err(i, "element touches detector port (path " + std::to_string(m.path) +
                   ", " + (m.pol == Pol::H ? "H" : "V") +
                   ") after its detect");
    }
    if (const auto* d = std::get_if<Detect>(&e))
      terminated[{d->path, static_cast<int>(d->pol)}] = i;
  }
  return diags;
}

Circuit builtin_gate_circuit() {
  Circuit c;
  for (int p = 3; p <= 28; ++p) c.paths.push_back(p);
  c.spins = 4;
  auto push = [&](Element e) { c.elements.push_back(std::move(e)); };
  auto mark_boundary = [&] { c.stage_boundaries.push_back(c.elements.size()); };
  auto push_flip_cavity = [&](int spin, int path) {
    c.flip_cavities.push_back(c.elements.size());
    push(CavityScatter{spin, path});
  };

  mark_boundary();  // stage 0: the prepared input state

  // Stage 1 -- control routing: nested balanced interferometers send the
  // photon to path 3/4/6/5 for control value 0/1/2/3.
  push(BeamSplitter{3, 6});
  push(CavityScatter{1, 6});
  push(BeamSplitter{3, 6});
  push(BeamSplitter{3, 4});
  push(BeamSplitter{6, 5});
  push(CavityScatter{2, 4});
  push(CavityScatter{2, 5});
  push(BeamSplitter{3, 4});
  push(BeamSplitter{6, 5});
  mark_boundary();

  // Stage 2 -- microwave-sandwiched reflections flip spin 4 on paths 4, 5.
  push(SpinHadamard{4});
  push_flip_cavity(4, 4);
  push_flip_cavity(4, 5);
  push(SpinHadamard{4});
  mark_boundary();

  // Stage 3 -- polarization interferometers on paths 4, 5 entangle the
  // photon polarization with spin 4.
  push(QuarterWave{4});
  push(QuarterWave{5});
  push(Pbs{4, std::nullopt, 9, 10});
  push(Pbs{5, std::nullopt, 11, 12});
  push(CavityScatter{4, 9});
  push(CavityScatter{4, 11});
  push(Pbs{9, 10, 4, 13});
  push(Pbs{11, 12, 5, 14});
  push(QuarterWave{4});
  push(QuarterWave{5});
  mark_boundary();

  // Stage 4 -- sandwiched spin-3 flips, polarization-conditional: the
  // transmitted arm of path 4 and the reflected (x-wrapped) arm of path 5,
  // plus path 6 directly.  The pz plate sits on the reflected arm after
  // the second x plate, before the merge.
  push(SpinHadamard{3});
  push(Pbs{4, std::nullopt, 15, 16});
  push(Pbs{5, std::nullopt, 17, 18});
  push(HalfWaveX{18});
  push_flip_cavity(3, 15);
  push_flip_cavity(3, 18);
  push_flip_cavity(3, 6);
  push(HalfWaveX{18});
  push(PhasePlate{18});
  push(Pbs{15, 16, 4, 19});
  push(Pbs{17, 18, 5, 20});
  push(SpinHadamard{3});
  mark_boundary();

  // Stage 5 -- second polarization interferometers on paths 4, 5 (cavity
  // on the transmitted arm of 4, on the x-wrapped reflected arm of 5),
  // then polarization cleanup and the merges onto detection paths 7, 8.
  push(QuarterWave{4});
  push(QuarterWave{5});
  push(Pbs{4, std::nullopt, 21, 22});
  push(Pbs{5, std::nullopt, 23, 24});
  push(CavityScatter{4, 21});
  push(HalfWaveX{24});
  push(CavityScatter{4, 24});
  push(HalfWaveX{24});
  push(Pbs{21, 22, 4, 25});
  push(Pbs{23, 24, 5, 26});
  push(QuarterWave{4});
  push(QuarterWave{5});
  push(HalfWaveX{4});
  push(HalfWaveX{5});
  push(Pbs{3, 4, 7, 27});
  push(Pbs{6, 5, 8, 28});
  mark_boundary();

  // Stage 6 -- final mixing and polarization-resolved detection.
  push(QuarterWave{7});
  push(QuarterWave{8});
  push(BeamSplitter{7, 8});
  mark_boundary();

  push(Detect{7, Pol::H, "D_H1"});
  push(Detect{7, Pol::V, "D_H2"});
  push(Detect{8, Pol::H, "D_V1"});
  push(Detect{8, Pol::V, "D_V2"});
  return c;
}

}  // namespace qsim
