#include "qcevo/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

#include "qcevo/gates.hpp"

namespace qcevo {

namespace {

std::string format_params(const GateSpec& gate) {
  const GateInfo& info = gate_info(gate.kind);
  if (info.num_params == 0) return "";
  std::string out = "(";
  char buf[32];
  for (int p = 0; p < info.num_params; ++p) {
    std::snprintf(buf, sizeof(buf), "%.3f", gate.params[static_cast<std::size_t>(p)]);
    if (p > 0) out += ",";
    out += buf;
  }
  out += ")";
  return out;
}

// Per-slot cell text for one gate column. Controls are dots, acted-on slots
// carry a boxed label; disabled gates swap in 'o' and angle brackets.
std::vector<std::string> slot_tokens(const GateSpec& gate) {
  const GateInfo& info = gate_info(gate.kind);
  const char* lb = gate.enabled ? "[" : "<";
  const char* rb = gate.enabled ? "]" : ">";
  const std::string ctrl = gate.enabled ? "*" : "o";
  auto box = [&](const std::string& label) { return lb + label + rb; };
  const std::string params = format_params(gate);

  std::vector<std::string> tokens(static_cast<std::size_t>(info.arity));
  switch (gate.kind) {
    case GateKind::Toffoli: tokens = {ctrl, ctrl, box("X")}; break;
    case GateKind::CCZ: tokens = {ctrl, ctrl, box("Z")}; break;
    case GateKind::CH: tokens = {ctrl, box("H")}; break;
    case GateKind::CPhase: tokens = {ctrl, box("P" + params)}; break;
    case GateKind::CRX: tokens = {ctrl, box("RX" + params)}; break;
    case GateKind::CRY: tokens = {ctrl, box("RY" + params)}; break;
    case GateKind::CRZ: tokens = {ctrl, box("RZ" + params)}; break;
    case GateKind::CSwap:
      tokens = {ctrl, gate.enabled ? "x" : "<x>", gate.enabled ? "x" : "<x>"};
      break;
    case GateKind::CX: tokens = {ctrl, box("X")}; break;
    case GateKind::CY: tokens = {ctrl, box("Y")}; break;
    case GateKind::CZ: tokens = {ctrl, box("Z")}; break;
    case GateKind::H: tokens = {box("H")}; break;
    case GateKind::Identity: tokens = {box("I")}; break;
    case GateKind::ISwap: tokens = {box("iSwap"), box("iSwap")}; break;
    case GateKind::Phase: tokens = {box("P" + params)}; break;
    case GateKind::RX: tokens = {box("RX" + params)}; break;
    case GateKind::RY: tokens = {box("RY" + params)}; break;
    case GateKind::RZ: tokens = {box("RZ" + params)}; break;
    case GateKind::RZZ: tokens = {box("RZZ" + params), box("RZZ" + params)}; break;
    case GateKind::S: tokens = {box("S")}; break;
    case GateKind::Swap:
      tokens = {gate.enabled ? "x" : "<x>", gate.enabled ? "x" : "<x>"};
      break;
    case GateKind::T: tokens = {box("T")}; break;
    case GateKind::U: tokens = {box("U" + params)}; break;
    case GateKind::X: tokens = {box("X")}; break;
    case GateKind::Y: tokens = {box("Y")}; break;
    case GateKind::Z: tokens = {box("Z")}; break;
  }
  return tokens;
}

std::string center_on_wire(const std::string& token, std::size_t width) {
  std::size_t pad = width - token.size();
  std::size_t left = pad / 2;
  return std::string(left, '-') + token + std::string(pad - left, '-');
}

}  // namespace

std::string render_circuit(const CircuitGenome& genome) {
  const int n = genome.num_qubits;
  std::vector<std::string> rows(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "q%d:", q);
    rows[static_cast<std::size_t>(q)] = buf;
  }
  std::size_t prefix = 0;
  for (const std::string& r : rows) prefix = std::max(prefix, r.size());
  for (std::string& r : rows) r += std::string(prefix - r.size() + 1, ' ');
  for (std::string& r : rows) r += "--";

  for (const GateSpec& gate : genome.gates) {
    const GateInfo& info = gate_info(gate.kind);
    std::vector<std::string> tokens = slot_tokens(gate);
    int lo = n, hi = -1;
    for (int s = 0; s < info.arity; ++s) {
      lo = std::min(lo, gate.qubits[static_cast<std::size_t>(s)]);
      hi = std::max(hi, gate.qubits[static_cast<std::size_t>(s)]);
    }
    std::size_t width = 1;
    for (const std::string& t : tokens) width = std::max(width, t.size());

    for (int q = 0; q < n; ++q) {
      std::string cell;
      if (q >= lo && q <= hi) {
        std::string token = "|";  // a spanned wire the gate passes through
        for (int s = 0; s < info.arity; ++s)
          if (gate.qubits[static_cast<std::size_t>(s)] == q)
            token = tokens[static_cast<std::size_t>(s)];
        cell = center_on_wire(token, width);
      } else {
        cell = std::string(width, '-');
      }
      rows[static_cast<std::size_t>(q)] += cell + "--";
    }
  }

  std::ostringstream out;
  for (const std::string& r : rows) out << r << '\n';
  return out.str();
}

}  // namespace qcevo
