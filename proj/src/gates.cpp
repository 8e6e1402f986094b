#include "qcevo/gates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace qcevo {

CMatrix CMatrix::identity(int dim) {
  CMatrix m;
  m.dim = dim;
  m.a.assign(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

bool CMatrix::is_diagonal(double tol) const {
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (r != c && std::abs(at(r, c)) > tol) return false;
  return true;
}

namespace {

constexpr SlotRole C = SlotRole::Control;
constexpr SlotRole T = SlotRole::Target;
constexpr SlotRole B = SlotRole::Both;

// Slot and parameter names follow the vocabulary table verbatim; they are the
// keys used in genome JSON, so changing a string here is a format break.
const std::array<GateInfo, kNumGateKinds> kGateTable = {{
    {GateKind::Toffoli, "ccx", "Toffoli", 3,
     {"control_qubit1", "control_qubit2", "target_qubit"}, {C, C, T}, 0, {}, false},
    {GateKind::CCZ, "ccz", "CCZ", 3,
     {"control_qubit1", "control_qubit2", "target_qubit"}, {C, C, T}, 0, {}, false},
    {GateKind::CH, "ch", "CH", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 0, {}, false},
    {GateKind::CPhase, "cp", "CPhase", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 1, {"phi"}, true},
    {GateKind::CRX, "crx", "CRX", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 1, {"phi"}, false},
    {GateKind::CRY, "cry", "CRY", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 1, {"phi"}, false},
    {GateKind::CRZ, "crz", "CRZ", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 1, {"phi"}, false},
    {GateKind::CSwap, "cswap", "CSWAP", 3,
     {"control_qubit", "target_qubit1", "target_qubit2"}, {C, T, T}, 0, {}, false},
    {GateKind::CX, "cx", "CX", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 0, {}, false},
    {GateKind::CY, "cy", "CY", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 0, {}, false},
    {GateKind::CZ, "cz", "CZ", 2,
     {"control_qubit", "target_qubit"}, {C, T, B}, 0, {}, false},
    {GateKind::H, "h", "H", 1, {"qubit"}, {B, B, B}, 0, {}, false},
    {GateKind::Identity, "id", "Identity", 1, {"qubit"}, {B, B, B}, 0, {}, false},
    {GateKind::ISwap, "iswap", "iSWAP", 2, {"qubit1", "qubit2"}, {B, B, B}, 0, {}, false},
    {GateKind::Phase, "p", "Phase", 1, {"qubit"}, {B, B, B}, 1, {"phi"}, true},
    {GateKind::RX, "rx", "RX", 1, {"qubit"}, {B, B, B}, 1, {"phi"}, true},
    {GateKind::RY, "ry", "RY", 1, {"qubit"}, {B, B, B}, 1, {"phi"}, true},
    {GateKind::RZ, "rz", "RZ", 1, {"qubit"}, {B, B, B}, 1, {"phi"}, true},
    {GateKind::RZZ, "rzz", "RZZ", 2, {"qubit1", "qubit2"}, {B, B, B}, 1, {"theta"}, true},
    {GateKind::S, "s", "S", 1, {"qubit"}, {B, B, B}, 0, {}, false},
    {GateKind::Swap, "swap", "SWAP", 2, {"qubit1", "qubit2"}, {B, B, B}, 0, {}, false},
    {GateKind::T, "t", "T", 1, {"qubit"}, {B, B, B}, 0, {}, false},
    {GateKind::U, "u", "U", 1, {"qubit"}, {B, B, B}, 3, {"theta", "phi", "delta"}, true},
    {GateKind::X, "x", "X", 1, {"qubit"}, {B, B, B}, 0, {}, false},
    {GateKind::Y, "y", "Y", 1, {"qubit"}, {B, B, B}, 0, {}, false},
    {GateKind::Z, "z", "Z", 1, {"qubit"}, {B, B, B}, 0, {}, false},
}};

CMatrix mat1(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m;
  m.dim = 2;
  m.a = {a, b, c, d};  // row-major [[a, b], [c, d]]
  return m;
}

CMatrix mat_x() { return mat1(0, 1, 1, 0); }
CMatrix mat_y() { return mat1(0, cplx(0, -1), cplx(0, 1), 0); }
CMatrix mat_z() { return mat1(1, 0, 0, -1); }
CMatrix mat_h() {
  const double s = 1.0 / std::sqrt(2.0);
  return mat1(s, s, s, -s);
}
CMatrix mat_phase(double phi) { return mat1(1, 0, 0, std::polar(1.0, phi)); }
CMatrix mat_rx(double phi) {
  const double c = std::cos(phi / 2), s = std::sin(phi / 2);
  return mat1(c, cplx(0, -s), cplx(0, -s), c);
}
CMatrix mat_ry(double phi) {
  const double c = std::cos(phi / 2), s = std::sin(phi / 2);
  return mat1(c, -s, s, c);
}
CMatrix mat_rz(double phi) {
  return mat1(std::polar(1.0, -phi / 2), 0, 0, std::polar(1.0, phi / 2));
}
// Three-angle single-qubit gate:
//   [[cos(t/2),            -e^{i d} sin(t/2)      ],
//    [e^{i p} sin(t/2),     e^{i(p+d)} cos(t/2)   ]]
CMatrix mat_u(double theta, double phi, double delta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return mat1(c, -std::polar(1.0, delta) * s, std::polar(1.0, phi) * s,
              std::polar(1.0, phi + delta) * c);
}

// Embed `base` (acting on the high `target_slots` slots) controlled on the
// low `control_slots` slots all being 1. Slot bit j of the local index is the
// j-th slot, so controls occupy the low bits by table construction.
CMatrix controlled(const CMatrix& base, int control_slots) {
  const int target_slots_dim = base.dim;
  const int dim = (1 << control_slots) * target_slots_dim;
  const int cmask = (1 << control_slots) - 1;
  CMatrix m = CMatrix::identity(dim);
  for (int tin = 0; tin < target_slots_dim; ++tin) {
    for (int tout = 0; tout < target_slots_dim; ++tout) {
      const int row = cmask | (tout << control_slots);
      const int col = cmask | (tin << control_slots);
      m.at(row, col) = base.at(tout, tin);
    }
  }
  return m;
}

CMatrix mat_swap() {
  CMatrix m = CMatrix::identity(4);
  m.at(1, 1) = m.at(2, 2) = 0;
  m.at(1, 2) = m.at(2, 1) = 1;
  return m;
}

CMatrix mat_iswap() {
  CMatrix m = CMatrix::identity(4);
  m.at(1, 1) = m.at(2, 2) = 0;
  m.at(1, 2) = m.at(2, 1) = cplx(0, 1);
  return m;
}

// exp(-i theta/2 Z (x) Z): phase e^{-i theta/2} on even-parity basis states,
// e^{+i theta/2} on odd parity.
CMatrix mat_rzz(double theta) {
  CMatrix m = CMatrix::identity(4);
  const cplx even = std::polar(1.0, -theta / 2), odd = std::polar(1.0, theta / 2);
  m.at(0, 0) = even;
  m.at(1, 1) = odd;
  m.at(2, 2) = odd;
  m.at(3, 3) = even;
  return m;
}

}  // namespace

const std::array<GateInfo, kNumGateKinds>& gate_table() { return kGateTable; }

const GateInfo& gate_info(GateKind kind) {
  return kGateTable[static_cast<std::size_t>(kind)];
}

std::optional<GateKind> gate_kind_from_id(std::string_view id) {
  static const std::unordered_map<std::string_view, GateKind> lookup = [] {
    std::unordered_map<std::string_view, GateKind> m;
    for (const auto& gi : kGateTable) m.emplace(gi.id, gi.kind);
    return m;
  }();
  auto it = lookup.find(id);
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

bool has_control_target_split(GateKind kind) {
  const GateInfo& gi = gate_info(kind);
  bool has_c = false, has_t = false;
  for (int i = 0; i < gi.arity; ++i) {
    has_c |= gi.slot_roles[i] == SlotRole::Control;
    has_t |= gi.slot_roles[i] == SlotRole::Target;
  }
  return has_c && has_t;
}

CMatrix gate_unitary(GateKind kind, const std::vector<double>& params) {
  const GateInfo& gi = gate_info(kind);
  if (static_cast<int>(params.size()) != gi.num_params) {
    throw std::invalid_argument("gate_unitary: " + std::string(gi.display) +
                                " takes " + std::to_string(gi.num_params) +
                                " parameter(s), got " + std::to_string(params.size()));
  }
  switch (kind) {
    case GateKind::Toffoli: return controlled(mat_x(), 2);
    case GateKind::CCZ:     return controlled(mat_z(), 2);
    case GateKind::CH:      return controlled(mat_h(), 1);
    case GateKind::CPhase:  return controlled(mat_phase(params[0]), 1);
    case GateKind::CRX:     return controlled(mat_rx(params[0]), 1);
    case GateKind::CRY:     return controlled(mat_ry(params[0]), 1);
    case GateKind::CRZ:     return controlled(mat_rz(params[0]), 1);
    case GateKind::CSwap:   return controlled(mat_swap(), 1);
    case GateKind::CX:      return controlled(mat_x(), 1);
    case GateKind::CY:      return controlled(mat_y(), 1);
    case GateKind::CZ:      return controlled(mat_z(), 1);
    case GateKind::H:       return mat_h();
    case GateKind::Identity: return CMatrix::identity(2);
    case GateKind::ISwap:   return mat_iswap();
    case GateKind::Phase:   return mat_phase(params[0]);
    case GateKind::RX:      return mat_rx(params[0]);
    case GateKind::RY:      return mat_ry(params[0]);
    case GateKind::RZ:      return mat_rz(params[0]);
    case GateKind::RZZ:     return mat_rzz(params[0]);
    case GateKind::S:       return mat_phase(M_PI / 2);
    case GateKind::Swap:    return mat_swap();
    case GateKind::T:       return mat_phase(M_PI / 4);
    case GateKind::U:       return mat_u(params[0], params[1], params[2]);
    case GateKind::X:       return mat_x();
    case GateKind::Y:       return mat_y();
    case GateKind::Z:       return mat_z();
  }
  throw std::invalid_argument("gate_unitary: unknown gate kind");
}

}  // namespace qcevo
