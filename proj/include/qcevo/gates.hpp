#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace qcevo {

using cplx = std::complex<double>;

// Square complex matrix stored row-major; dim is 2^arity (at most 8 here).
struct CMatrix {
  int dim = 0;
  std::vector<cplx> a;  // a[row * dim + col]

  cplx& at(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
  const cplx& at(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }

  static CMatrix identity(int dim);
  bool is_diagonal(double tol = 0.0) const;
};

// The fixed gate vocabulary. Order matters: it is the canonical enumeration
// used for serialization tables and for "draw a random kind".
enum class GateKind : std::uint8_t {
  Toffoli, CCZ, CH, CPhase, CRX, CRY, CRZ, CSwap, CX, CY, CZ,
  H, Identity, ISwap, Phase, RX, RY, RZ, RZZ, S, Swap, T, U, X, Y, Z,
};

inline constexpr int kNumGateKinds = 26;

// What a qubit slot does for data flow. Control slots condition, Target slots
// are acted on, Both covers symmetric / single-qubit slots that do both.
enum class SlotRole : std::uint8_t { Control, Target, Both };

struct GateInfo {
  GateKind kind;
  std::string_view id;        // serialization name ("ccx", "rzz", ...)
  std::string_view display;   // human name ("Toffoli", "RZZ", ...)
  int arity;                  // number of qubit slots (1..3)
  std::array<std::string_view, 3> slot_names;
  std::array<SlotRole, 3> slot_roles;
  int num_params;             // 0..3
  std::array<std::string_view, 3> param_names;
  bool shift_exact;           // two-term parameter-shift rule is exact
};

const GateInfo& gate_info(GateKind kind);
const std::array<GateInfo, kNumGateKinds>& gate_table();
std::optional<GateKind> gate_kind_from_id(std::string_view id);

// Dense unitary for one gate, basis-ordered by the gate's own slots:
// local index = sum over slots j of (slot j bit) << j. params.size() must
// equal num_params for the kind, else std::invalid_argument.
CMatrix gate_unitary(GateKind kind, const std::vector<double>& params);

// True if the gate has at least one Control slot and at least one
// Target slot (i.e. is not all-Both).
bool has_control_target_split(GateKind kind);

}  // namespace qcevo
