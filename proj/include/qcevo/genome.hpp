#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcevo/gates.hpp"

namespace qcevo {

// One gate instance inside a genome.
//
// `depth` in [0,1] orders gates along the circuit; ties break by innovation
// number, so iterating a sorted genome is deterministic. `qubits[j]` is the
// register qubit bound to slot j of the kind's slot list. `params[j]` matches
// the kind's param_names[j]. Disabled gates stay in the genome (history for
// crossover alignment) but are skipped by simulation and validity.
struct GateSpec {
  std::uint64_t innovation = 0;
  GateKind kind = GateKind::Identity;
  double depth = 0.0;
  std::array<int, 3> qubits = {0, 0, 0};
  std::array<double, 3> params = {0.0, 0.0, 0.0};
  bool enabled = true;

  int arity() const { return gate_info(kind).arity; }
  int num_params() const { return gate_info(kind).num_params; }
  std::vector<double> param_vector() const {
    return std::vector<double>(params.begin(), params.begin() + num_params());
  }
  bool uses_qubit(int q) const {
    for (int i = 0; i < arity(); ++i)
      if (qubits[i] == q) return true;
    return false;
  }
};

// Gate ordering used everywhere a genome's gates are walked.
inline bool gate_order_less(const GateSpec& a, const GateSpec& b) {
  if (a.depth != b.depth) return a.depth < b.depth;
  return a.innovation < b.innovation;
}

struct Lineage {
  std::string op;                  // operator that produced this genome
  std::vector<std::int64_t> parents;  // parent genome ids, fittest first
};

// A linear-genome circuit: a fixed-width qubit register, input/output qubit
// subsets (they may overlap), and a gate list kept sorted by
// (depth, innovation). `fitness` is a loss: lower is better, unset until
// evaluated.
struct CircuitGenome {
  int num_qubits = 0;
  std::vector<int> input_qubits;
  std::vector<int> output_qubits;
  std::vector<GateSpec> gates;  // invariant: sorted by gate_order_less
  std::int64_t genome_id = -1;
  std::optional<double> fitness;
  Lineage lineage;

  const GateSpec* find_innovation(std::uint64_t innovation) const;
  std::size_t enabled_count() const;
};

// Monotonic source of structural-gene ids. Owned by the search master; two
// gates share an innovation number only if one was copied from the other
// with structure (kind, depth, qubits) intact.
class InnovationCounter {
 public:
  explicit InnovationCounter(std::uint64_t next = 0) : next_(next) {}
  std::uint64_t issue() { return next_++; }
  std::uint64_t peek() const { return next_; }
  void advance_past(std::uint64_t used) {
    if (used >= next_) next_ = used + 1;
  }

 private:
  std::uint64_t next_;
};

// Fresh genome with no gates. Valid iff inputs and outputs share a qubit.
CircuitGenome make_base_genome(int num_qubits, std::vector<int> input_qubits,
                               std::vector<int> output_qubits);

// Copy with the gate inserted at its sorted position; the original is left
// untouched. Duplicate innovation numbers throw std::invalid_argument.
CircuitGenome insert_gate(const CircuitGenome& genome, const GateSpec& gate);

// Re-establish the sort invariant (used after deserialization / bulk edits).
void sort_gates(CircuitGenome& genome);

// Qubits reachable from the input register through enabled gates with
// depth strictly less than `depth`. A gate propagates touch to all its
// qubits if any of its qubits is already touched, walking in sorted order.
// Pass depth > 1 (e.g. 2.0) to sweep the whole circuit.
std::vector<bool> reachable_from_inputs(const CircuitGenome& genome, double depth);

// Mirror image: qubits that reach the output register backwards through
// enabled gates with depth >= `depth`. Pass depth <= 0 to sweep everything.
std::vector<bool> connects_to_outputs(const CircuitGenome& genome, double depth);

// A genome is valid when at least one output qubit is reachable from the
// inputs (forward touch sweep over all enabled gates). With no enabled gates
// this degenerates to: inputs and outputs intersect.
bool is_valid(const CircuitGenome& genome);

// JSON round-trip. serialize() emits a compact single-line document; parse
// failures throw std::invalid_argument with position info, unknown gate
// names/slots/params are named in the message.
std::string serialize(const CircuitGenome& genome);
CircuitGenome deserialize(const std::string& text);

}  // namespace qcevo
