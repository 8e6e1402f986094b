#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qcevo/gates.hpp"
#include "qcevo/genome.hpp"

namespace qcevo {

// Statevector over n qubits.
//
// CONVENTION (used by every index computation in this codebase): qubit k is
// bit k of the basis-state index — little-endian. amps[5] = amps[0b101] is
// the amplitude of the state with qubits 0 and 2 set to |1> and the rest
// |0>. In ket notation written |q0 q1 q2 ...>, index 0b101 is |1 0 1>.
struct StateVector {
  int num_qubits = 0;
  std::vector<cplx> amps;

  std::size_t dim() const { return amps.size(); }
};

// |basis_index> on n qubits. basis_index defaults to all-zeros.
StateVector make_state(int num_qubits, std::uint64_t basis_index = 0);

double norm(const StateVector& state);

// <a|b>. Dimension mismatch throws std::invalid_argument.
cplx overlap(const StateVector& a, const StateVector& b);

// Apply one gate in place. `qubits[j]` binds slot j of the kind's slot list
// to a register qubit; indices must be distinct and in range (throws
// std::out_of_range otherwise). No 2^n x 2^n matrix is ever formed: the
// unitary acts stride-wise on amplitude groups.
void apply_gate(StateVector& state, GateKind kind, const std::vector<int>& qubits,
                const std::vector<double>& params);

// A genome lowered to a dense-local-unitary gate sequence (enabled gates in
// sorted order). Splitting compile from execution lets a training loop pay
// the per-gate matrix construction once per parameter vector, then sweep
// many initial states.
struct CompiledCircuit {
  struct Step {
    std::vector<int> qubits;  // slot-ordered register qubits
    CMatrix local;            // 2^arity unitary
    bool diagonal;            // fast-path flag
  };
  int num_qubits = 0;
  std::vector<Step> steps;
};

CompiledCircuit compile_circuit(const CircuitGenome& genome);

// Run `compiled` on a copy of `initial`.
StateVector run_compiled(const CompiledCircuit& compiled, const StateVector& initial);

// Enabled gates of `genome` in (depth, innovation) order applied to
// `initial`. Genome qubit indices out of range throw std::out_of_range.
StateVector run_circuit(const CircuitGenome& genome, const StateVector& initial);

// Probability distribution over the listed qubits (any order, distinct),
// marginalizing the rest out. Result has 2^qubits.size() entries; entry m
// corresponds to qubits[j] holding bit j of m. Empty or invalid qubit lists
// throw.
std::vector<double> marginal_probabilities(const StateVector& state,
                                           const std::vector<int>& qubits);

// Single-qubit Pauli observable.
struct ObservableSpec {
  char axis = 'Z';  // 'X', 'Y' or 'Z'
  int qubit = 0;
};

// <state| P_axis(qubit) |state>, always real for Hermitian P.
double expectation(const StateVector& state, const ObservableSpec& obs);

// |amps[i]|^2 for all i (the full computational-basis distribution).
std::vector<double> basis_probabilities(const StateVector& state);

}  // namespace qcevo
