#pragma once

#include <optional>
#include <vector>

#include "qcevo/genome.hpp"
#include "qcevo/rng.hpp"

namespace qcevo {

// Mutation operator identifiers, in rate-table order.
enum class MutationKind { AddGate, ReorderGate, SwapQubits, EnableGate, DisableGate };
const char* mutation_name(MutationKind m);

// Variation-operator knobs. Defaults reproduce the reference configuration.
struct OperatorConfig {
  double best_keep_rate = 0.75;
  double other_keep_rate = 0.25;
  // Line-search coefficients: r = rand(0,1) * line_l1 - line_l2. With the
  // defaults r spans [-1.5, -0.5]; that range is intentional (see README
  // notes on parameter blending) and must not be "corrected" here.
  double line_l1 = -1.0;
  double line_l2 = 0.5;
  int nary_parents = 4;  // total parents for the n-ary crossover
  // Mutation draw rates: add_gate, reorder_gate, swap_qubits, enable_gate,
  // disable_gate.
  double rate_add_gate = 0.70;
  double rate_reorder_gate = 0.10;
  double rate_swap_qubits = 0.10;
  double rate_enable_gate = 0.05;
  double rate_disable_gate = 0.05;
  // Reproduction draw rates: binary / n-ary / exponential crossover, and
  // mutation chains.
  double rate_binary = 0.10;
  double rate_nary = 0.10;
  double rate_exponential = 0.10;
  double rate_mutation = 0.70;
  int mutations_per_call = 2;

  // Throws std::invalid_argument unless each rate lies in [0,1] and each
  // rate group sums to 1 within 1e-9.
  void validate() const;

  std::vector<double> mutation_rate_vector() const {
    return {rate_add_gate, rate_reorder_gate, rate_swap_qubits, rate_enable_gate,
            rate_disable_gate};
  }
  std::vector<double> reproduction_rate_vector() const {
    return {rate_binary, rate_nary, rate_exponential, rate_mutation};
  }
};

// ---- Mutations ----------------------------------------------------------
//
// Each returns std::nullopt when the draw cannot apply (the caller charges
// the discard and picks a fresh operator). Children are fresh copies; the
// parent is never modified. All randomness flows through `rng` in the fixed
// order documented per operator, so (parent, seed) determines the child.

// Insert one gate at depth d ~ U(0,1). Control-role slots draw from
// reachable_from_inputs(parent, d), target-role slots from
// connects_to_outputs(parent, d), dual-role slots from the intersection of
// the two sets. When the sets are disjoint only kinds with a control/target
// split are eligible. The kind is uniform over eligible kinds, the qubit
// assignment uniform over valid (distinct) assignments, parameters
// ~ U(-pi, pi). Draw order: depth, kind, assignment, params.
std::optional<CircuitGenome> add_gate(const CircuitGenome& parent, RngStream& rng,
                                      InnovationCounter& counter);

// Flip one gate's enabled flag: direction=false disables a uniformly chosen
// enabled gate, direction=true enables a uniformly chosen disabled gate.
// Rejection when no gate is in the required state.
std::optional<CircuitGenome> enable_disable_gate(const CircuitGenome& parent,
                                                 bool enable, RngStream& rng);

// Disable a uniformly chosen enabled gate and append an enabled copy with a
// fresh innovation number and depth ~ U(0,1). Parameters copy verbatim.
std::optional<CircuitGenome> reorder_gate(const CircuitGenome& parent, RngStream& rng,
                                          InnovationCounter& counter);

// Disable a uniformly chosen enabled gate and append a copy with one qubit
// slot rebound: control slots redraw from reachable_from_inputs, target
// slots from connects_to_outputs, dual-role slots from the union, always
// excluding the gate's current qubits. The copy's depth is drawn
// ~ U(d_prev, d_next) from the original's sorted neighbors (0 and 1 at the
// edges) and the sets are evaluated at that new depth. Draw order: gate,
// depth, slot, qubit.
std::optional<CircuitGenome> swap_qubits(const CircuitGenome& parent, RngStream& rng,
                                         InnovationCounter& counter);

// Applies one mutation drawn from the configured rates. Convenience used by
// the engine's mutation chain; returns the drawn kind too.
struct MutationResult {
  MutationKind kind;
  std::optional<CircuitGenome> child;
};
MutationResult mutate_once(const CircuitGenome& parent, const OperatorConfig& cfg,
                           RngStream& rng, InnovationCounter& counter);

// ---- Crossovers ---------------------------------------------------------
//
// Parents must share the task register layout. `best` must have fitness no
// worse (no higher loss) than the other parent(s); the engine guarantees
// this. Children may be invalid; the caller runs is_valid.

// Shared-innovation gates always copy (structure and enabled flag from
// best); best-only gates keep at best_keep_rate, other-only at
// other_keep_rate. Shared parameterized gates blend each parameter along
// p_new = p_other + r * (p_best - p_other) with one r = rand(0,1)*l1 - l2
// drawn per gate. Iteration is in ascending innovation order; one rng draw
// per gate (coin or r).
CircuitGenome binary_crossover(const CircuitGenome& best, const CircuitGenome& other,
                               const OperatorConfig& cfg, RngStream& rng);

// n-parent generalization: gates in best and at least one other keep at
// best_keep_rate with params blended toward the others' mean via
// p_new = p_avg + r * (p_best - p_avg); best-only gates keep at
// best_keep_rate verbatim; others-only gates keep at other_keep_rate with
// structure from their fittest carrier and params averaged across carriers.
// Ascending innovation order; coin first, r drawn only for kept shared
// parameterized gates.
CircuitGenome nary_crossover(const CircuitGenome& best,
                             const std::vector<CircuitGenome>& others,
                             const OperatorConfig& cfg, RngStream& rng);

// Depth-partition recombination: d_cut ~ U(0,1); child = p1 gates with
// depth < d_cut plus p2 gates with depth >= d_cut, all verbatim. An
// innovation appearing on both sides keeps the p1 copy.
CircuitGenome exponential_crossover(const CircuitGenome& p1, const CircuitGenome& p2,
                                    RngStream& rng);

}  // namespace qcevo
