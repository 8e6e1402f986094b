#include "qcevo/qsim.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace qcevo {

StateVector make_state(int num_qubits, std::uint64_t basis_index) {
  if (num_qubits <= 0 || num_qubits > 30)
    throw std::invalid_argument("make_state: num_qubits out of supported range");
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (basis_index >= dim) throw std::out_of_range("make_state: basis index out of range");
  StateVector s;
  s.num_qubits = num_qubits;
  s.amps.assign(dim, cplx(0.0, 0.0));
  s.amps[basis_index] = 1.0;
  return s;
}

double norm(const StateVector& state) {
  double total = 0.0;
  for (const cplx& a : state.amps) total += std::norm(a);
  return std::sqrt(total);
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.amps.size() != b.amps.size())
    throw std::invalid_argument("overlap: dimension mismatch");
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
  return acc;
}

namespace {

void check_qubits(int num_qubits, const std::vector<int>& qubits, int arity) {
  if (static_cast<int>(qubits.size()) != arity)
    throw std::invalid_argument("apply_gate: expected " + std::to_string(arity) +
                                " qubits, got " + std::to_string(qubits.size()));
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= num_qubits)
      throw std::out_of_range("apply_gate: qubit index " + std::to_string(qubits[i]) +
                              " out of range for " + std::to_string(num_qubits) + " qubits");
    for (std::size_t j = i + 1; j < qubits.size(); ++j)
      if (qubits[i] == qubits[j])
        throw std::invalid_argument("apply_gate: duplicate qubit index " +
                                    std::to_string(qubits[i]));
  }
}

// Local basis index of full index `idx` under the gate's slot list:
// bit j of the result is the idx-bit at register qubit qubits[j].
inline int local_index(std::size_t idx, const std::vector<int>& qubits) {
  int l = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j)
    l |= static_cast<int>((idx >> qubits[j]) & 1u) << j;
  return l;
}

// Diagonal gate: one multiply per amplitude.
void apply_diagonal(StateVector& state, const CMatrix& m, const std::vector<int>& qubits) {
  const std::size_t dim = state.dim();
  for (std::size_t i = 0; i < dim; ++i)
    state.amps[i] *= m.at(local_index(i, qubits), local_index(i, qubits));
}

// Single-qubit dense gate: classic stride-pair sweep.
void apply_1q(StateVector& state, const CMatrix& m, int q) {
  const std::size_t bit = std::size_t{1} << q;
  const std::size_t dim = state.dim();
  const cplx a = m.at(0, 0), b = m.at(0, 1), c = m.at(1, 0), d = m.at(1, 1);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & bit) continue;
    const cplx lo = state.amps[base], hi = state.amps[base | bit];
    state.amps[base] = a * lo + b * hi;
    state.amps[base | bit] = c * lo + d * hi;
  }
}

// General k-qubit dense gate (k <= 3 here): gather the 2^k amplitudes of
// each group, multiply by the local matrix, scatter back.
void apply_dense(StateVector& state, const CMatrix& m, const std::vector<int>& qubits) {
  const int k = static_cast<int>(qubits.size());
  const int ldim = 1 << k;
  std::vector<int> sorted_q(qubits);
  std::sort(sorted_q.begin(), sorted_q.end());
  const std::size_t groups = state.dim() >> k;
  std::array<std::size_t, 8> idx{};
  std::array<cplx, 8> in{};
  for (std::size_t g = 0; g < groups; ++g) {
    // Expand g to a full index with 0 bits at the gate's qubit positions.
    std::size_t base = g;
    for (int q : sorted_q) {
      const std::size_t low = base & ((std::size_t{1} << q) - 1);
      base = ((base >> q) << (q + 1)) | low;
    }
    for (int l = 0; l < ldim; ++l) {
      std::size_t full = base;
      for (int j = 0; j < k; ++j)
        if (l & (1 << j)) full |= std::size_t{1} << qubits[j];
      idx[l] = full;
      in[l] = state.amps[full];
    }
    for (int r = 0; r < ldim; ++r) {
      cplx acc(0.0, 0.0);
      for (int c = 0; c < ldim; ++c) acc += m.at(r, c) * in[c];
      state.amps[idx[r]] = acc;
    }
  }
}

void apply_matrix(StateVector& state, const CMatrix& m, const std::vector<int>& qubits,
                  bool diagonal) {
  if (diagonal)
    apply_diagonal(state, m, qubits);
  else if (qubits.size() == 1)
    apply_1q(state, m, qubits[0]);
  else
    apply_dense(state, m, qubits);
}

}  // namespace

void apply_gate(StateVector& state, GateKind kind, const std::vector<int>& qubits,
                const std::vector<double>& params) {
  check_qubits(state.num_qubits, qubits, gate_info(kind).arity);
  const CMatrix m = gate_unitary(kind, params);
  apply_matrix(state, m, qubits, m.is_diagonal());
}

CompiledCircuit compile_circuit(const CircuitGenome& genome) {
  CompiledCircuit cc;
  cc.num_qubits = genome.num_qubits;
  for (const GateSpec& g : genome.gates) {
    if (!g.enabled) continue;
    CompiledCircuit::Step step;
    step.qubits.assign(g.qubits.begin(), g.qubits.begin() + g.arity());
    check_qubits(genome.num_qubits, step.qubits, g.arity());
    step.local = gate_unitary(g.kind, g.param_vector());
    step.diagonal = step.local.is_diagonal();
    cc.steps.push_back(std::move(step));
  }
  return cc;
}

StateVector run_compiled(const CompiledCircuit& compiled, const StateVector& initial) {
  if (initial.num_qubits != compiled.num_qubits)
    throw std::invalid_argument("run_compiled: state width does not match circuit");
  StateVector state = initial;
  for (const auto& step : compiled.steps)
    apply_matrix(state, step.local, step.qubits, step.diagonal);
  return state;
}

StateVector run_circuit(const CircuitGenome& genome, const StateVector& initial) {
  return run_compiled(compile_circuit(genome), initial);
}

std::vector<double> marginal_probabilities(const StateVector& state,
                                           const std::vector<int>& qubits) {
  if (qubits.empty()) throw std::invalid_argument("marginal_probabilities: empty qubit list");
  check_qubits(state.num_qubits, qubits, static_cast<int>(qubits.size()));
  std::vector<double> out(std::size_t{1} << qubits.size(), 0.0);
  for (std::size_t i = 0; i < state.dim(); ++i)
    out[static_cast<std::size_t>(local_index(i, qubits))] += std::norm(state.amps[i]);
  return out;
}

double expectation(const StateVector& state, const ObservableSpec& obs) {
  if (obs.qubit < 0 || obs.qubit >= state.num_qubits)
    throw std::out_of_range("expectation: qubit out of range");
  const std::size_t bit = std::size_t{1} << obs.qubit;
  double acc = 0.0;
  switch (obs.axis) {
    case 'Z':
      for (std::size_t i = 0; i < state.dim(); ++i)
        acc += (i & bit) ? -std::norm(state.amps[i]) : std::norm(state.amps[i]);
      return acc;
    case 'X':
      for (std::size_t i = 0; i < state.dim(); ++i) {
        if (i & bit) continue;
        acc += 2.0 * std::real(std::conj(state.amps[i]) * state.amps[i | bit]);
      }
      return acc;
    case 'Y':
      // <Y> = sum over pairs of 2*Im(conj(a_0) a_1) with a_1 the |1> half.
      for (std::size_t i = 0; i < state.dim(); ++i) {
        if (i & bit) continue;
        acc += 2.0 * std::imag(std::conj(state.amps[i]) * state.amps[i | bit]);
      }
      return acc;
    default:
      throw std::invalid_argument(std::string("expectation: unknown axis '") + obs.axis + "'");
  }
}

std::vector<double> basis_probabilities(const StateVector& state) {
  std::vector<double> p(state.dim());
  for (std::size_t i = 0; i < state.dim(); ++i) p[i] = std::norm(state.amps[i]);
  return p;
}

}  // namespace qcevo
