#include "qcevo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace qcevo {

const char* mutation_name(MutationKind m) {
  switch (m) {
    case MutationKind::AddGate: return "add_gate";
    case MutationKind::ReorderGate: return "reorder_gate";
    case MutationKind::SwapQubits: return "swap_qubits";
    case MutationKind::EnableGate: return "enable_gate";
    case MutationKind::DisableGate: return "disable_gate";
  }
  return "?";
}

void OperatorConfig::validate() const {
  auto check_group = [](const std::vector<double>& rates, const char* what) {
    double total = 0.0;
    for (double r : rates) {
      if (r < 0.0 || r > 1.0)
        throw std::invalid_argument(std::string(what) + " rates must lie in [0,1]");
      total += r;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument(std::string(what) + " rates must sum to 1");
  };
  check_group(mutation_rate_vector(), "mutation");
  check_group(reproduction_rate_vector(), "reproduction");
  for (double p : {best_keep_rate, other_keep_rate})
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("keep rates must lie in [0,1]");
  if (nary_parents < 2) throw std::invalid_argument("nary_parents must be >= 2");
  if (mutations_per_call < 1) throw std::invalid_argument("mutations_per_call must be >= 1");
}

namespace {

std::vector<int> marks_to_sorted(const std::vector<bool>& marks) {
  std::vector<int> out;
  for (std::size_t i = 0; i < marks.size(); ++i)
    if (marks[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> set_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// All distinct slot assignments for `kind` with control slots drawn from
// `reach`, target slots from `connect`, dual-role slots from `both`,
// enumerated in lexicographic slot order.
std::vector<std::array<int, 3>> valid_assignments(GateKind kind,
                                                  const std::vector<int>& reach,
                                                  const std::vector<int>& connect,
                                                  const std::vector<int>& both) {
  const GateInfo& gi = gate_info(kind);
  const std::vector<int>* pools[3] = {nullptr, nullptr, nullptr};
  for (int s = 0; s < gi.arity; ++s) {
    switch (gi.slot_roles[static_cast<std::size_t>(s)]) {
      case SlotRole::Control: pools[s] = &reach; break;
      case SlotRole::Target: pools[s] = &connect; break;
      case SlotRole::Both: pools[s] = &both; break;
    }
  }
  std::vector<std::array<int, 3>> out;
  std::array<int, 3> tuple = {0, 0, 0};
  auto distinct_prefix = [&](int upto) {
    for (int i = 0; i < upto; ++i)
      for (int j = i + 1; j <= upto; ++j)
        if (tuple[static_cast<std::size_t>(i)] == tuple[static_cast<std::size_t>(j)]) return false;
    return true;
  };
  // arity <= 3: three nested loops, unused levels run once.
  const std::vector<int> unit = {0};
  const std::vector<int>& p0 = *pools[0];
  const std::vector<int>& p1 = gi.arity > 1 ? *pools[1] : unit;
  const std::vector<int>& p2 = gi.arity > 2 ? *pools[2] : unit;
  for (int a : p0) {
    tuple[0] = a;
    for (int b : p1) {
      tuple[1] = b;
      if (gi.arity > 1 && !distinct_prefix(1)) continue;
      for (int c : p2) {
        tuple[2] = c;
        if (gi.arity > 2 && !distinct_prefix(2)) continue;
        out.push_back(tuple);
      }
    }
  }
  return out;
}

GateSpec copy_of(const GateSpec& g) { return g; }

}  // namespace

std::optional<CircuitGenome> add_gate(const CircuitGenome& parent, RngStream& rng,
                                      InnovationCounter& counter) {
  const double d = rng.uniform();
  const std::vector<int> reach = marks_to_sorted(reachable_from_inputs(parent, d));
  const std::vector<int> connect = marks_to_sorted(connects_to_outputs(parent, d));
  const std::vector<int> both = set_intersection(reach, connect);
  const bool disjoint = both.empty();

  struct Option {
    GateKind kind;
    std::vector<std::array<int, 3>> assignments;
  };
  std::vector<Option> eligible;
  for (const GateInfo& gi : gate_table()) {
    if (gi.arity > parent.num_qubits) continue;
    if (disjoint && !has_control_target_split(gi.kind)) continue;
    auto assignments = valid_assignments(gi.kind, reach, connect, both);
    if (!assignments.empty()) eligible.push_back({gi.kind, std::move(assignments)});
  }
  if (eligible.empty()) return std::nullopt;

  const Option& opt = eligible[static_cast<std::size_t>(rng.index(eligible.size()))];
  const auto& assignment =
      opt.assignments[static_cast<std::size_t>(rng.index(opt.assignments.size()))];

  GateSpec gate;
  gate.kind = opt.kind;
  gate.depth = d;
  gate.qubits = assignment;
  for (int p = 0; p < gate.num_params(); ++p)
    gate.params[static_cast<std::size_t>(p)] = rng.uniform(-M_PI, M_PI);
  gate.enabled = true;
  gate.innovation = counter.issue();

  CircuitGenome child = insert_gate(parent, gate);
  child.genome_id = -1;
  child.fitness.reset();
  child.lineage = {"add_gate", {parent.genome_id}};
  return child;
}

std::optional<CircuitGenome> enable_disable_gate(const CircuitGenome& parent,
                                                 bool enable, RngStream& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < parent.gates.size(); ++i)
    if (parent.gates[i].enabled != enable) candidates.push_back(i);
  if (candidates.empty()) return std::nullopt;
  CircuitGenome child = parent;
  const std::size_t pick = candidates[static_cast<std::size_t>(rng.index(candidates.size()))];
  child.gates[pick].enabled = enable;
  child.genome_id = -1;
  child.fitness.reset();
  child.lineage = {enable ? "enable_gate" : "disable_gate", {parent.genome_id}};
  return child;
}

namespace {

// Indices of enabled gates, in gate-list (sorted) order.
std::vector<std::size_t> enabled_indices(const CircuitGenome& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.gates.size(); ++i)
    if (g.gates[i].enabled) out.push_back(i);
  return out;
}

}  // namespace

std::optional<CircuitGenome> reorder_gate(const CircuitGenome& parent, RngStream& rng,
                                          InnovationCounter& counter) {
  const auto enabled = enabled_indices(parent);
  if (enabled.empty()) return std::nullopt;
  const std::size_t pick = enabled[static_cast<std::size_t>(rng.index(enabled.size()))];

  GateSpec copy = copy_of(parent.gates[pick]);
  copy.depth = rng.uniform();
  copy.innovation = counter.issue();

  CircuitGenome child = parent;
  child.gates[pick].enabled = false;
  child = insert_gate(child, copy);
  child.genome_id = -1;
  child.fitness.reset();
  child.lineage = {"reorder_gate", {parent.genome_id}};
  return child;
}

std::optional<CircuitGenome> swap_qubits(const CircuitGenome& parent, RngStream& rng,
                                         InnovationCounter& counter) {
  const auto enabled = enabled_indices(parent);
  if (enabled.empty()) return std::nullopt;
  const std::size_t pick = enabled[static_cast<std::size_t>(rng.index(enabled.size()))];
  const GateSpec& original = parent.gates[pick];

  // New depth between the original's sorted-list neighbors.
  const double d_prev = pick > 0 ? parent.gates[pick - 1].depth : 0.0;
  const double d_next = pick + 1 < parent.gates.size() ? parent.gates[pick + 1].depth : 1.0;
  const double new_depth = rng.uniform(d_prev, d_next);

  const int slot = rng.index(static_cast<std::size_t>(original.arity()));

  const std::vector<int> reach = marks_to_sorted(reachable_from_inputs(parent, new_depth));
  const std::vector<int> connect = marks_to_sorted(connects_to_outputs(parent, new_depth));
  std::vector<int> pool;
  switch (gate_info(original.kind).slot_roles[static_cast<std::size_t>(slot)]) {
    case SlotRole::Control: pool = reach; break;
    case SlotRole::Target: pool = connect; break;
    case SlotRole::Both: pool = set_union(reach, connect); break;
  }
  // Must move to a different qubit and stay distinct within the gate.
  std::erase_if(pool, [&](int q) { return original.uses_qubit(q); });
  if (pool.empty()) return std::nullopt;

  GateSpec copy = copy_of(original);
  copy.depth = new_depth;
  copy.qubits[static_cast<std::size_t>(slot)] =
      pool[static_cast<std::size_t>(rng.index(pool.size()))];
  copy.innovation = counter.issue();

  CircuitGenome child = parent;
  child.gates[pick].enabled = false;
  child = insert_gate(child, copy);
  child.genome_id = -1;
  child.fitness.reset();
  child.lineage = {"swap_qubits", {parent.genome_id}};
  return child;
}

MutationResult mutate_once(const CircuitGenome& parent, const OperatorConfig& cfg,
                           RngStream& rng, InnovationCounter& counter) {
  const auto kind = static_cast<MutationKind>(rng.weighted(cfg.mutation_rate_vector()));
  switch (kind) {
    case MutationKind::AddGate: return {kind, add_gate(parent, rng, counter)};
    case MutationKind::ReorderGate: return {kind, reorder_gate(parent, rng, counter)};
    case MutationKind::SwapQubits: return {kind, swap_qubits(parent, rng, counter)};
    case MutationKind::EnableGate: return {kind, enable_disable_gate(parent, true, rng)};
    case MutationKind::DisableGate: return {kind, enable_disable_gate(parent, false, rng)};
  }
  return {MutationKind::AddGate, std::nullopt};
}

namespace {

CircuitGenome child_shell(const CircuitGenome& from, const char* op,
                          std::vector<std::int64_t> parents) {
  CircuitGenome child;
  child.num_qubits = from.num_qubits;
  child.input_qubits = from.input_qubits;
  child.output_qubits = from.output_qubits;
  child.lineage = {op, std::move(parents)};
  return child;
}

// innovation -> gate pointer for one genome.
std::map<std::uint64_t, const GateSpec*> index_by_innovation(const CircuitGenome& g) {
  std::map<std::uint64_t, const GateSpec*> m;
  for (const GateSpec& gate : g.gates) m.emplace(gate.innovation, &gate);
  return m;
}

}  // namespace

CircuitGenome binary_crossover(const CircuitGenome& best, const CircuitGenome& other,
                               const OperatorConfig& cfg, RngStream& rng) {
  CircuitGenome child =
      child_shell(best, "binary_crossover", {best.genome_id, other.genome_id});
  const auto best_idx = index_by_innovation(best);
  const auto other_idx = index_by_innovation(other);

  std::vector<std::uint64_t> innovations;
  for (const auto& [inn, _] : best_idx) innovations.push_back(inn);
  for (const auto& [inn, _] : other_idx)
    if (!best_idx.count(inn)) innovations.push_back(inn);
  std::sort(innovations.begin(), innovations.end());

  for (std::uint64_t inn : innovations) {
    auto bit = best_idx.find(inn);
    auto oit = other_idx.find(inn);
    if (bit != best_idx.end() && oit != other_idx.end()) {
      // Shared gene: always copied; structure (incl. enabled) from best.
      GateSpec g = *bit->second;
      if (g.num_params() > 0) {
        const double r = rng.uniform() * cfg.line_l1 - cfg.line_l2;
        for (int p = 0; p < g.num_params(); ++p) {
          const double pb = bit->second->params[static_cast<std::size_t>(p)];
          const double po = oit->second->params[static_cast<std::size_t>(p)];
          g.params[static_cast<std::size_t>(p)] = po + r * (pb - po);
        }
      }
      child.gates.push_back(g);
    } else if (bit != best_idx.end()) {
      if (rng.bernoulli(cfg.best_keep_rate)) child.gates.push_back(*bit->second);
    } else {
      if (rng.bernoulli(cfg.other_keep_rate)) child.gates.push_back(*oit->second);
    }
  }
  sort_gates(child);
  return child;
}

CircuitGenome nary_crossover(const CircuitGenome& best,
                             const std::vector<CircuitGenome>& others,
                             const OperatorConfig& cfg, RngStream& rng) {
  if (others.empty())
    throw std::invalid_argument("nary_crossover: needs at least one other parent");
  std::vector<std::int64_t> parent_ids = {best.genome_id};
  for (const auto& o : others) parent_ids.push_back(o.genome_id);
  CircuitGenome child = child_shell(best, "nary_crossover", std::move(parent_ids));

  const auto best_idx = index_by_innovation(best);
  std::vector<std::map<std::uint64_t, const GateSpec*>> other_idx;
  for (const auto& o : others) other_idx.push_back(index_by_innovation(o));

  std::vector<std::uint64_t> innovations;
  {
    std::vector<std::uint64_t> seen;
    for (const auto& [inn, _] : best_idx) seen.push_back(inn);
    for (const auto& idx : other_idx)
      for (const auto& [inn, _] : idx) seen.push_back(inn);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    innovations = std::move(seen);
  }

  for (std::uint64_t inn : innovations) {
    auto bit = best_idx.find(inn);
    // Carriers among the other parents, in their fitness order (the caller
    // passes `others` ranked or not; fittest carrier = lowest fitness).
    std::vector<std::size_t> carriers;
    for (std::size_t i = 0; i < other_idx.size(); ++i)
      if (other_idx[i].count(inn)) carriers.push_back(i);

    if (bit != best_idx.end() && !carriers.empty()) {
      if (!rng.bernoulli(cfg.best_keep_rate)) continue;
      GateSpec g = *bit->second;
      if (g.num_params() > 0) {
        const double r = rng.uniform() * cfg.line_l1 - cfg.line_l2;
        for (int p = 0; p < g.num_params(); ++p) {
          double avg = 0.0;
          for (std::size_t c : carriers)
            avg += other_idx[c].at(inn)->params[static_cast<std::size_t>(p)];
          avg /= static_cast<double>(carriers.size());
          const double pb = bit->second->params[static_cast<std::size_t>(p)];
          g.params[static_cast<std::size_t>(p)] = avg + r * (pb - avg);
        }
      }
      child.gates.push_back(g);
    } else if (bit != best_idx.end()) {
      if (rng.bernoulli(cfg.best_keep_rate)) child.gates.push_back(*bit->second);
    } else {
      if (!rng.bernoulli(cfg.other_keep_rate)) continue;
      // Structure from the fittest carrier, params averaged over carriers.
      std::size_t fittest = carriers[0];
      double fittest_loss = std::numeric_limits<double>::infinity();
      for (std::size_t c : carriers) {
        const double loss =
            others[c].fitness.value_or(std::numeric_limits<double>::infinity());
        if (loss < fittest_loss) {
          fittest_loss = loss;
          fittest = c;
        }
      }
      GateSpec g = *other_idx[fittest].at(inn);
      for (int p = 0; p < g.num_params(); ++p) {
        double avg = 0.0;
        for (std::size_t c : carriers)
          avg += other_idx[c].at(inn)->params[static_cast<std::size_t>(p)];
        g.params[static_cast<std::size_t>(p)] = avg / static_cast<double>(carriers.size());
      }
      child.gates.push_back(g);
    }
  }
  sort_gates(child);
  return child;
}

CircuitGenome exponential_crossover(const CircuitGenome& p1, const CircuitGenome& p2,
                                    RngStream& rng) {
  const double cut = rng.uniform();
  CircuitGenome child =
      child_shell(p1, "exponential_crossover", {p1.genome_id, p2.genome_id});
  for (const GateSpec& g : p1.gates)
    if (g.depth < cut) child.gates.push_back(g);
  for (const GateSpec& g : p2.gates) {
    if (g.depth < cut) continue;
    bool dup = false;
    for (const GateSpec& have : child.gates) dup = dup || have.innovation == g.innovation;
    if (!dup) child.gates.push_back(g);
  }
  sort_gates(child);
  return child;
}

}  // namespace qcevo
