#include "qcevo/genome.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace qcevo {

using json = nlohmann::ordered_json;

const GateSpec* CircuitGenome::find_innovation(std::uint64_t innovation) const {
  for (const auto& g : gates)
    if (g.innovation == innovation) return &g;
  return nullptr;
}

std::size_t CircuitGenome::enabled_count() const {
  std::size_t n = 0;
  for (const auto& g : gates) n += g.enabled ? 1 : 0;
  return n;
}

CircuitGenome make_base_genome(int num_qubits, std::vector<int> input_qubits,
                               std::vector<int> output_qubits) {
  if (num_qubits <= 0) throw std::invalid_argument("make_base_genome: num_qubits must be positive");
  if (input_qubits.empty() || output_qubits.empty())
    throw std::invalid_argument("make_base_genome: input and output registers must be nonempty");
  for (int q : input_qubits)
    if (q < 0 || q >= num_qubits) throw std::out_of_range("make_base_genome: input qubit out of range");
  for (int q : output_qubits)
    if (q < 0 || q >= num_qubits) throw std::out_of_range("make_base_genome: output qubit out of range");
  CircuitGenome g;
  g.num_qubits = num_qubits;
  g.input_qubits = std::move(input_qubits);
  g.output_qubits = std::move(output_qubits);
  return g;
}

void sort_gates(CircuitGenome& genome) {
  std::stable_sort(genome.gates.begin(), genome.gates.end(), gate_order_less);
}

CircuitGenome insert_gate(const CircuitGenome& genome, const GateSpec& gate) {
  if (genome.find_innovation(gate.innovation))
    throw std::invalid_argument("insert_gate: duplicate innovation " +
                                std::to_string(gate.innovation));
  CircuitGenome out = genome;
  auto pos = std::upper_bound(out.gates.begin(), out.gates.end(), gate, gate_order_less);
  out.gates.insert(pos, gate);
  return out;
}

namespace {

// Shared forward touch sweep: marks every qubit of an enabled gate if any of
// its qubits is already marked. `keep` filters which gates participate;
// `iter` walks them in the requested direction.
template <typename Iter, typename Keep>
std::vector<bool> touch_sweep(const CircuitGenome& genome,
                              const std::vector<int>& seeds, Iter begin,
                              Iter end, Keep keep) {
  std::vector<bool> touched(static_cast<std::size_t>(genome.num_qubits), false);
  for (int q : seeds) touched[static_cast<std::size_t>(q)] = true;
  for (Iter it = begin; it != end; ++it) {
    const GateSpec& g = *it;
    if (!g.enabled || !keep(g)) continue;
    bool any = false;
    for (int i = 0; i < g.arity(); ++i) any = any || touched[static_cast<std::size_t>(g.qubits[i])];
    if (any)
      for (int i = 0; i < g.arity(); ++i) touched[static_cast<std::size_t>(g.qubits[i])] = true;
  }
  return touched;
}

}  // namespace

std::vector<bool> reachable_from_inputs(const CircuitGenome& genome, double depth) {
  return touch_sweep(genome, genome.input_qubits, genome.gates.begin(),
                     genome.gates.end(),
                     [depth](const GateSpec& g) { return g.depth < depth; });
}

std::vector<bool> connects_to_outputs(const CircuitGenome& genome, double depth) {
  return touch_sweep(genome, genome.output_qubits, genome.gates.rbegin(),
                     genome.gates.rend(),
                     [depth](const GateSpec& g) { return g.depth >= depth; });
}

bool is_valid(const CircuitGenome& genome) {
  // Sweep the whole circuit (depth bound above every gate's depth).
  std::vector<bool> touched = reachable_from_inputs(genome, 2.0);
  for (int q : genome.output_qubits)
    if (touched[static_cast<std::size_t>(q)]) return true;
  return false;
}

std::string serialize(const CircuitGenome& genome) {
  json doc;
  doc["genome_id"] = genome.genome_id;
  doc["num_qubits"] = genome.num_qubits;
  doc["input_qubits"] = genome.input_qubits;
  doc["output_qubits"] = genome.output_qubits;
  json gates = json::array();
  for (const GateSpec& g : genome.gates) {
    const GateInfo& gi = gate_info(g.kind);
    json jg;
    jg["innovation"] = g.innovation;
    jg["kind"] = std::string(gi.id);
    jg["depth"] = g.depth;
    json qubits;
    for (int i = 0; i < gi.arity; ++i) qubits[std::string(gi.slot_names[i])] = g.qubits[i];
    jg["qubits"] = std::move(qubits);
    json params = json::object();
    for (int i = 0; i < gi.num_params; ++i) params[std::string(gi.param_names[i])] = g.params[i];
    jg["params"] = std::move(params);
    jg["enabled"] = g.enabled;
    gates.push_back(std::move(jg));
  }
  doc["gates"] = std::move(gates);
  if (genome.fitness)
    doc["fitness"] = *genome.fitness;
  else
    doc["fitness"] = nullptr;
  doc["lineage"] = {{"operator", genome.lineage.op}, {"parents", genome.lineage.parents}};
  return doc.dump();
}

CircuitGenome deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("genome parse error: ") + e.what());
  }
  try {
    CircuitGenome g;
    g.genome_id = doc.at("genome_id").get<std::int64_t>();
    g.num_qubits = doc.at("num_qubits").get<int>();
    g.input_qubits = doc.at("input_qubits").get<std::vector<int>>();
    g.output_qubits = doc.at("output_qubits").get<std::vector<int>>();
    for (const json& jg : doc.at("gates")) {
      GateSpec spec;
      const std::string kind_id = jg.at("kind").get<std::string>();
      auto kind = gate_kind_from_id(kind_id);
      if (!kind)
        throw std::invalid_argument("genome parse error: unknown gate \"" + kind_id + "\"");
      spec.kind = *kind;
      const GateInfo& gi = gate_info(spec.kind);
      spec.innovation = jg.at("innovation").get<std::uint64_t>();
      spec.depth = jg.at("depth").get<double>();
      const json& qubits = jg.at("qubits");
      if (static_cast<int>(qubits.size()) != gi.arity)
        throw std::invalid_argument("genome parse error: gate \"" + kind_id +
                                    "\" expects " + std::to_string(gi.arity) + " qubit slots");
      for (int i = 0; i < gi.arity; ++i) {
        const std::string slot(gi.slot_names[i]);
        if (!qubits.contains(slot))
          throw std::invalid_argument("genome parse error: gate \"" + kind_id +
                                      "\" missing qubit slot \"" + slot + "\"");
        spec.qubits[static_cast<std::size_t>(i)] = qubits.at(slot).get<int>();
      }
      const json& params = jg.at("params");
      if (static_cast<int>(params.size()) != gi.num_params)
        throw std::invalid_argument("genome parse error: gate \"" + kind_id +
                                    "\" expects " + std::to_string(gi.num_params) + " params");
      for (int i = 0; i < gi.num_params; ++i) {
        const std::string name(gi.param_names[i]);
        if (!params.contains(name))
          throw std::invalid_argument("genome parse error: gate \"" + kind_id +
                                      "\" missing param \"" + name + "\"");
        spec.params[static_cast<std::size_t>(i)] = params.at(name).get<double>();
      }
      spec.enabled = jg.at("enabled").get<bool>();
      g.gates.push_back(spec);
    }
    if (doc.contains("fitness") && !doc.at("fitness").is_null())
      g.fitness = doc.at("fitness").get<double>();
    if (doc.contains("lineage")) {
      g.lineage.op = doc.at("lineage").value("operator", std::string());
      if (doc.at("lineage").contains("parents"))
        g.lineage.parents = doc.at("lineage").at("parents").get<std::vector<std::int64_t>>();
    }
    sort_gates(g);
    return g;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("genome parse error: ") + e.what());
  }
}

}  // namespace qcevo
