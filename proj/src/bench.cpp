#include "qcevo/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qcevo/gates.hpp"
#include "qcevo/qsim.hpp"
#include "qcevo/trainer.hpp"

namespace qcevo {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

CsvTable parse_csv_text(const std::string& text, const std::string& source_name) {
  CsvTable out;
  std::size_t expected_cols = 0;
  bool saw_first = false;
  int line_no = 0;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_cells(line);

    if (!saw_first) {
      saw_first = true;
      expected_cols = cells.size();
      bool numeric = true;
      for (const std::string& c : cells)
        if (!parse_double(c)) numeric = false;
      if (!numeric) {
        out.header = cells;
        continue;
      }
    }

    if (cells.size() != expected_cols)
      throw ConfigError(source_name + " line " + std::to_string(line_no) +
                        ": expected " + std::to_string(expected_cols) +
                        " columns, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::optional<double> v = parse_double(cells[c]);
      if (!v)
        throw ConfigError(source_name + " line " + std::to_string(line_no) +
                          ": cell '" + cells[c] + "' (column " +
                          std::to_string(c + 1) + ") is not numeric");
      row.push_back(*v);
    }
    out.rows.push_back(std::move(row));
    out.line_numbers.push_back(line_no);
  }
  if (out.rows.empty())
    throw ConfigError(source_name + ": no data rows");
  return out;
}

CsvTable parse_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open dataset file: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv_text(buffer.str(), path);
}

const std::vector<DatasetInfo>& dataset_registry() {
  static const std::vector<DatasetInfo> registry = {
      {"iris", 5, 6},
      {"wine", 14, 7},
      {"seeds", 8, 7},
      {"breast_cancer", 31, 8},
  };
  return registry;
}

const DatasetInfo* find_dataset_info(const std::string& name) {
  for (const DatasetInfo& info : dataset_registry())
    if (info.name == name) return &info;
  return nullptr;
}

DatasetTask load_dataset(const std::string& name, const std::string& csv_path,
                         const SplitConfig& split, int qubit_override) {
  const DatasetInfo* info = find_dataset_info(name);
  if (info == nullptr)
    throw ConfigError("unknown dataset '" + name +
                      "' (expected iris, wine, seeds, or breast_cancer)");
  if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in (0, 1)");

  CsvTable csv = parse_csv(csv_path);
  if (static_cast<int>(csv.rows[0].size()) != info->expected_columns)
    throw ConfigError("dataset '" + name + "' expects " +
                      std::to_string(info->expected_columns) + " columns (" +
                      std::to_string(info->expected_columns - 1) +
                      " features + label), but " + csv_path + " has " +
                      std::to_string(csv.rows[0].size()));

  DatasetTask task;
  task.name = name;
  std::vector<long> raw_labels;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::vector<double>& row = csv.rows[r];
    double label_value = row.back();
    long rounded = std::lround(label_value);
    if (std::abs(label_value - static_cast<double>(rounded)) > 1e-9)
      throw ConfigError(csv_path + " line " + std::to_string(csv.line_numbers[r]) +
                        ": label " + std::to_string(label_value) +
                        " is not an integer");
    raw_labels.push_back(rounded);
    task.features.emplace_back(row.begin(), row.end() - 1);
  }

  // Normalize labels to 0-based (e.g. classes recorded as 1..K).
  long min_label = *std::min_element(raw_labels.begin(), raw_labels.end());
  long max_label = *std::max_element(raw_labels.begin(), raw_labels.end());
  int num_classes = static_cast<int>(max_label - min_label + 1);
  if (num_classes < 2)
    throw ConfigError("dataset '" + name + "' has a single class");
  for (long l : raw_labels) task.labels.push_back(static_cast<int>(l - min_label));
  task.num_classes = num_classes;

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t r = 0; r < task.labels.size(); ++r)
    by_class[static_cast<std::size_t>(task.labels[r])].push_back(static_cast<int>(r));
  for (int k = 0; k < num_classes; ++k)
    if (by_class[static_cast<std::size_t>(k)].size() < 2)
      throw ConfigError("dataset '" + name + "' class " + std::to_string(k) +
                        " has fewer than 2 rows; cannot split");

  int num_qubits = qubit_override > 0 ? qubit_override : info->num_qubits;
  int readout_bits = 1;
  while ((1 << readout_bits) < num_classes) ++readout_bits;
  if (num_qubits < readout_bits)
    throw ConfigError("dataset '" + name + "' needs at least " +
                      std::to_string(readout_bits) + " qubits for " +
                      std::to_string(num_classes) + " classes");
  task.num_input_qubits = num_qubits;
  for (int b = 0; b < readout_bits; ++b)
    task.readout.readout_qubits.push_back(num_qubits - readout_bits + b);
  task.readout.num_classes = num_classes;

  RngStream rng(split.split_seed);
  auto take_split = [&](std::vector<int>& indices) {
    rng.shuffle(indices);
    long want = std::lround(split.test_fraction * static_cast<double>(indices.size()));
    long n_test = std::clamp<long>(want, 1, static_cast<long>(indices.size()) - 1);
    for (std::size_t i = 0; i < indices.size(); ++i)
      (static_cast<long>(i) < n_test ? task.test_indices : task.train_indices)
          .push_back(indices[i]);
  };
  if (split.stratified) {
    for (std::vector<int>& indices : by_class) take_split(indices);
  } else {
    std::vector<int> all(task.labels.size());
    std::iota(all.begin(), all.end(), 0);
    take_split(all);
  }
  std::sort(task.train_indices.begin(), task.train_indices.end());
  std::sort(task.test_indices.begin(), task.test_indices.end());

  std::vector<std::vector<double>> train_rows;
  for (int idx : task.train_indices)
    train_rows.push_back(task.features[static_cast<std::size_t>(idx)]);
  task.ranges = feature_ranges(train_rows);
  for (int idx : task.train_indices)
    task.train_states.push_back(encode_features(
        task.features[static_cast<std::size_t>(idx)], num_qubits, task.ranges));
  for (int idx : task.test_indices)
    task.test_states.push_back(encode_features(
        task.features[static_cast<std::size_t>(idx)], num_qubits, task.ranges));

  task.validate();
  return task;
}

// ---- Teacher circuits ----------------------------------------------------

const char* teacher_family_name(TeacherFamily family) {
  switch (family) {
    case TeacherFamily::BaselineSingleGate: return "baseline_single_gate";
    case TeacherFamily::BellGenerator: return "bell_generator";
    case TeacherFamily::InputControlled: return "input_controlled";
    case TeacherFamily::MultiLayer: return "multi_layer";
  }
  throw std::logic_error("unknown teacher family");
}

std::optional<TeacherFamily> teacher_family_from_name(const std::string& name) {
  if (name == "baseline_single_gate") return TeacherFamily::BaselineSingleGate;
  if (name == "bell_generator") return TeacherFamily::BellGenerator;
  if (name == "input_controlled") return TeacherFamily::InputControlled;
  if (name == "multi_layer") return TeacherFamily::MultiLayer;
  return std::nullopt;
}

namespace {

GateSpec teacher_gate(std::uint64_t innovation, GateKind kind, double depth,
                      std::initializer_list<int> qubits,
                      std::initializer_list<double> params = {}) {
  GateSpec g;
  g.innovation = innovation;
  g.kind = kind;
  g.depth = depth;
  int i = 0;
  for (int q : qubits) g.qubits[static_cast<std::size_t>(i++)] = q;
  i = 0;
  for (double p : params) g.params[static_cast<std::size_t>(i++)] = p;
  return g;
}

StateVector random_product_state(RngStream& rng, int num_qubits) {
  StateVector state = make_state(num_qubits);
  for (int q = 0; q < num_qubits; ++q) {
    double z = rng.uniform(-1.0, 1.0);
    double phi = rng.uniform(0.0, 2.0 * kPi);
    apply_gate(state, GateKind::RY, {q}, {std::acos(z)});
    apply_gate(state, GateKind::Phase, {q}, {phi});
  }
  return state;
}

}  // namespace

TeacherTask make_teacher(TeacherFamily family, int num_qubits, RngStream& rng) {
  int min_qubits = 1;
  switch (family) {
    case TeacherFamily::BaselineSingleGate: min_qubits = 1; break;
    case TeacherFamily::BellGenerator: min_qubits = 2; break;
    case TeacherFamily::InputControlled: min_qubits = 3; break;  // Toffoli
    case TeacherFamily::MultiLayer: min_qubits = 2; break;       // CX ring
  }
  if (num_qubits < min_qubits)
    throw ConfigError(std::string("teacher family ") + teacher_family_name(family) +
                      " needs at least " + std::to_string(min_qubits) +
                      " qubits, got " + std::to_string(num_qubits));

  std::vector<int> all(static_cast<std::size_t>(num_qubits));
  std::iota(all.begin(), all.end(), 0);
  TeacherTask task;
  task.family = teacher_family_name(family);
  task.teacher = make_base_genome(num_qubits, all, all);
  for (int q = 0; q < num_qubits; ++q) task.observables.push_back({'Z', q});

  switch (family) {
    case TeacherFamily::BaselineSingleGate: {
      static const GateKind kinds[] = {GateKind::Identity, GateKind::H, GateKind::X};
      GateKind kind = kinds[rng.index(3)];
      int qubit = rng.index(static_cast<std::size_t>(num_qubits));
      task.teacher = insert_gate(task.teacher, teacher_gate(0, kind, 0.5, {qubit}));
      break;
    }
    case TeacherFamily::BellGenerator: {
      task.teacher = insert_gate(task.teacher, teacher_gate(0, GateKind::H, 0.25, {0}));
      task.teacher = insert_gate(task.teacher, teacher_gate(1, GateKind::CX, 0.5, {0, 1}));
      break;
    }
    case TeacherFamily::InputControlled: {
      // Entanglement flowing from the leading wires into the last wire.
      task.teacher = insert_gate(
          task.teacher, teacher_gate(0, GateKind::CX, 0.3, {0, num_qubits - 1}));
      task.teacher = insert_gate(
          task.teacher,
          teacher_gate(1, GateKind::Toffoli, 0.6, {0, 1, num_qubits - 1}));
      break;
    }
    case TeacherFamily::MultiLayer: {
      std::uint64_t innovation = 0;
      for (int q = 0; q < num_qubits; ++q)
        task.teacher = insert_gate(
            task.teacher, teacher_gate(innovation++, GateKind::RY, 0.1, {q},
                                       {rng.uniform(-kPi, kPi)}));
      for (int q = 0; q < num_qubits; ++q)
        task.teacher = insert_gate(
            task.teacher, teacher_gate(innovation++, GateKind::CX, 0.5,
                                       {q, (q + 1) % num_qubits}));
      for (int q = 0; q < num_qubits; ++q)
        task.teacher = insert_gate(
            task.teacher, teacher_gate(innovation++, GateKind::RY, 0.9, {q},
                                       {rng.uniform(-kPi, kPi)}));
      break;
    }
  }

  if (num_qubits <= 4) {
    for (std::uint64_t b = 0; b < (1ull << num_qubits); ++b)
      task.probes.push_back(make_state(num_qubits, b));
  }
  for (int j = 0; j < 16; ++j)
    task.probes.push_back(random_product_state(rng, num_qubits));
  for (const StateVector& probe : task.probes)
    task.targets.push_back(run_circuit(task.teacher, probe));

  task.validate();
  return task;
}

double teacher_fitness(const CircuitGenome& candidate, const TeacherTask& task) {
  return task_loss(candidate, TaskSpec(task));
}

// ---- Teacher serialization ----------------------------------------------

namespace {

nlohmann::ordered_json state_to_json(const StateVector& state) {
  nlohmann::ordered_json amps = nlohmann::ordered_json::array();
  for (const cplx& a : state.amps)
    amps.push_back(nlohmann::ordered_json::array({a.real(), a.imag()}));
  return amps;
}

StateVector state_from_json(const nlohmann::json& j, int num_qubits) {
  StateVector state;
  state.num_qubits = num_qubits;
  if (!j.is_array() || j.size() != (1ull << num_qubits))
    throw std::invalid_argument("teacher state has wrong amplitude count");
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("teacher amplitude is not a [re, im] pair");
    state.amps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  return state;
}

}  // namespace

std::string serialize_teacher(const TeacherTask& task) {
  nlohmann::ordered_json j;
  j["family"] = task.family;
  j["loss"] = loss_name(task.loss);
  j["teacher"] = nlohmann::ordered_json::parse(serialize(task.teacher));
  nlohmann::ordered_json obs = nlohmann::ordered_json::array();
  for (const ObservableSpec& o : task.observables)
    obs.push_back({{"axis", std::string(1, o.axis)}, {"qubit", o.qubit}});
  j["observables"] = obs;
  nlohmann::ordered_json probes = nlohmann::ordered_json::array();
  for (const StateVector& p : task.probes) probes.push_back(state_to_json(p));
  j["probes"] = probes;
  nlohmann::ordered_json targets = nlohmann::ordered_json::array();
  for (const StateVector& t : task.targets) targets.push_back(state_to_json(t));
  j["targets"] = targets;
  return j.dump();
}

TeacherTask deserialize_teacher(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("teacher JSON parse error: ") + e.what());
  }
  TeacherTask task;
  task.family = j.at("family").get<std::string>();
  if (!teacher_family_from_name(task.family))
    throw std::invalid_argument("unknown teacher family: " + task.family);
  std::string loss = j.at("loss").get<std::string>();
  std::optional<LossKind> kind = loss_from_name(loss);
  if (!kind) throw std::invalid_argument("unknown loss kind: " + loss);
  task.loss = *kind;
  task.teacher = deserialize(j.at("teacher").dump());
  if (j.contains("observables")) {
    for (const auto& o : j.at("observables")) {
      std::string axis = o.at("axis").get<std::string>();
      if (axis.size() != 1)
        throw std::invalid_argument("observable axis must be one character");
      task.observables.push_back({axis[0], o.at("qubit").get<int>()});
    }
  }
  for (const auto& p : j.at("probes"))
    task.probes.push_back(state_from_json(p, task.teacher.num_qubits));
  for (const auto& t : j.at("targets"))
    task.targets.push_back(state_from_json(t, task.teacher.num_qubits));
  task.validate();
  return task;
}

}  // namespace qcevo
