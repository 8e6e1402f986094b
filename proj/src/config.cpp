#include "qcevo/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qcevo/error.hpp"

namespace qcevo {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" +
                      value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    double out = std::stod(value, &consumed);
    if (consumed == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': expected a number, got '" +
                    value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" +
                    value + "'");
}

// Shortest round-trippable decimal form (what the JSON library emits).
std::string number_text(double v) { return nlohmann::json(v).dump(); }

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.evolution.seed = 1;
  return cfg;
}

void RunConfig::validate() const {
  if (task.empty())
    throw ConfigError("no task selected; set task= in the config or pass --task");
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  if (qubits < 0) throw ConfigError("qubits must be >= 0");
  if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in (0, 1)");
  try {
    evolution.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value) {
  EvolutionConfig& ev = cfg.evolution;
  TrainConfig& tr = ev.train;
  OperatorConfig& op = ev.operators;
  if (key == "task") cfg.task = value;
  else if (key == "dataset_path") cfg.dataset_path = value;
  else if (key == "qubits") cfg.qubits = static_cast<int>(parse_int(key, value));
  else if (key == "out") cfg.out = value;
  else if (key == "seeds") cfg.seeds = static_cast<int>(parse_int(key, value));
  else if (key == "resume") cfg.resume = parse_bool(key, value);
  else if (key == "population")
    ev.population_capacity = static_cast<int>(parse_int(key, value));
  else if (key == "max_genomes")
    ev.max_genomes = static_cast<int>(parse_int(key, value));
  else if (key == "workers") ev.workers = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    ev.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "epochs") tr.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "lr") tr.learning_rate = parse_double(key, value);
  else if (key == "weight_decay") tr.weight_decay = parse_double(key, value);
  else if (key == "gradient_mode") {
    auto mode = gradient_mode_from_name(value);
    if (!mode)
      throw ConfigError(
          "config key 'gradient_mode': expected finite_difference or "
          "parameter_shift, got '" + value + "'");
    tr.gradient_mode = *mode;
  } else if (key == "fd_step") tr.fd_step = parse_double(key, value);
  else if (key == "adam_beta1") tr.adam_beta1 = parse_double(key, value);
  else if (key == "adam_beta2") tr.adam_beta2 = parse_double(key, value);
  else if (key == "adam_eps") tr.adam_eps = parse_double(key, value);
  else if (key == "rate_binary") op.rate_binary = parse_double(key, value);
  else if (key == "rate_nary") op.rate_nary = parse_double(key, value);
  else if (key == "rate_exponential")
    op.rate_exponential = parse_double(key, value);
  else if (key == "rate_mutation") op.rate_mutation = parse_double(key, value);
  else if (key == "mutations_per_call")
    op.mutations_per_call = static_cast<int>(parse_int(key, value));
  else if (key == "rate_add_gate") op.rate_add_gate = parse_double(key, value);
  else if (key == "rate_reorder_gate")
    op.rate_reorder_gate = parse_double(key, value);
  else if (key == "rate_swap_qubits")
    op.rate_swap_qubits = parse_double(key, value);
  else if (key == "rate_enable_gate")
    op.rate_enable_gate = parse_double(key, value);
  else if (key == "rate_disable_gate")
    op.rate_disable_gate = parse_double(key, value);
  else if (key == "best_keep_rate") op.best_keep_rate = parse_double(key, value);
  else if (key == "other_keep_rate") op.other_keep_rate = parse_double(key, value);
  else if (key == "line_l1") op.line_l1 = parse_double(key, value);
  else if (key == "line_l2") op.line_l2 = parse_double(key, value);
  else if (key == "nary_parents")
    op.nary_parents = static_cast<int>(parse_int(key, value));
  else if (key == "test_fraction")
    cfg.split.test_fraction = parse_double(key, value);
  else if (key == "split_seed")
    cfg.split.split_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else
    throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_run_config(
    const std::string& config_path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg = default_run_config();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(config_path + " line " + std::to_string(line_no) +
                          ": expected key=value");
      apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  for (const auto& [key, value] : overrides) apply_config_kv(cfg, key, value);
  cfg.validate();
  return cfg;
}

std::string resolved_config_text(const RunConfig& cfg) {
  const EvolutionConfig& ev = cfg.evolution;
  const TrainConfig& tr = ev.train;
  const OperatorConfig& op = ev.operators;
  std::ostringstream out;
  out << "# task\n";
  out << "task=" << cfg.task << '\n';
  out << "dataset_path=" << cfg.dataset_path << '\n';
  out << "qubits=" << cfg.qubits << '\n';
  out << "out=" << cfg.out << '\n';
  out << "seeds=" << cfg.seeds << '\n';
  out << "resume=" << (cfg.resume ? "true" : "false") << '\n';
  out << "# evolution\n";
  out << "population=" << ev.population_capacity << '\n';
  out << "max_genomes=" << ev.max_genomes << '\n';
  out << "workers=" << ev.workers << '\n';
  out << "seed=" << ev.seed << '\n';
  out << "# training\n";
  out << "epochs=" << tr.epochs << '\n';
  out << "lr=" << number_text(tr.learning_rate) << '\n';
  out << "weight_decay=" << number_text(tr.weight_decay) << '\n';
  out << "gradient_mode=" << gradient_mode_name(tr.gradient_mode) << '\n';
  out << "fd_step=" << number_text(tr.fd_step) << '\n';
  out << "adam_beta1=" << number_text(tr.adam_beta1) << '\n';
  out << "adam_beta2=" << number_text(tr.adam_beta2) << '\n';
  out << "adam_eps=" << number_text(tr.adam_eps) << '\n';
  out << "# operators\n";
  out << "rate_binary=" << number_text(op.rate_binary) << '\n';
  out << "rate_nary=" << number_text(op.rate_nary) << '\n';
  out << "rate_exponential=" << number_text(op.rate_exponential) << '\n';
  out << "rate_mutation=" << number_text(op.rate_mutation) << '\n';
  out << "mutations_per_call=" << op.mutations_per_call << '\n';
  out << "rate_add_gate=" << number_text(op.rate_add_gate) << '\n';
  out << "rate_reorder_gate=" << number_text(op.rate_reorder_gate) << '\n';
  out << "rate_swap_qubits=" << number_text(op.rate_swap_qubits) << '\n';
  out << "rate_enable_gate=" << number_text(op.rate_enable_gate) << '\n';
  out << "rate_disable_gate=" << number_text(op.rate_disable_gate) << '\n';
  out << "best_keep_rate=" << number_text(op.best_keep_rate) << '\n';
  out << "other_keep_rate=" << number_text(op.other_keep_rate) << '\n';
  out << "line_l1=" << number_text(op.line_l1) << '\n';
  out << "line_l2=" << number_text(op.line_l2) << '\n';
  out << "nary_parents=" << op.nary_parents << '\n';
  out << "# data split\n";
  out << "test_fraction=" << number_text(cfg.split.test_fraction) << '\n';
  out << "split_seed=" << cfg.split.split_seed << '\n';
  return out.str();
}

std::string dataset_csv_path(const RunConfig& cfg) {
  if (!cfg.dataset_path.empty()) return cfg.dataset_path;
  return "data/" + cfg.task + ".csv";
}

std::string run_output_dir(const RunConfig& cfg, std::uint64_t seed) {
  if (!cfg.out.empty()) return cfg.out;
  return "runs/" + cfg.task + "/seed" + std::to_string(seed);
}

std::optional<TeacherFamily> teacher_task_family(const std::string& task) {
  if (task == "baseline_teacher") return TeacherFamily::BaselineSingleGate;
  if (task == "bell_teacher") return TeacherFamily::BellGenerator;
  if (task == "input_controlled_teacher") return TeacherFamily::InputControlled;
  if (task == "multi_layer_teacher") return TeacherFamily::MultiLayer;
  return teacher_family_from_name(task);
}

int default_teacher_qubits(TeacherFamily family) {
  switch (family) {
    case TeacherFamily::BaselineSingleGate: return 2;
    case TeacherFamily::BellGenerator: return 2;
    case TeacherFamily::InputControlled: return 3;
    case TeacherFamily::MultiLayer: return 3;
  }
  return 2;
}

TaskSpec build_task(const RunConfig& cfg, std::uint64_t seed) {
  if (find_dataset_info(cfg.task)) {
    return load_dataset(cfg.task, dataset_csv_path(cfg), cfg.split, cfg.qubits);
  }
  if (auto family = teacher_task_family(cfg.task)) {
    int q = cfg.qubits > 0 ? cfg.qubits : default_teacher_qubits(*family);
    RngStream rng(seed);
    return make_teacher(*family, q, rng);
  }
  throw ConfigError(
      "unknown task '" + cfg.task +
      "'; expected a dataset (iris, wine, seeds, breast_cancer) or a teacher "
      "task (baseline_teacher, bell_teacher, input_controlled_teacher, "
      "multi_layer_teacher)");
}

}  // namespace qcevo
