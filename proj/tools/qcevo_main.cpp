#include <atomic>
#include <csignal>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcevo/config.hpp"
#include "qcevo/engine.hpp"
#include "qcevo/error.hpp"
#include "qcevo/render.hpp"

namespace fs = std::filesystem;
using namespace qcevo;

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

CircuitGenome load_genome_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return deserialize(text);
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse genome file " + path + ": " + e.what());
  }
}

// Collects --flag overrides for the flat config, remembering which flags the
// user actually passed so file values survive when a flag is absent.
class ConfigFlags {
 public:
  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path_,
                    "Flat key=value configuration file");
    add(cmd, "--task", "task", "Task: iris|wine|seeds|breast_cancer or "
                               "baseline_teacher|bell_teacher|"
                               "input_controlled_teacher|multi_layer_teacher");
    add(cmd, "--dataset-path", "dataset_path",
        "CSV path for dataset tasks (default data/<task>.csv)");
    add(cmd, "--qubits", "qubits", "Register width override (0 = task default)");
    add(cmd, "--max-genomes", "max_genomes", "Total genome ids to issue");
    add(cmd, "--population", "population", "Population capacity");
    add(cmd, "--workers", "workers", "Evaluation worker threads");
    add(cmd, "--seed", "seed", "Base random seed");
    add(cmd, "--epochs", "epochs", "Training epochs per genome");
    add(cmd, "--lr", "lr", "Adam learning rate");
    add(cmd, "--out", "out", "Output directory (default runs/<task>/seed<seed>)");
    add(cmd, "--seeds", "seeds", "Run this many consecutive seeds");
    resume_flag_ = cmd->add_flag("--resume",
                                 "Continue from the checkpoint in the output "
                                 "directory");
  }

  RunConfig load() const {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const Binding& b : bindings_)
      if (b.opt->count() > 0) overrides.emplace_back(b.key, b.value);
    if (resume_flag_ != nullptr && resume_flag_->count() > 0)
      overrides.emplace_back("resume", "true");
    return load_run_config(config_path_, overrides);
  }

 private:
  struct Binding {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
  };

  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    bindings_.push_back({key, "", nullptr});
    Binding& b = bindings_.back();
    b.opt = cmd->add_option(flag, b.value, help);
  }

  std::string config_path_;
  std::deque<Binding> bindings_;  // deque: stable addresses for CLI11 targets
  CLI::Option* resume_flag_ = nullptr;
};

std::string per_run_dir(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.out.empty()) return run_output_dir(cfg, seed);
  if (cfg.seeds == 1) return cfg.out;
  return cfg.out + "/seed" + std::to_string(seed);
}

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

int cmd_evolve(RunConfig cfg) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  struct Row {
    std::uint64_t seed;
    RunReport report;
    std::string dir;
  };
  std::vector<Row> rows;
  bool dataset = find_dataset_info(cfg.task) != nullptr;

  for (int k = 0; k < cfg.seeds; ++k) {
    std::uint64_t seed = cfg.evolution.seed + static_cast<std::uint64_t>(k);
    RunConfig run_cfg = cfg;
    run_cfg.evolution.seed = seed;
    run_cfg.seeds = 1;
    run_cfg.out = per_run_dir(cfg, seed);
    if (dataset) run_cfg.dataset_path = dataset_csv_path(run_cfg);
    run_cfg.evolution.checkpoint_dir = run_cfg.out;

    TaskSpec task = build_task(run_cfg, seed);
    fs::create_directories(run_cfg.out);
    write_text_file(fs::path(run_cfg.out) / "config.resolved",
                    resolved_config_text(run_cfg));

    RunReport report = run_cfg.resume
                           ? resume_evolution(task, run_cfg.evolution, &g_stop)
                           : run_evolution(task, run_cfg.evolution, &g_stop);
    if (report.best_genome)
      write_text_file(fs::path(run_cfg.out) / "best_genome.json",
                      serialize(*report.best_genome) + "\n");

    std::printf("seed %llu: evaluated %lld genomes, best loss %.6f (genome %lld), "
                "artifacts in %s\n",
                static_cast<unsigned long long>(seed),
                static_cast<long long>(report.evaluated), report.best_report.loss,
                static_cast<long long>(report.best_genome_id),
                run_cfg.out.c_str());
    rows.push_back({seed, std::move(report), run_cfg.out});
    if (g_stop.load()) {
      std::printf("interrupted; checkpoint flushed to %s\n", run_cfg.out.c_str());
      break;
    }
  }

  // Summary table: dataset runs report test accuracy, teacher runs fidelity
  // and angular distance, both with gate count and winning genome id.
  std::printf("\n");
  if (dataset)
    std::printf("%-16s %-6s %-10s %-10s %-8s %-8s\n", "Task", "Seed", "Loss",
                "Test Acc.", "# Gates", "Genome #");
  else
    std::printf("%-26s %-6s %-10s %-10s %-18s %-8s %-8s\n", "Task", "Seed",
                "Loss", "Fidelity", "Angular Distance", "# Gates", "Genome #");
  for (const Row& row : rows) {
    const RunReport& r = row.report;
    std::string gates =
        r.best_genome ? std::to_string(r.best_genome->enabled_count()) : "-";
    std::string genome_no =
        r.best_genome ? std::to_string(r.best_genome_id) : "-";
    if (dataset)
      std::printf("%-16s %-6llu %-10.4f %-10s %-8s %-8s\n", cfg.task.c_str(),
                  static_cast<unsigned long long>(row.seed), r.best_report.loss,
                  fmt_opt(r.best_report.accuracy).c_str(), gates.c_str(),
                  genome_no.c_str());
    else
      std::printf("%-26s %-6llu %-10.4f %-10s %-18s %-8s %-8s\n",
                  cfg.task.c_str(), static_cast<unsigned long long>(row.seed),
                  r.best_report.loss, fmt_opt(r.best_report.fidelity).c_str(),
                  fmt_opt(r.best_report.angular).c_str(), gates.c_str(),
                  genome_no.c_str());
  }

  if (rows.size() > 1) {
    auto mean_of = [&](auto pick) {
      double sum = 0.0;
      int n = 0;
      for (const Row& row : rows) {
        std::optional<double> v = pick(row.report.best_report);
        if (v) {
          sum += *v;
          ++n;
        }
      }
      return n > 0 ? std::optional<double>(sum / n) : std::nullopt;
    };
    nlohmann::ordered_json summary;
    summary["task"] = cfg.task;
    summary["runs"] = nlohmann::ordered_json::array();
    for (const Row& row : rows) {
      nlohmann::ordered_json jr;
      jr["seed"] = row.seed;
      jr["out"] = row.dir;
      jr["loss"] = row.report.best_report.loss;
      jr["report"] = fitness_report_to_json(row.report.best_report);
      jr["genome_id"] = row.report.best_genome_id;
      jr["num_gates"] = row.report.best_genome
                            ? nlohmann::ordered_json(
                                  row.report.best_genome->enabled_count())
                            : nlohmann::ordered_json(nullptr);
      summary["runs"].push_back(std::move(jr));
    }
    std::optional<double> acc =
        mean_of([](const FitnessReport& r) { return r.accuracy; });
    std::optional<double> fid =
        mean_of([](const FitnessReport& r) { return r.fidelity; });
    std::optional<double> ang =
        mean_of([](const FitnessReport& r) { return r.angular; });
    if (acc) {
      summary["mean_accuracy"] = *acc;
      std::printf("\nmean test accuracy over %zu seeds: %.4f\n", rows.size(),
                  *acc);
    }
    if (fid) {
      summary["mean_fidelity"] = *fid;
      std::printf("\nmean fidelity over %zu seeds: %.4f\n", rows.size(), *fid);
    }
    if (ang) summary["mean_angular"] = *ang;
    std::string base = cfg.out.empty() ? "runs/" + cfg.task : cfg.out;
    fs::create_directories(base);
    write_text_file(fs::path(base) / "summary.json", summary.dump(2) + "\n");
  }

  return g_stop.load() ? 1 : 0;
}

int cmd_eval(const std::string& genome_path, const RunConfig& cfg) {
  CircuitGenome genome = load_genome_file(genome_path);
  // The serialized form must survive a round trip before we trust it.
  if (serialize(deserialize(serialize(genome))) != serialize(genome))
    throw std::runtime_error("genome serialization failed to round-trip");
  TaskSpec task = build_task(cfg, cfg.evolution.seed);
  FitnessReport report;
  try {
    report = evaluate(genome, task);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("genome does not fit the task: ") + e.what());
  }
  std::cout << fitness_report_to_json(report).dump(2) << '\n';
  return 0;
}

int cmd_render(const std::string& genome_path) {
  CircuitGenome genome = load_genome_file(genome_path);
  std::cout << render_circuit(genome);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Evolutionary discovery and training of parameterized quantum circuits "
      "on a built-in statevector simulator"};
  app.require_subcommand(1);

  int rc = 0;

  CLI::App* evolve = app.add_subcommand(
      "evolve", "Run the evolutionary search and write run artifacts");
  ConfigFlags evolve_flags;
  evolve_flags.attach(evolve);
  evolve->callback([&] { rc = cmd_evolve(evolve_flags.load()); });

  CLI::App* eval = app.add_subcommand(
      "eval", "Score a saved genome against a task");
  ConfigFlags eval_flags;
  eval_flags.attach(eval);
  std::string eval_genome;
  eval->add_option("genome", eval_genome, "Genome JSON file")->required();
  eval->callback([&] { rc = cmd_eval(eval_genome, eval_flags.load()); });

  CLI::App* render = app.add_subcommand(
      "render", "Print a saved genome as an ASCII circuit diagram");
  std::string render_genome;
  render->add_option("genome", render_genome, "Genome JSON file")->required();
  render->callback([&] { rc = cmd_render(render_genome); });

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
