#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qcevo/bench.hpp"
#include "qcevo/engine.hpp"

namespace qcevo {

// Merged run configuration: task selection, output location, and every
// evolution / training / operator / split knob, each with a documented
// default matching the reference protocol. Loaded from a flat key=value
// file ('#' comments) with command-line overrides applied on top.
struct RunConfig {
  std::string task;          // dataset name or teacher task name
  std::string dataset_path;  // empty -> data/<task>.csv
  int qubits = 0;            // 0 -> per-task default
  std::string out;           // empty -> runs/<task>/seed<seed>
  int seeds = 1;             // run this many consecutive seeds
  bool resume = false;       // continue from an existing checkpoint in out
  EvolutionConfig evolution;
  SplitConfig split;

  void validate() const;  // ConfigError on missing task or bad ranges
};

RunConfig default_run_config();

// Applies one key=value setting. ConfigError on unknown keys or values that
// fail to parse. Keys mirror the resolved-file layout (see
// resolved_config_text).
void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value);

// Defaults, then the optional config file, then overrides, then validate().
// A nonexistent config path is a ConfigError naming the path.
RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::pair<std::string, std::string>>&
                              overrides);

// Full key=value dump of the configuration, one key per line, parseable by
// load_run_config. Written as config.resolved next to run artifacts.
std::string resolved_config_text(const RunConfig& cfg);

// Effective CSV path: cfg.dataset_path or data/<task>.csv.
std::string dataset_csv_path(const RunConfig& cfg);

// Effective output directory: cfg.out or runs/<task>/seed<seed>.
std::string run_output_dir(const RunConfig& cfg, std::uint64_t seed);

// Maps a CLI task name ("bell_teacher", "multi_layer", ...) onto a teacher
// family; nullopt when the name is not a teacher task.
std::optional<TeacherFamily> teacher_task_family(const std::string& task);

// Register width used when cfg.qubits is 0.
int default_teacher_qubits(TeacherFamily family);

// Builds the task for one run. Dataset tasks load and split the CSV;
// teacher tasks draw the reference circuit and probes from `seed`.
// ConfigError on unknown task names or unloadable data.
TaskSpec build_task(const RunConfig& cfg, std::uint64_t seed);

}  // namespace qcevo
