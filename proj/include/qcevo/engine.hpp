#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcevo/operators.hpp"
#include "qcevo/task.hpp"
#include "qcevo/trainer.hpp"

namespace qcevo {

// ---- Steady-state population --------------------------------------------

struct Population {
  int capacity = 50;
  std::vector<CircuitGenome> members;  // sorted by fitness ascending
  std::optional<CircuitGenome> best_ever;
  std::int64_t inserted_count = 0;
  std::int64_t discarded_count = 0;  // finite-loss insertions rejected

  bool full() const { return static_cast<int>(members.size()) >= capacity; }
  const CircuitGenome& best() const { return members.front(); }
  const CircuitGenome& worst() const { return members.back(); }

  // Throws std::logic_error if the capacity bound or the ascending fitness
  // order is violated. Run after every insertion.
  void audit() const;
};

enum class InsertOutcome { Inserted, Rejected, Failed };

// Below capacity: insert. At capacity: replace the worst member only on
// strict improvement. Non-finite or missing fitness: Failed. Keeps members
// sorted and best_ever current.
InsertOutcome try_insert(Population& pop, CircuitGenome genome);

// ---- Run configuration ---------------------------------------------------

struct EvolutionConfig {
  int population_capacity = 50;
  int max_genomes = 500;  // total genome ids issued (evaluated + discarded)
  int workers = 11;       // evaluation threads (the master is separate)
  OperatorConfig operators;
  TrainConfig train;
  std::uint64_t seed = 0;
  // Output directory for genomes.log / report.json / checkpoint.json; empty
  // disables file output (the log still accumulates in the RunReport).
  std::string checkpoint_dir;

  // Test instrumentation: when set, invoked on each worker evaluation as
  // (genome_id, attempt); throwing from it simulates a worker failure.
  std::function<void(std::int64_t, int)> fault_injector;

  void validate() const;
};

// ---- Messages across the master/worker boundary --------------------------
//
// Genomes cross only in serialized form; workers share no mutable state
// with the master.
struct WorkItem {
  std::int64_t genome_id = -1;
  std::string genome_json;
  std::string task_id;
  int attempt = 0;
};

struct ResultItem {
  std::int64_t genome_id = -1;
  bool ok = false;
  std::string trained_genome_json;  // set when ok
  FitnessReport report;             // set when ok
  double wall_time = 0.0;           // seconds spent in train+evaluate
  std::string error;                // set when !ok
  int attempt = 0;
};

// ---- Candidate generation ------------------------------------------------

// Ids charged while producing a candidate: chain intermediates superseded by
// the next mutation, operator draws that could not apply, and constructed
// children that failed validity.
struct DiscardRecord {
  std::int64_t genome_id = -1;
  std::string op;
  std::vector<std::int64_t> parents;
  std::string reason;  // "superseded" | "rejected" | "invalid"
  std::optional<CircuitGenome> genome;  // present unless the draw was rejected
};

// Draws operators per the configured rates (mutation chains only until the
// population is full), charging one genome id per attempt, until a candidate
// passes is_valid. The candidate's genome_id is assigned; discards are
// appended to `discards`. Throws std::runtime_error after 1000 attempts
// (a sign of a broken operator configuration).
CircuitGenome generate_candidate(const Population& pop, const CircuitGenome& base,
                                 const EvolutionConfig& cfg, RngStream& rng,
                                 InnovationCounter& innovations,
                                 std::int64_t& next_genome_id,
                                 std::vector<DiscardRecord>& discards);

// ---- Evolution run -------------------------------------------------------

struct RunReport {
  std::string task;
  std::uint64_t seed = 0;
  int max_genomes = 0;
  int workers = 0;
  std::int64_t evaluated = 0;
  std::int64_t discarded = 0;  // genome ids never evaluated
  std::int64_t failed = 0;
  std::int64_t population_size = 0;
  std::int64_t inserted = 0;
  std::int64_t rejected_insertions = 0;
  bool interrupted = false;
  std::optional<CircuitGenome> best_genome;
  FitnessReport best_report;
  std::int64_t best_genome_id = -1;
  // Best loss so far after each evaluated genome, in integration order.
  std::vector<double> fitness_trajectory;
  double total_eval_seconds = 0.0;  // summed worker wall time (report only)
  std::vector<std::string> log_lines;  // genomes.log content, one JSON per line

  nlohmann::ordered_json to_json() const;
};

// Asynchronous steady-state evolution: the master generates candidates,
// dispatches them to idle workers, and integrates results in arrival order
// with no generation barrier. Stops issuing ids at cfg.max_genomes, drains
// in-flight work, and (when checkpoint_dir is set) writes genomes.log,
// report.json, and checkpoint.json. A worker failure is re-dispatched once,
// then logged as failed. `stop` (optional) requests an early drain; the
// checkpoint is still flushed. Runs are deterministic at workers = 1.
RunReport run_evolution(const TaskSpec& task, const EvolutionConfig& cfg,
                        const std::atomic<bool>* stop = nullptr);

// Continues an interrupted or shorter run from cfg.checkpoint_dir: restores
// the population (by replaying the log), the genome-id and innovation
// counters, and the master RNG state, then runs to cfg.max_genomes
// appending to the same log. Throws ConfigError if the checkpoint is
// missing or inconsistent.
RunReport resume_evolution(const TaskSpec& task, const EvolutionConfig& cfg,
                           const std::atomic<bool>* stop = nullptr);

}  // namespace qcevo
