#include "qcevo/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "qcevo/error.hpp"

namespace qcevo {

// ---- Population ----------------------------------------------------------

void Population::audit() const {
  if (static_cast<int>(members.size()) > capacity)
    throw std::logic_error("population exceeds capacity");
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].fitness)
      throw std::logic_error("population member without fitness");
    if (i > 0 && *members[i - 1].fitness > *members[i].fitness)
      throw std::logic_error("population lost its fitness ordering");
  }
}

InsertOutcome try_insert(Population& pop, CircuitGenome genome) {
  if (!genome.fitness || !std::isfinite(*genome.fitness)) return InsertOutcome::Failed;
  double loss = *genome.fitness;
  if (pop.full()) {
    if (!(loss < *pop.worst().fitness)) {
      ++pop.discarded_count;
      return InsertOutcome::Rejected;
    }
    pop.members.pop_back();
  }
  auto it = std::upper_bound(
      pop.members.begin(), pop.members.end(), loss,
      [](double l, const CircuitGenome& m) { return l < *m.fitness; });
  if (!pop.best_ever || loss < *pop.best_ever->fitness) pop.best_ever = genome;
  pop.members.insert(it, std::move(genome));
  ++pop.inserted_count;
  pop.audit();
  return InsertOutcome::Inserted;
}

// ---- Config --------------------------------------------------------------

void EvolutionConfig::validate() const {
  if (population_capacity < 2)
    throw std::invalid_argument("population capacity must be >= 2");
  if (max_genomes < population_capacity)
    throw std::invalid_argument("max_genomes must be >= population capacity");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (population_capacity < operators.nary_parents)
    throw std::invalid_argument(
        "population capacity must cover the n-ary crossover parent count");
  operators.validate();
  train.validate();
}

// ---- Candidate generation ------------------------------------------------

namespace {

std::vector<int> draw_distinct_indices(RngStream& rng, int count, int size) {
  std::vector<int> out;
  while (static_cast<int>(out.size()) < count) {
    int pick = rng.index(static_cast<std::size_t>(size));
    if (std::find(out.begin(), out.end(), pick) == out.end()) out.push_back(pick);
  }
  return out;
}

}  // namespace

CircuitGenome generate_candidate(const Population& pop, const CircuitGenome& base,
                                 const EvolutionConfig& cfg, RngStream& rng,
                                 InnovationCounter& innovations,
                                 std::int64_t& next_genome_id,
                                 std::vector<DiscardRecord>& discards) {
  const OperatorConfig& ops = cfg.operators;
  constexpr int kRetryBudget = 1000;
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    bool init_phase = !pop.full();
    // 0 = binary, 1 = n-ary, 2 = exponential, 3 = mutation chain.
    int op_draw = init_phase ? 3 : rng.weighted(ops.reproduction_rate_vector());
    std::optional<CircuitGenome> candidate;

    if (op_draw == 3) {
      const CircuitGenome& parent =
          init_phase ? base : pop.members[static_cast<std::size_t>(
                                  rng.index(pop.members.size()))];
      CircuitGenome current = parent;
      bool have_child = false;
      for (int step = 0; step < ops.mutations_per_call; ++step) {
        MutationResult res = mutate_once(current, ops, rng, innovations);
        if (res.child) {
          CircuitGenome child = std::move(*res.child);
          child.genome_id = next_genome_id++;
          if (have_child)
            discards.push_back({current.genome_id, current.lineage.op,
                                current.lineage.parents, "superseded", current});
          current = std::move(child);
          have_child = true;
        } else {
          discards.push_back({static_cast<std::int64_t>(next_genome_id++),
                              mutation_name(res.kind),
                              {current.genome_id},
                              "rejected",
                              std::nullopt});
        }
      }
      if (!have_child) continue;  // both draws inapplicable; redraw
      candidate = std::move(current);
    } else {
      int arity = op_draw == 1 ? ops.nary_parents : 2;
      std::vector<int> picks = draw_distinct_indices(
          rng, arity, static_cast<int>(pop.members.size()));
      int best_pick = 0;
      for (int i = 1; i < arity; ++i) {
        if (*pop.members[static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])]
                 .fitness <
            *pop.members[static_cast<std::size_t>(
                             picks[static_cast<std::size_t>(best_pick)])]
                 .fitness)
          best_pick = i;
      }
      const CircuitGenome& best =
          pop.members[static_cast<std::size_t>(picks[static_cast<std::size_t>(best_pick)])];
      CircuitGenome child;
      if (op_draw == 0) {
        const CircuitGenome& other = pop.members[static_cast<std::size_t>(
            picks[best_pick == 0 ? 1 : 0])];
        child = binary_crossover(best, other, ops, rng);
      } else if (op_draw == 1) {
        std::vector<CircuitGenome> others;
        for (int i = 0; i < arity; ++i)
          if (i != best_pick)
            others.push_back(pop.members[static_cast<std::size_t>(
                picks[static_cast<std::size_t>(i)])]);
        child = nary_crossover(best, others, ops, rng);
      } else {
        // Depth partition keeps the first-drawn parent on collisions.
        const CircuitGenome& p1 = pop.members[static_cast<std::size_t>(picks[0])];
        const CircuitGenome& p2 = pop.members[static_cast<std::size_t>(picks[1])];
        child = exponential_crossover(p1, p2, rng);
      }
      child.genome_id = next_genome_id++;
      candidate = std::move(child);
    }

    if (is_valid(*candidate)) return std::move(*candidate);
    discards.push_back({candidate->genome_id, candidate->lineage.op,
                        candidate->lineage.parents, "invalid",
                        std::move(candidate)});
  }
  throw std::runtime_error(
      "generate_candidate: no valid candidate after 1000 attempts; operator "
      "configuration cannot produce valid circuits for this task");
}

// ---- Queues and logging --------------------------------------------------

namespace {

template <typename T>
class BlockingQueue {
 public:
  void push(T item) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }
  // Blocks until an item or shutdown; nullopt means shut down and drained.
  std::optional<T> pop() {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    return item;
  }
  void close() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<T> items_;
  bool closed_ = false;
};

struct LogSink {
  std::ofstream file;
  std::vector<std::string>* lines = nullptr;

  void emit(const nlohmann::ordered_json& j) {
    std::string line = j.dump();
    if (lines) lines->push_back(line);
    if (file.is_open()) {
      file << line << '\n';
      file.flush();
    }
  }
};

nlohmann::ordered_json genome_json(const CircuitGenome& genome) {
  return nlohmann::ordered_json::parse(serialize(genome));
}

nlohmann::ordered_json discard_log_line(const DiscardRecord& d) {
  nlohmann::ordered_json j;
  j["genome_id"] = d.genome_id;
  j["status"] = "discarded";
  j["operator"] = d.op;
  j["parents"] = d.parents;
  j["reason"] = d.reason;
  if (d.genome) j["genome"] = genome_json(*d.genome);
  return j;
}

// Master-side bookkeeping shared by fresh and resumed runs.
struct MasterState {
  Population pop;
  RngStream rng;
  InnovationCounter innovations;
  std::int64_t next_genome_id = 0;
  std::int64_t evaluated = 0;
  std::int64_t discarded = 0;
  std::int64_t failed = 0;
  std::optional<CircuitGenome> best_genome;
  FitnessReport best_report;
  std::int64_t best_genome_id = -1;
  std::vector<double> fitness_trajectory;
  double total_eval_seconds = 0.0;
};

void worker_main(const TaskSpec& task, const EvolutionConfig& cfg,
                 BlockingQueue<WorkItem>& work, BlockingQueue<ResultItem>& results) {
  while (std::optional<WorkItem> item = work.pop()) {
    ResultItem res;
    res.genome_id = item->genome_id;
    res.attempt = item->attempt;
    auto start = std::chrono::steady_clock::now();
    try {
      if (cfg.fault_injector) cfg.fault_injector(item->genome_id, item->attempt);
      CircuitGenome genome = deserialize(item->genome_json);
      TrainResult trained = train(genome, task, cfg.train);
      if (trained.failed) {
        res.error = "training aborted on non-finite loss";
      } else {
        trained.genome.fitness = trained.final_loss;
        res.report = evaluate(trained.genome, task);
        res.trained_genome_json = serialize(trained.genome);
        res.ok = true;
      }
    } catch (const std::exception& e) {
      res.ok = false;
      res.error = e.what();
    }
    res.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    results.push(std::move(res));
  }
}

struct PendingItem {
  WorkItem item;
  std::string op;
  std::vector<std::int64_t> parents;
};

RunReport run_master(const TaskSpec& task, const EvolutionConfig& cfg,
                     const std::atomic<bool>* stop, MasterState st,
                     std::vector<std::string> prior_lines, bool append_log) {
  RunReport report;
  report.task = task_id(task);
  report.seed = cfg.seed;
  report.max_genomes = cfg.max_genomes;
  report.workers = cfg.workers;
  report.log_lines = std::move(prior_lines);

  LogSink log;
  log.lines = &report.log_lines;
  std::filesystem::path dir;
  if (!cfg.checkpoint_dir.empty()) {
    dir = cfg.checkpoint_dir;
    std::filesystem::create_directories(dir);
    log.file.open(dir / "genomes.log",
                  append_log ? std::ios::app : std::ios::trunc);
    if (!log.file)
      throw ConfigError("cannot open log file in " + cfg.checkpoint_dir);
  }

  CircuitGenome base = task_base_genome(task);
  base.genome_id = -1;

  BlockingQueue<WorkItem> work;
  BlockingQueue<ResultItem> results;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(cfg.workers));
  for (int w = 0; w < cfg.workers; ++w)
    workers.emplace_back(worker_main, std::cref(task), std::cref(cfg),
                         std::ref(work), std::ref(results));
  auto shutdown = [&] {
    work.close();
    for (std::thread& t : workers)
      if (t.joinable()) t.join();
  };

  std::map<std::int64_t, PendingItem> in_flight;
  int active = 0;

  try {
    auto dispatch_one = [&]() -> bool {
      if (st.next_genome_id >= cfg.max_genomes) return false;
      if (stop != nullptr && stop->load()) return false;
      std::vector<DiscardRecord> discards;
      CircuitGenome candidate = generate_candidate(
          st.pop, base, cfg, st.rng, st.innovations, st.next_genome_id, discards);
      for (const DiscardRecord& d : discards) {
        log.emit(discard_log_line(d));
        ++st.discarded;
      }
      PendingItem pending;
      pending.item = {candidate.genome_id, serialize(candidate), report.task, 0};
      pending.op = candidate.lineage.op;
      pending.parents = candidate.lineage.parents;
      in_flight[candidate.genome_id] = pending;
      work.push(pending.item);
      ++active;
      return true;
    };

    while (true) {
      while (active < cfg.workers && dispatch_one()) {
      }
      if (active == 0) break;
      std::optional<ResultItem> popped = results.pop();
      if (!popped) break;  // not reachable: queue closes only after this loop
      ResultItem res = std::move(*popped);
      --active;
      auto pending_it = in_flight.find(res.genome_id);
      if (pending_it == in_flight.end())
        throw std::logic_error("result for unknown genome id");

      if (!res.ok && res.attempt == 0) {
        // One retry per the failure contract, then give up on the item.
        WorkItem retry = pending_it->second.item;
        retry.attempt = 1;
        work.push(std::move(retry));
        ++active;
        continue;
      }

      PendingItem pending = std::move(pending_it->second);
      in_flight.erase(pending_it);

      if (!res.ok) {
        ++st.failed;
        nlohmann::ordered_json j;
        j["genome_id"] = res.genome_id;
        j["status"] = "failed";
        j["operator"] = pending.op;
        j["parents"] = pending.parents;
        j["error"] = res.error;
        log.emit(j);
        continue;
      }

      CircuitGenome trained = deserialize(res.trained_genome_json);
      InsertOutcome outcome = try_insert(st.pop, trained);
      if (outcome == InsertOutcome::Failed) {
        ++st.failed;
        nlohmann::ordered_json j;
        j["genome_id"] = res.genome_id;
        j["status"] = "failed";
        j["operator"] = pending.op;
        j["parents"] = pending.parents;
        j["error"] = "non-finite loss";
        log.emit(j);
        continue;
      }

      ++st.evaluated;
      st.total_eval_seconds += res.wall_time;
      if (!st.best_genome || res.report.loss < st.best_report.loss) {
        st.best_genome = trained;
        st.best_report = res.report;
        st.best_genome_id = res.genome_id;
      }
      st.fitness_trajectory.push_back(st.best_report.loss);

      nlohmann::ordered_json j;
      j["genome_id"] = res.genome_id;
      j["status"] = "evaluated";
      j["operator"] = trained.lineage.op;
      j["parents"] = trained.lineage.parents;
      j["loss"] = res.report.loss;
      j["report"] = fitness_report_to_json(res.report);
      j["inserted"] = outcome == InsertOutcome::Inserted;
      j["genome"] = genome_json(trained);
      log.emit(j);
    }
  } catch (...) {
    shutdown();
    throw;
  }
  shutdown();

  report.evaluated = st.evaluated;
  report.discarded = st.discarded;
  report.failed = st.failed;
  report.population_size = static_cast<std::int64_t>(st.pop.members.size());
  report.inserted = st.pop.inserted_count;
  report.rejected_insertions = st.pop.discarded_count;
  report.interrupted = st.next_genome_id < cfg.max_genomes;
  report.best_genome = st.best_genome;
  report.best_report = st.best_report;
  report.best_genome_id = st.best_genome_id;
  report.fitness_trajectory = std::move(st.fitness_trajectory);
  report.total_eval_seconds = st.total_eval_seconds;

  if (!cfg.checkpoint_dir.empty()) {
    {
      std::ofstream out(dir / "report.json", std::ios::trunc);
      out << report.to_json().dump(2) << '\n';
    }
    nlohmann::ordered_json cp;
    cp["task"] = report.task;
    cp["next_genome_id"] = st.next_genome_id;
    cp["next_innovation"] = st.innovations.peek();
    cp["rng_state"] = st.rng.save_state();
    cp["evaluated"] = st.evaluated;
    cp["discarded"] = st.discarded;
    cp["failed"] = st.failed;
    std::ofstream out(dir / "checkpoint.json", std::ios::trunc);
    out << cp.dump(2) << '\n';
  }
  return report;
}

}  // namespace

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["seed"] = seed;
  j["max_genomes"] = max_genomes;
  j["workers"] = workers;
  j["evaluated"] = evaluated;
  j["discarded"] = discarded;
  j["failed"] = failed;
  j["population_size"] = population_size;
  j["inserted"] = inserted;
  j["rejected_insertions"] = rejected_insertions;
  j["interrupted"] = interrupted;
  if (best_genome) {
    nlohmann::ordered_json best;
    best["genome_id"] = best_genome_id;
    best["report"] = fitness_report_to_json(best_report);
    best["num_gates"] = best_genome->enabled_count();
    best["genome"] = genome_json(*best_genome);
    j["best"] = best;
  } else {
    j["best"] = nullptr;
  }
  j["fitness_trajectory"] = fitness_trajectory;
  j["total_eval_seconds"] = total_eval_seconds;
  return j;
}

RunReport run_evolution(const TaskSpec& task, const EvolutionConfig& cfg,
                        const std::atomic<bool>* stop) {
  cfg.validate();
  MasterState st;
  st.pop.capacity = cfg.population_capacity;
  st.rng = RngStream(cfg.seed);
  return run_master(task, cfg, stop, std::move(st), {}, /*append_log=*/false);
}

RunReport resume_evolution(const TaskSpec& task, const EvolutionConfig& cfg,
                           const std::atomic<bool>* stop) {
  cfg.validate();
  if (cfg.checkpoint_dir.empty())
    throw ConfigError("resume requires a checkpoint directory");
  std::filesystem::path dir = cfg.checkpoint_dir;

  std::ifstream cp_file(dir / "checkpoint.json");
  if (!cp_file)
    throw ConfigError("no checkpoint.json in " + cfg.checkpoint_dir);
  nlohmann::json cp;
  try {
    cp_file >> cp;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("unreadable checkpoint.json: ") + e.what());
  }
  if (cp.at("task").get<std::string>() != task_id(task))
    throw ConfigError("checkpoint belongs to task '" +
                      cp.at("task").get<std::string>() + "', not '" +
                      task_id(task) + "'");

  MasterState st;
  st.pop.capacity = cfg.population_capacity;
  st.rng.load_state(cp.at("rng_state").get<std::string>());
  st.innovations = InnovationCounter(cp.at("next_innovation").get<std::uint64_t>());
  st.next_genome_id = cp.at("next_genome_id").get<std::int64_t>();

  std::ifstream log_file(dir / "genomes.log");
  if (!log_file) throw ConfigError("no genomes.log in " + cfg.checkpoint_dir);
  std::vector<std::string> prior_lines;
  std::string line;
  while (std::getline(log_file, line)) {
    if (line.empty()) continue;
    prior_lines.push_back(line);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("corrupt genomes.log line: ") + e.what());
    }
    std::string status = j.at("status").get<std::string>();
    if (status == "discarded") {
      ++st.discarded;
    } else if (status == "failed") {
      ++st.failed;
    } else if (status == "evaluated") {
      ++st.evaluated;
      CircuitGenome genome = deserialize(j.at("genome").dump());
      FitnessReport rep = fitness_report_from_json(j.at("report"));
      InsertOutcome outcome = try_insert(st.pop, genome);
      if ((outcome == InsertOutcome::Inserted) != j.at("inserted").get<bool>())
        throw ConfigError("checkpoint replay diverged from logged insertions");
      if (!st.best_genome || rep.loss < st.best_report.loss) {
        st.best_genome = genome;
        st.best_report = rep;
        st.best_genome_id = j.at("genome_id").get<std::int64_t>();
      }
      st.fitness_trajectory.push_back(st.best_report.loss);
    } else {
      throw ConfigError("unknown status in genomes.log: " + status);
    }
  }
  if (st.evaluated != cp.at("evaluated").get<std::int64_t>() ||
      st.discarded != cp.at("discarded").get<std::int64_t>() ||
      st.failed != cp.at("failed").get<std::int64_t>())
    throw ConfigError("checkpoint counters disagree with genomes.log");

  return run_master(task, cfg, stop, std::move(st), std::move(prior_lines),
                    /*append_log=*/true);
}

}  // namespace qcevo
