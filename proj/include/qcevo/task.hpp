#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcevo/genome.hpp"
#include "qcevo/objective.hpp"
#include "qcevo/qsim.hpp"

namespace qcevo {

// ---- Supervised dataset task --------------------------------------------
//
// A classification problem over a fixed qubit register. Input features are
// angle-encoded onto the register; class probabilities are read out of the
// trailing qubits. The train/test split is frozen at construction and the
// encoded input states are cached so repeated loss evaluations only pay for
// circuit execution.
struct DatasetTask {
  std::string name;
  std::vector<std::vector<double>> features;  // all rows, raw values
  std::vector<int> labels;                    // 0-based class labels
  std::vector<int> train_indices;
  std::vector<int> test_indices;
  int num_input_qubits = 0;
  int num_classes = 0;
  ReadoutMap readout;                 // trailing ceil(log2 K) qubits
  std::vector<FeatureRange> ranges;   // computed on the train split only
  std::vector<StateVector> train_states;  // encoded inputs, train order
  std::vector<StateVector> test_states;   // encoded inputs, test order

  int num_qubits() const { return num_input_qubits; }
  void validate() const;
};

// ---- Teacher-circuit imitation task -------------------------------------
//
// A fixed reference circuit defines target output states for a set of probe
// inputs; candidates are scored by how closely their outputs match.
struct TeacherTask {
  std::string family;  // baseline_single_gate | bell_generator |
                       // input_controlled | multi_layer
  CircuitGenome teacher;
  std::vector<StateVector> probes;
  std::vector<StateVector> targets;  // teacher applied to each probe
  LossKind loss = LossKind::Fidelity;
  // Observables for the observable_mse loss (default: Z on every qubit).
  std::vector<ObservableSpec> observables;

  int num_qubits() const { return teacher.num_qubits; }
  void validate() const;
};

using TaskSpec = std::variant<DatasetTask, TeacherTask>;

int task_num_qubits(const TaskSpec& task);

// Short stable identifier, e.g. "dataset:iris" or "teacher:bell_generator".
std::string task_id(const TaskSpec& task);

bool is_dataset_task(const TaskSpec& task);
bool is_teacher_task(const TaskSpec& task);

// ---- Evaluation summary --------------------------------------------------
struct FitnessReport {
  double loss = 0.0;
  std::optional<double> accuracy;  // dataset tasks: test-split accuracy
  std::optional<double> fidelity;  // teacher tasks: mean probe fidelity
  std::optional<double> angular;   // teacher tasks: mean angular distance
};

nlohmann::ordered_json fitness_report_to_json(const FitnessReport& report);
FitnessReport fitness_report_from_json(const nlohmann::json& j);

// The empty genome evolution starts from. Teacher tasks imitate the whole
// register, so inputs = outputs = all qubits. Dataset tasks mark the qubits
// touched by feature encoding as inputs and the readout qubits as outputs;
// when the feature count is below the register size the two sets are
// disjoint and a valid classifier must bridge them with gates.
CircuitGenome task_base_genome(const TaskSpec& task);

}  // namespace qcevo
