#include "qcevo/task.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcevo {

void DatasetTask::validate() const {
  if (name.empty()) throw std::invalid_argument("dataset task has empty name");
  if (features.size() != labels.size())
    throw std::invalid_argument("dataset feature/label count mismatch");
  if (num_input_qubits < 1) throw std::invalid_argument("dataset needs >= 1 qubit");
  if (num_classes < 2) throw std::invalid_argument("dataset needs >= 2 classes");
  readout.validate();
  if (train_indices.empty() || test_indices.empty())
    throw std::invalid_argument("dataset split has an empty side");
  if (train_indices.size() + test_indices.size() != features.size())
    throw std::invalid_argument("dataset split does not cover all rows");
  if (train_states.size() != train_indices.size() ||
      test_states.size() != test_indices.size())
    throw std::invalid_argument("dataset cached states out of sync with split");
  for (int label : labels)
    if (label < 0 || label >= num_classes)
      throw std::invalid_argument("dataset label out of class range");
}

void TeacherTask::validate() const {
  if (probes.size() != targets.size())
    throw std::invalid_argument("teacher probe/target count mismatch");
  if (probes.empty()) throw std::invalid_argument("teacher task has no probes");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (probes[i].num_qubits != teacher.num_qubits ||
        targets[i].num_qubits != teacher.num_qubits)
      throw std::invalid_argument("teacher probe qubit count mismatch");
  }
  if (loss == LossKind::CrossEntropy)
    throw std::invalid_argument("cross_entropy loss requires a dataset task");
  if (loss == LossKind::ObservableMse && observables.empty())
    throw std::invalid_argument("observable_mse loss requires observables");
}

int task_num_qubits(const TaskSpec& task) {
  return std::visit([](const auto& t) { return t.num_qubits(); }, task);
}

std::string task_id(const TaskSpec& task) {
  if (const auto* d = std::get_if<DatasetTask>(&task)) return "dataset:" + d->name;
  return "teacher:" + std::get<TeacherTask>(task).family;
}

bool is_dataset_task(const TaskSpec& task) {
  return std::holds_alternative<DatasetTask>(task);
}

bool is_teacher_task(const TaskSpec& task) {
  return std::holds_alternative<TeacherTask>(task);
}

CircuitGenome task_base_genome(const TaskSpec& task) {
  if (const auto* d = std::get_if<DatasetTask>(&task)) {
    int num_features =
        d->features.empty() ? 0 : static_cast<int>(d->features[0].size());
    int encoded = std::min(num_features, d->num_input_qubits);
    if (encoded < 1) encoded = d->num_input_qubits;
    std::vector<int> inputs;
    for (int q = 0; q < encoded; ++q) inputs.push_back(q);
    return make_base_genome(d->num_input_qubits, inputs, d->readout.readout_qubits);
  }
  const auto& t = std::get<TeacherTask>(task);
  return make_base_genome(t.teacher.num_qubits, t.teacher.input_qubits,
                          t.teacher.output_qubits);
}

nlohmann::ordered_json fitness_report_to_json(const FitnessReport& report) {
  nlohmann::ordered_json j;
  j["loss"] = report.loss;
  j["accuracy"] = report.accuracy ? nlohmann::ordered_json(*report.accuracy)
                                  : nlohmann::ordered_json(nullptr);
  j["fidelity"] = report.fidelity ? nlohmann::ordered_json(*report.fidelity)
                                  : nlohmann::ordered_json(nullptr);
  j["angular"] = report.angular ? nlohmann::ordered_json(*report.angular)
                                : nlohmann::ordered_json(nullptr);
  return j;
}

FitnessReport fitness_report_from_json(const nlohmann::json& j) {
  FitnessReport report;
  report.loss = j.at("loss").get<double>();
  if (j.contains("accuracy") && !j.at("accuracy").is_null())
    report.accuracy = j.at("accuracy").get<double>();
  if (j.contains("fidelity") && !j.at("fidelity").is_null())
    report.fidelity = j.at("fidelity").get<double>();
  if (j.contains("angular") && !j.at("angular").is_null())
    report.angular = j.at("angular").get<double>();
  return report;
}

}  // namespace qcevo
