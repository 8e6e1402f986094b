#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcevo/error.hpp"
#include "qcevo/rng.hpp"
#include "qcevo/task.hpp"

namespace qcevo {

// ---- Dataset ingestion ---------------------------------------------------

struct SplitConfig {
  double test_fraction = 0.2;
  bool stratified = true;
  std::uint64_t split_seed = 0;
};

// Parsed numeric CSV. Header row (any non-numeric cell in line 1) is
// detected automatically and kept separately.
struct CsvTable {
  std::vector<std::string> header;          // empty when no header present
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;            // 1-based source line per row
};

// Throws ConfigError on unreadable files, inconsistent column counts, or
// non-numeric cells, naming the path and the 1-based line number.
CsvTable parse_csv(const std::string& path);
CsvTable parse_csv_text(const std::string& text, const std::string& source_name);

struct DatasetInfo {
  std::string name;
  int expected_columns;  // features + 1 trailing label column
  int num_qubits;
};

// The four built-in benchmarks: iris, wine, seeds, breast_cancer.
const std::vector<DatasetInfo>& dataset_registry();
const DatasetInfo* find_dataset_info(const std::string& name);

// Loads a registered dataset from CSV (label last; header optional), checks
// the column count, normalizes labels to 0-based, splits stratified by
// class, computes per-feature scaling ranges on the train split only, and
// caches the encoded input states. qubit_override > 0 replaces the
// registry's register size.
DatasetTask load_dataset(const std::string& name, const std::string& csv_path,
                         const SplitConfig& split, int qubit_override = 0);

// ---- Teacher circuits ----------------------------------------------------

enum class TeacherFamily {
  BaselineSingleGate,
  BellGenerator,
  InputControlled,
  MultiLayer,
};

const char* teacher_family_name(TeacherFamily family);
std::optional<TeacherFamily> teacher_family_from_name(const std::string& name);

// Builds the family's reference circuit and its probe/target set. Probes are
// every computational basis state when the register has <= 4 qubits, plus 16
// random product states (per-qubit polar z uniform in [-1,1], azimuth
// uniform in [0, 2pi)). Insufficient registers throw ConfigError
// (bell/multi_layer need >= 2 qubits, input_controlled >= 3).
TeacherTask make_teacher(TeacherFamily family, int num_qubits, RngStream& rng);

// Mean of the task's loss over all probes (default 1 - fidelity).
double teacher_fitness(const CircuitGenome& candidate, const TeacherTask& task);

// JSON round-trip: the teacher circuit in the genome schema plus probe and
// target amplitude arrays.
std::string serialize_teacher(const TeacherTask& task);
TeacherTask deserialize_teacher(const std::string& text);

}  // namespace qcevo
