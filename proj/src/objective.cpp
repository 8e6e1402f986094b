#include "qcevo/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcevo {

namespace {
constexpr double kProbFloor = 1e-12;
}

const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::Fidelity: return "fidelity";
    case LossKind::Angular: return "angular";
    case LossKind::KlDivergence: return "kl_divergence";
    case LossKind::ObservableMse: return "observable_mse";
    case LossKind::CrossEntropy: return "cross_entropy";
  }
  return "?";
}

std::optional<LossKind> loss_from_name(const std::string& name) {
  for (LossKind k : {LossKind::Fidelity, LossKind::Angular, LossKind::KlDivergence,
                     LossKind::ObservableMse, LossKind::CrossEntropy})
    if (name == loss_name(k)) return k;
  return std::nullopt;
}

double fidelity(const StateVector& pred, const StateVector& target) {
  return std::norm(overlap(target, pred));
}

double fidelity_loss(const StateVector& pred, const StateVector& target) {
  return 1.0 - fidelity(pred, target);
}

double angular_distance(const StateVector& pred, const StateVector& target) {
  const double mag = std::clamp(std::abs(overlap(target, pred)), 0.0, 1.0);
  return std::acos(mag);
}

double kl_divergence(const std::vector<double>& pred_probs,
                     const std::vector<double>& target_probs) {
  if (pred_probs.size() != target_probs.size())
    throw std::invalid_argument("kl_divergence: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < target_probs.size(); ++i) {
    const double q = target_probs[i];
    if (q <= 0.0) continue;  // 0 * log(0/p) = 0
    total += q * std::log(q / std::max(pred_probs[i], kProbFloor));
  }
  return total;
}

double observable_mse(const StateVector& pred, const StateVector& target,
                      const std::vector<ObservableSpec>& observables) {
  if (observables.empty())
    throw std::invalid_argument("observable_mse: empty observable list");
  double total = 0.0;
  for (const ObservableSpec& obs : observables) {
    const double diff = expectation(pred, obs) - expectation(target, obs);
    total += diff * diff;
  }
  return total / static_cast<double>(observables.size());
}

void ReadoutMap::validate() const {
  if (num_classes < 2) throw std::invalid_argument("ReadoutMap: need at least 2 classes");
  if (readout_qubits.empty()) throw std::invalid_argument("ReadoutMap: no readout qubits");
  if ((std::size_t{1} << readout_qubits.size()) < static_cast<std::size_t>(num_classes))
    throw std::invalid_argument("ReadoutMap: 2^qubits must cover num_classes");
}

std::vector<double> readout_distribution(const StateVector& state, const ReadoutMap& map) {
  const auto marginal = marginal_probabilities(state, map.readout_qubits);
  std::vector<double> probs(static_cast<std::size_t>(map.num_classes));
  double mass = 0.0;
  for (int k = 0; k < map.num_classes; ++k) {
    probs[static_cast<std::size_t>(k)] = marginal[static_cast<std::size_t>(k)];
    mass += marginal[static_cast<std::size_t>(k)];
  }
  if (mass <= 0.0) {
    std::fill(probs.begin(), probs.end(), 1.0 / map.num_classes);
    return probs;
  }
  for (double& p : probs) p /= mass;
  return probs;
}

double cross_entropy(const std::vector<double>& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    throw std::out_of_range("cross_entropy: label out of range");
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbFloor));
}

std::vector<FeatureRange> feature_ranges(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("feature_ranges: no rows");
  std::vector<FeatureRange> ranges(rows[0].size());
  for (std::size_t j = 0; j < ranges.size(); ++j)
    ranges[j] = {rows[0][j], rows[0][j]};
  for (const auto& row : rows) {
    if (row.size() != ranges.size())
      throw std::invalid_argument("feature_ranges: ragged rows");
    for (std::size_t j = 0; j < row.size(); ++j) {
      ranges[j].min = std::min(ranges[j].min, row[j]);
      ranges[j].max = std::max(ranges[j].max, row[j]);
    }
  }
  return ranges;
}

std::vector<double> encode_angles(const std::vector<double>& features,
                                  const std::vector<FeatureRange>& ranges) {
  if (features.empty()) throw std::invalid_argument("encode_angles: empty feature vector");
  if (features.size() != ranges.size())
    throw std::invalid_argument("encode_angles: range count mismatch");
  std::vector<double> angles(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double span = ranges[j].max - ranges[j].min;
    // Degenerate (constant) features carry no information: angle 0.
    const double t = span > 0.0 ? (features[j] - ranges[j].min) / span : 0.0;
    angles[j] = std::clamp(t, 0.0, 1.0) * M_PI;
  }
  return angles;
}

StateVector encode_features(const std::vector<double>& features, int num_input_qubits,
                            const std::vector<FeatureRange>& ranges) {
  const std::vector<double> angles = encode_angles(features, ranges);
  StateVector state = make_state(num_input_qubits);
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const int qubit = static_cast<int>(j) % num_input_qubits;
    const int layer = static_cast<int>(j) / num_input_qubits;
    const GateKind axis = (layer % 2 == 0) ? GateKind::RY : GateKind::RZ;
    apply_gate(state, axis, {qubit}, {angles[j]});
  }
  return state;
}

}  // namespace qcevo
