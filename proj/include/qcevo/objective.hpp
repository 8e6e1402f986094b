#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcevo/qsim.hpp"

namespace qcevo {

// Which loss drives fitness. Teacher-imitation tasks use the first four;
// dataset classification uses cross-entropy on the readout distribution.
enum class LossKind { Fidelity, Angular, KlDivergence, ObservableMse, CrossEntropy };
const char* loss_name(LossKind k);
std::optional<LossKind> loss_from_name(const std::string& name);

// ---- State-comparison losses -------------------------------------------

// F = |<target|pred>|^2. 1 means identical up to global phase.
double fidelity(const StateVector& pred, const StateVector& target);

// 1 - F, the minimized form.
double fidelity_loss(const StateVector& pred, const StateVector& target);

// arccos(|<target|pred>|), in [0, pi/2]; overlap magnitude clamped to [0,1]
// before arccos to absorb rounding.
double angular_distance(const StateVector& pred, const StateVector& target);

// sum_i q_i ln(q_i / p_i) with q = target_probs, p = pred_probs (target-
// weighted direction). q_i = 0 terms contribute 0; p_i is floored at 1e-12
// so the result stays finite. Lengths must match.
double kl_divergence(const std::vector<double>& pred_probs,
                     const std::vector<double>& target_probs);

// (1/K) sum_k (<O_k>_pred - <O_k>_target)^2 over the listed observables.
double observable_mse(const StateVector& pred, const StateVector& target,
                      const std::vector<ObservableSpec>& observables);

// ---- Classification readout --------------------------------------------

// Class readout: measure `readout_qubits`, restrict the marginal to the
// first `num_classes` basis labels of that register, renormalize.
struct ReadoutMap {
  std::vector<int> readout_qubits;  // length ceil(log2 K)
  int num_classes = 2;

  // The class-relevant basis states: labels 0..K-1 of the readout register.
  std::vector<int> class_basis_states() const {
    std::vector<int> out;
    for (int k = 0; k < num_classes; ++k) out.push_back(k);
    return out;
  }
  void validate() const;
};

// Probability vector of length K: marginal over readout qubits restricted
// to the first K basis labels, renormalized to sum 1. A restriction with
// zero mass returns uniform 1/K (a maximally uninformative prediction).
std::vector<double> readout_distribution(const StateVector& state, const ReadoutMap& map);

// -ln(probs[label]) with the probability floored at 1e-12. label out of
// range throws std::out_of_range.
double cross_entropy(const std::vector<double>& probs, int label);

// ---- Feature encoding ---------------------------------------------------

struct FeatureRange {
  double min = 0.0;
  double max = 1.0;
};

struct EncodedSample {
  std::vector<double> features;  // raw values
  std::vector<double> angles;    // scaled to [0, pi]
  int label = 0;
};

// Per-feature min/max over the given rows (training split only; the test
// split must reuse these ranges).
std::vector<FeatureRange> feature_ranges(const std::vector<std::vector<double>>& rows);

// Min-max scale each feature to [0, pi], clamping out-of-range values. A
// degenerate range (min == max) maps to angle 0.
std::vector<double> encode_angles(const std::vector<double>& features,
                                  const std::vector<FeatureRange>& ranges);

// Angle embedding: starting from |0...0>, feature j rotates qubit j mod Q;
// the rotation axis alternates per wrap-around layer (RY for features
// 0..Q-1, RZ for Q..2Q-1, RY again, ...). Returns the prepared state.
StateVector encode_features(const std::vector<double>& features, int num_input_qubits,
                            const std::vector<FeatureRange>& ranges);

}  // namespace qcevo
