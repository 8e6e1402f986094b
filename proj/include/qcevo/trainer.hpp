#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcevo/genome.hpp"
#include "qcevo/task.hpp"

namespace qcevo {

enum class GradientMode { FiniteDifference, ParameterShift };

const char* gradient_mode_name(GradientMode mode);
std::optional<GradientMode> gradient_mode_from_name(const std::string& name);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.001;
  double weight_decay = 0.0001;
  // finite_difference is the correctness-first default; parameter_shift
  // swaps in exact shifted-angle evaluations where the gate supports them.
  GradientMode gradient_mode = GradientMode::FiniteDifference;
  double fd_step = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

// ---- Trainable parameter view -------------------------------------------
//
// Flattened, ordered view of every enabled parameterized gate's parameters.
// Order follows the genome's (depth, innovation) gate order; each entry maps
// back to its gate by innovation number and parameter index, so flatten then
// unflatten is the identity.
struct ParamRef {
  std::uint64_t innovation = 0;
  int param_index = 0;
  std::string param_name;
};

struct ParamVector {
  std::vector<ParamRef> refs;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

ParamVector flatten_params(const CircuitGenome& genome);

// Writes values back into the matching gates. Throws std::invalid_argument
// if a referenced innovation is missing.
void unflatten_params(CircuitGenome& genome, const ParamVector& params);

// ---- Loss and gradients --------------------------------------------------

// Dataset tasks: mean cross-entropy over the training split.
// Teacher tasks: mean of the task's loss kind over probe inputs.
double task_loss(const CircuitGenome& genome, const TaskSpec& task);

// Partial derivatives of task_loss with respect to each flattened parameter.
// finite_difference mode: central differences with cfg.fd_step throughout.
// parameter_shift mode: for gates whose measured quantities are single-
// frequency in the angle, the derivative is recovered exactly by chaining
// the loss through primitive evaluations at theta +/- pi/2; other gates fall
// back to central differences.
std::vector<double> gradient(const CircuitGenome& genome, const TaskSpec& task,
                             const TrainConfig& cfg);

// ---- Adam ----------------------------------------------------------------
//
// Standard bias-corrected Adam followed by decoupled weight decay
// (theta *= 1 - lr*wd after each update).
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t num_params, const TrainConfig& cfg)
      : cfg_(cfg), m_(num_params, 0.0), v_(num_params, 0.0) {}

  void step(std::vector<double>& theta, const std::vector<double>& grad);

 private:
  TrainConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_count_ = 0;
};

// ---- Training loop -------------------------------------------------------
struct TrainResult {
  CircuitGenome genome;   // best-loss iterate encountered
  double final_loss = 0.0;
  std::vector<double> loss_history;  // length epochs + 1 unless aborted
  bool failed = false;    // non-finite loss encountered
};

// Full-batch Adam for cfg.epochs steps. Returns the parameters of the best
// loss seen (including the initial point), so the result is never worse than
// the input. A non-finite loss aborts training and marks the result failed.
TrainResult train(const CircuitGenome& genome, const TaskSpec& task,
                  const TrainConfig& cfg);

// Dataset tasks: loss = training loss, accuracy = argmax accuracy on the
// held-out test split (ties broken toward the lowest class index).
// Teacher tasks: loss = mean probe loss, plus mean fidelity and mean angular
// distance over probes.
FitnessReport evaluate(const CircuitGenome& genome, const TaskSpec& task);

}  // namespace qcevo
