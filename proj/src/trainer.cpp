#include "qcevo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "qcevo/gates.hpp"
#include "qcevo/qsim.hpp"

namespace qcevo {

const char* gradient_mode_name(GradientMode mode) {
  switch (mode) {
    case GradientMode::FiniteDifference: return "finite_difference";
    case GradientMode::ParameterShift: return "parameter_shift";
  }
  throw std::logic_error("unknown gradient mode");
}

std::optional<GradientMode> gradient_mode_from_name(const std::string& name) {
  if (name == "finite_difference") return GradientMode::FiniteDifference;
  if (name == "parameter_shift") return GradientMode::ParameterShift;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
  if (weight_decay < 0) throw std::invalid_argument("weight_decay must be >= 0");
  if (fd_step <= 0) throw std::invalid_argument("fd_step must be positive");
  if (adam_beta1 <= 0 || adam_beta1 >= 1 || adam_beta2 <= 0 || adam_beta2 >= 1)
    throw std::invalid_argument("adam betas must lie in (0, 1)");
  if (adam_eps <= 0) throw std::invalid_argument("adam_eps must be positive");
}

ParamVector flatten_params(const CircuitGenome& genome) {
  ParamVector out;
  for (const GateSpec& gate : genome.gates) {
    if (!gate.enabled) continue;
    const GateInfo& info = gate_info(gate.kind);
    for (int p = 0; p < info.num_params; ++p) {
      out.refs.push_back(
          {gate.innovation, p,
           std::string(info.param_names[static_cast<std::size_t>(p)])});
      out.values.push_back(gate.params[p]);
    }
  }
  return out;
}

void unflatten_params(CircuitGenome& genome, const ParamVector& params) {
  if (params.refs.size() != params.values.size())
    throw std::invalid_argument("param vector refs/values length mismatch");
  for (std::size_t i = 0; i < params.refs.size(); ++i) {
    const ParamRef& ref = params.refs[i];
    bool found = false;
    for (GateSpec& gate : genome.gates) {
      if (gate.innovation != ref.innovation) continue;
      if (ref.param_index < 0 || ref.param_index >= gate.num_params())
        throw std::invalid_argument("param index out of range for gate");
      gate.params[static_cast<std::size_t>(ref.param_index)] = params.values[i];
      found = true;
      break;
    }
    if (!found)
      throw std::invalid_argument("unflatten: innovation " +
                                  std::to_string(ref.innovation) +
                                  " not present in genome");
  }
}

namespace {

constexpr double kProbFloor = 1e-12;

// ---- Primitive sweeps ----------------------------------------------------
//
// Every supported loss is a closed-form function of scalars that are
// quadratic in the output statevector: restricted readout marginals
// (cross-entropy), probe fidelities (fidelity/angular), basis probabilities
// (KL), or observable expectations (MSE). Evaluating those scalars per
// sample gives one code path shared by the plain loss, the chain-rule
// parameter-shift gradient, and finite differences.
using SamplePrims = std::vector<std::vector<double>>;

void check_task_compat(const CircuitGenome& genome, const TaskSpec& task) {
  int want = task_num_qubits(task);
  if (genome.num_qubits != want)
    throw std::invalid_argument("genome has " + std::to_string(genome.num_qubits) +
                                " qubits but task " + task_id(task) + " expects " +
                                std::to_string(want));
}

SamplePrims eval_primitives(const CircuitGenome& genome, const TaskSpec& task) {
  CompiledCircuit compiled = compile_circuit(genome);
  SamplePrims out;
  if (const auto* d = std::get_if<DatasetTask>(&task)) {
    out.reserve(d->train_states.size());
    for (const StateVector& input : d->train_states) {
      StateVector pred = run_compiled(compiled, input);
      std::vector<double> marg =
          marginal_probabilities(pred, d->readout.readout_qubits);
      marg.resize(static_cast<std::size_t>(d->num_classes));
      out.push_back(std::move(marg));
    }
    return out;
  }
  const auto& t = std::get<TeacherTask>(task);
  out.reserve(t.probes.size());
  for (std::size_t j = 0; j < t.probes.size(); ++j) {
    StateVector pred = run_compiled(compiled, t.probes[j]);
    switch (t.loss) {
      case LossKind::Fidelity:
      case LossKind::Angular:
        out.push_back({fidelity(pred, t.targets[j])});
        break;
      case LossKind::KlDivergence:
        out.push_back(basis_probabilities(pred));
        break;
      case LossKind::ObservableMse: {
        std::vector<double> e;
        e.reserve(t.observables.size());
        for (const ObservableSpec& obs : t.observables)
          e.push_back(expectation(pred, obs));
        out.push_back(std::move(e));
        break;
      }
      case LossKind::CrossEntropy:
        throw std::invalid_argument("cross_entropy loss requires a dataset task");
    }
  }
  return out;
}

// Loss-relevant constants derived from the teacher targets (empty when the
// loss measures against target states directly).
SamplePrims target_primitives(const TaskSpec& task) {
  SamplePrims out;
  const auto* t = std::get_if<TeacherTask>(&task);
  if (t == nullptr) return out;
  if (t->loss == LossKind::KlDivergence) {
    for (const StateVector& target : t->targets)
      out.push_back(basis_probabilities(target));
  } else if (t->loss == LossKind::ObservableMse) {
    for (const StateVector& target : t->targets) {
      std::vector<double> e;
      for (const ObservableSpec& obs : t->observables)
        e.push_back(expectation(target, obs));
      out.push_back(std::move(e));
    }
  }
  return out;
}

double loss_from_primitives(const TaskSpec& task, const SamplePrims& prims,
                            const SamplePrims& target_prims) {
  double total = 0.0;
  if (const auto* d = std::get_if<DatasetTask>(&task)) {
    for (std::size_t s = 0; s < prims.size(); ++s) {
      const std::vector<double>& m = prims[s];
      double mass = 0.0;
      for (double v : m) mass += v;
      std::vector<double> probs(m.size());
      if (mass <= 0.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(m.size()));
      } else {
        for (std::size_t k = 0; k < m.size(); ++k) probs[k] = m[k] / mass;
      }
      int label = d->labels[static_cast<std::size_t>(d->train_indices[s])];
      total += cross_entropy(probs, label);
    }
    return total / static_cast<double>(prims.size());
  }
  const auto& t = std::get<TeacherTask>(task);
  for (std::size_t j = 0; j < prims.size(); ++j) {
    switch (t.loss) {
      case LossKind::Fidelity:
        total += 1.0 - prims[j][0];
        break;
      case LossKind::Angular:
        total += std::acos(std::clamp(std::sqrt(std::max(prims[j][0], 0.0)), 0.0, 1.0));
        break;
      case LossKind::KlDivergence:
        total += kl_divergence(prims[j], target_prims[j]);
        break;
      case LossKind::ObservableMse: {
        double acc = 0.0;
        for (std::size_t k = 0; k < prims[j].size(); ++k) {
          double diff = prims[j][k] - target_prims[j][k];
          acc += diff * diff;
        }
        total += acc / static_cast<double>(prims[j].size());
        break;
      }
      case LossKind::CrossEntropy:
        throw std::invalid_argument("cross_entropy loss requires a dataset task");
    }
  }
  return total / static_cast<double>(prims.size());
}

// dL/dtheta from base primitives and their exact shifted-angle derivatives
// d(prim) = (prim(theta + pi/2) - prim(theta - pi/2)) / 2.
double chain_rule(const TaskSpec& task, const SamplePrims& base,
                  const SamplePrims& plus, const SamplePrims& minus,
                  const SamplePrims& target_prims) {
  double total = 0.0;
  if (const auto* d = std::get_if<DatasetTask>(&task)) {
    for (std::size_t s = 0; s < base.size(); ++s) {
      const std::vector<double>& m = base[s];
      double mass = 0.0, dmass = 0.0;
      std::vector<double> dm(m.size());
      for (std::size_t k = 0; k < m.size(); ++k) {
        mass += m[k];
        dm[k] = (plus[s][k] - minus[s][k]) / 2.0;
        dmass += dm[k];
      }
      if (mass <= 0.0) continue;  // uniform-fallback plateau
      std::size_t y = static_cast<std::size_t>(
          d->labels[static_cast<std::size_t>(d->train_indices[s])]);
      double p_label = m[y] / mass;
      if (p_label <= kProbFloor || m[y] <= 0.0) continue;  // floored region
      // CE = -ln(m_y) + ln(mass)
      total += dmass / mass - dm[y] / m[y];
    }
    return total / static_cast<double>(base.size());
  }
  const auto& t = std::get<TeacherTask>(task);
  for (std::size_t j = 0; j < base.size(); ++j) {
    switch (t.loss) {
      case LossKind::Fidelity:
        total += -(plus[j][0] - minus[j][0]) / 2.0;
        break;
      case LossKind::Angular: {
        double f = std::clamp(base[j][0], 0.0, 1.0);
        double df = (plus[j][0] - minus[j][0]) / 2.0;
        if (df == 0.0) break;  // critical point (f = 0 or 1 forces df = 0)
        double denom = 2.0 * std::sqrt(std::max(f * (1.0 - f), 0.0));
        total += -df / std::max(denom, 1e-9);
        break;
      }
      case LossKind::KlDivergence: {
        for (std::size_t i = 0; i < base[j].size(); ++i) {
          double q = target_prims[j][i];
          if (q <= 0.0) continue;
          double p = base[j][i];
          if (p <= kProbFloor) continue;  // floored region
          double dp = (plus[j][i] - minus[j][i]) / 2.0;
          total += -q * dp / p;
        }
        break;
      }
      case LossKind::ObservableMse: {
        double acc = 0.0;
        for (std::size_t k = 0; k < base[j].size(); ++k) {
          double de = (plus[j][k] - minus[j][k]) / 2.0;
          acc += 2.0 * (base[j][k] - target_prims[j][k]) * de;
        }
        total += acc / static_cast<double>(base[j].size());
        break;
      }
      case LossKind::CrossEntropy:
        throw std::invalid_argument("cross_entropy loss requires a dataset task");
    }
  }
  return total / static_cast<double>(base.size());
}

}  // namespace

double task_loss(const CircuitGenome& genome, const TaskSpec& task) {
  check_task_compat(genome, task);
  return loss_from_primitives(task, eval_primitives(genome, task),
                              target_primitives(task));
}

std::vector<double> gradient(const CircuitGenome& genome, const TaskSpec& task,
                             const TrainConfig& cfg) {
  check_task_compat(genome, task);
  ParamVector pv = flatten_params(genome);
  std::vector<double> grad(pv.size(), 0.0);
  if (pv.size() == 0) return grad;

  CircuitGenome work = genome;
  std::vector<std::size_t> gate_index(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    bool found = false;
    for (std::size_t g = 0; g < work.gates.size(); ++g) {
      if (work.gates[g].innovation == pv.refs[i].innovation) {
        gate_index[i] = g;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("flattened parameter lost its gate");
  }
  auto set_param = [&](std::size_t i, double value) {
    work.gates[gate_index[i]]
        .params[static_cast<std::size_t>(pv.refs[i].param_index)] = value;
  };

  auto central_difference = [&](std::size_t i, double step) {
    double theta = pv.values[i];
    set_param(i, theta + step);
    double lp = task_loss(work, task);
    set_param(i, theta - step);
    double lm = task_loss(work, task);
    set_param(i, theta);
    return (lp - lm) / (2.0 * step);
  };

  if (cfg.gradient_mode == GradientMode::FiniteDifference) {
    for (std::size_t i = 0; i < pv.size(); ++i)
      grad[i] = central_difference(i, cfg.fd_step);
    return grad;
  }

  SamplePrims target_prims = target_primitives(task);
  SamplePrims base = eval_primitives(work, task);
  constexpr double kHalfPi = 1.5707963267948966;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const GateSpec& gate = work.gates[gate_index[i]];
    if (!gate_info(gate.kind).shift_exact) {
      grad[i] = central_difference(i, cfg.fd_step);
      continue;
    }
    double theta = pv.values[i];
    set_param(i, theta + kHalfPi);
    SamplePrims plus = eval_primitives(work, task);
    set_param(i, theta - kHalfPi);
    SamplePrims minus = eval_primitives(work, task);
    set_param(i, theta);
    grad[i] = chain_rule(task, base, plus, minus, target_prims);
  }
  return grad;
}

void AdamOptimizer::step(std::vector<double>& theta,
                         const std::vector<double>& grad) {
  if (theta.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam state size mismatch");
  ++step_count_;
  double bc1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(step_count_));
  double bc2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(step_count_));
  double decay = 1.0 - cfg_.learning_rate * cfg_.weight_decay;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m_[i] = cfg_.adam_beta1 * m_[i] + (1.0 - cfg_.adam_beta1) * grad[i];
    v_[i] = cfg_.adam_beta2 * v_[i] + (1.0 - cfg_.adam_beta2) * grad[i] * grad[i];
    double m_hat = m_[i] / bc1;
    double v_hat = v_[i] / bc2;
    theta[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.adam_eps);
    theta[i] *= decay;  // decoupled weight decay
  }
}

TrainResult train(const CircuitGenome& genome, const TaskSpec& task,
                  const TrainConfig& cfg) {
  cfg.validate();
  check_task_compat(genome, task);

  TrainResult out;
  out.genome = genome;
  double initial = task_loss(genome, task);
  out.loss_history.push_back(initial);
  if (!std::isfinite(initial)) {
    out.failed = true;
    out.final_loss = initial;
    return out;
  }

  ParamVector pv = flatten_params(genome);
  if (pv.size() == 0) {
    out.loss_history.assign(static_cast<std::size_t>(cfg.epochs) + 1, initial);
    out.final_loss = initial;
    return out;
  }

  CircuitGenome work = genome;
  std::vector<double> theta = pv.values;
  std::vector<double> best_theta = theta;
  double best_loss = initial;
  AdamOptimizer opt(pv.size(), cfg);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> g = gradient(work, task, cfg);
    opt.step(theta, g);
    pv.values = theta;
    unflatten_params(work, pv);
    double loss = task_loss(work, task);
    out.loss_history.push_back(loss);
    if (!std::isfinite(loss)) {
      out.failed = true;
      break;
    }
    if (loss < best_loss) {
      best_loss = loss;
      best_theta = theta;
    }
  }

  pv.values = best_theta;
  unflatten_params(out.genome, pv);
  out.final_loss = best_loss;
  return out;
}

FitnessReport evaluate(const CircuitGenome& genome, const TaskSpec& task) {
  FitnessReport report;
  report.loss = task_loss(genome, task);
  if (const auto* d = std::get_if<DatasetTask>(&task)) {
    CompiledCircuit compiled = compile_circuit(genome);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < d->test_states.size(); ++s) {
      StateVector pred = run_compiled(compiled, d->test_states[s]);
      std::vector<double> probs = readout_distribution(pred, d->readout);
      std::size_t arg = 0;
      for (std::size_t k = 1; k < probs.size(); ++k)
        if (probs[k] > probs[arg]) arg = k;  // ties keep the lowest index
      if (static_cast<int>(arg) ==
          d->labels[static_cast<std::size_t>(d->test_indices[s])])
        ++correct;
    }
    report.accuracy =
        static_cast<double>(correct) / static_cast<double>(d->test_states.size());
    return report;
  }
  const auto& t = std::get<TeacherTask>(task);
  CompiledCircuit compiled = compile_circuit(genome);
  double mean_f = 0.0, mean_a = 0.0;
  for (std::size_t j = 0; j < t.probes.size(); ++j) {
    StateVector pred = run_compiled(compiled, t.probes[j]);
    mean_f += fidelity(pred, t.targets[j]);
    mean_a += angular_distance(pred, t.targets[j]);
  }
  report.fidelity = mean_f / static_cast<double>(t.probes.size());
  report.angular = mean_a / static_cast<double>(t.probes.size());
  return report;
}

}  // namespace qcevo
