#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qcevo/gates.hpp"
#include "qcevo/rng.hpp"
#include "qcevo/trainer.hpp"

using namespace qcevo;

namespace {

GateSpec make_gate(std::uint64_t innovation, GateKind kind, double depth,
                   std::initializer_list<int> qubits,
                   std::initializer_list<double> params = {}, bool enabled = true) {
  GateSpec g;
  g.innovation = innovation;
  g.kind = kind;
  g.depth = depth;
  int i = 0;
  for (int q : qubits) g.qubits[static_cast<std::size_t>(i++)] = q;
  i = 0;
  for (double p : params) g.params[static_cast<std::size_t>(i++)] = p;
  g.enabled = enabled;
  return g;
}

std::vector<int> all_qubits(int n) {
  std::vector<int> q(static_cast<std::size_t>(n));
  std::iota(q.begin(), q.end(), 0);
  return q;
}

// Teacher whose targets equal the probes (identity behavior).
TaskSpec identity_teacher(int num_qubits, std::vector<StateVector> probes,
                          LossKind loss = LossKind::Fidelity) {
  TeacherTask t;
  t.family = "baseline_single_gate";
  t.teacher = make_base_genome(num_qubits, all_qubits(num_qubits), all_qubits(num_qubits));
  t.targets = probes;
  t.probes = std::move(probes);
  t.loss = loss;
  for (int q = 0; q < num_qubits; ++q) t.observables.push_back({'Z', q});
  t.validate();
  return t;
}

TaskSpec teacher_from_circuit(const CircuitGenome& teacher,
                              std::vector<StateVector> probes, LossKind loss) {
  TeacherTask t;
  t.family = "multi_layer";
  t.teacher = teacher;
  for (const StateVector& probe : probes)
    t.targets.push_back(run_circuit(teacher, probe));
  t.probes = std::move(probes);
  t.loss = loss;
  for (int q = 0; q < teacher.num_qubits; ++q) t.observables.push_back({'Z', q});
  t.validate();
  return t;
}

// Small synthetic classification task with cached encoded states.
TaskSpec synthetic_dataset(RngStream& rng, int num_qubits, int num_classes,
                           int num_features, int rows) {
  DatasetTask d;
  d.name = "synthetic";
  for (int r = 0; r < rows; ++r) {
    std::vector<double> row;
    for (int f = 0; f < num_features; ++f) row.push_back(rng.uniform());
    d.features.push_back(std::move(row));
    d.labels.push_back(rng.index(static_cast<std::size_t>(num_classes)));
  }
  // Make sure every class appears so cross-entropy touches each label.
  for (int k = 0; k < num_classes; ++k) d.labels[static_cast<std::size_t>(k)] = k;
  d.num_input_qubits = num_qubits;
  d.num_classes = num_classes;
  int readout_bits = 1;
  while ((1 << readout_bits) < num_classes) ++readout_bits;
  for (int b = 0; b < readout_bits; ++b)
    d.readout.readout_qubits.push_back(num_qubits - readout_bits + b);
  d.readout.num_classes = num_classes;
  for (int r = 0; r < rows; ++r)
    (r < rows - 2 ? d.train_indices : d.test_indices).push_back(r);
  std::vector<std::vector<double>> train_rows;
  for (int idx : d.train_indices)
    train_rows.push_back(d.features[static_cast<std::size_t>(idx)]);
  d.ranges = feature_ranges(train_rows);
  for (int idx : d.train_indices)
    d.train_states.push_back(encode_features(d.features[static_cast<std::size_t>(idx)],
                                             num_qubits, d.ranges));
  for (int idx : d.test_indices)
    d.test_states.push_back(encode_features(d.features[static_cast<std::size_t>(idx)],
                                            num_qubits, d.ranges));
  d.validate();
  return d;
}

StateVector random_product_state(RngStream& rng, int num_qubits) {
  StateVector state = make_state(num_qubits);
  for (int q = 0; q < num_qubits; ++q) {
    double theta = std::acos(rng.uniform(-1.0, 1.0));
    double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    apply_gate(state, GateKind::RY, {q}, {theta});
    apply_gate(state, GateKind::Phase, {q}, {phi});
  }
  return state;
}

// Random circuit over n qubits with at most `max_param_gates` parameterized
// gates (counting multi-parameter gates once).
CircuitGenome random_small_genome(RngStream& rng, int num_qubits,
                                  int max_param_gates) {
  CircuitGenome g = make_base_genome(num_qubits, all_qubits(num_qubits),
                                     all_qubits(num_qubits));
  int total = 1 + rng.index(6);
  int param_gates = 0;
  std::uint64_t innovation = 0;
  for (int i = 0; i < total; ++i) {
    GateKind kind = static_cast<GateKind>(rng.index(kNumGateKinds));
    const GateInfo& info = gate_info(kind);
    if (info.arity > num_qubits) continue;
    if (info.num_params > 0 && param_gates >= max_param_gates) continue;
    GateSpec spec;
    spec.innovation = innovation++;
    spec.kind = kind;
    spec.depth = rng.uniform();
    std::vector<int> pool = all_qubits(num_qubits);
    rng.shuffle(pool);
    for (int s = 0; s < info.arity; ++s)
      spec.qubits[static_cast<std::size_t>(s)] = pool[static_cast<std::size_t>(s)];
    for (int p = 0; p < info.num_params; ++p)
      spec.params[static_cast<std::size_t>(p)] =
          rng.uniform(-3.14159265358979323846, 3.14159265358979323846);
    spec.enabled = rng.uniform() < 0.9;
    if (spec.enabled && info.num_params > 0) ++param_gates;
    g = insert_gate(g, spec);
  }
  return g;
}

TaskSpec random_task(RngStream& rng, int num_qubits, int trial) {
  switch (trial % 5) {
    case 0:
    case 1: {
      LossKind loss = (trial % 5 == 0) ? LossKind::Fidelity : LossKind::Angular;
      std::vector<StateVector> probes;
      probes.push_back(make_state(num_qubits, 0));
      for (int j = 0; j < 6; ++j)
        probes.push_back(random_product_state(rng, num_qubits));
      return teacher_from_circuit(random_small_genome(rng, num_qubits, 2),
                                  std::move(probes), loss);
    }
    case 2: {
      std::vector<StateVector> probes;
      for (int j = 0; j < 6; ++j)
        probes.push_back(random_product_state(rng, num_qubits));
      return teacher_from_circuit(random_small_genome(rng, num_qubits, 2),
                                  std::move(probes), LossKind::KlDivergence);
    }
    case 3: {
      std::vector<StateVector> probes;
      for (int j = 0; j < 6; ++j)
        probes.push_back(random_product_state(rng, num_qubits));
      return teacher_from_circuit(random_small_genome(rng, num_qubits, 2),
                                  std::move(probes), LossKind::ObservableMse);
    }
    default:
      return synthetic_dataset(rng, num_qubits, 2, 2, 8);
  }
}

}  // namespace

TEST_CASE("flatten collects enabled parameterized gates in circuit order") {
  CircuitGenome g = make_base_genome(2, {0}, {1});
  g = insert_gate(g, make_gate(0, GateKind::RY, 0.1, {0}, {0.5}));
  g = insert_gate(g, make_gate(1, GateKind::U, 0.2, {1}, {0.1, 0.2, 0.3}));
  g = insert_gate(g, make_gate(2, GateKind::CX, 0.3, {0, 1}));
  g = insert_gate(g, make_gate(3, GateKind::RZ, 0.4, {1}, {0.7}, false));

  ParamVector pv = flatten_params(g);
  REQUIRE(pv.size() == 4);  // RY + U(3); disabled RZ and CX excluded
  CHECK(pv.refs[0].innovation == 0);
  CHECK(pv.refs[0].param_name == "phi");
  CHECK(pv.refs[1].innovation == 1);
  CHECK(pv.refs[1].param_name == "theta");
  CHECK(pv.refs[2].param_name == "phi");
  CHECK(pv.refs[3].param_name == "delta");
  CHECK(pv.values == std::vector<double>{0.5, 0.1, 0.2, 0.3});
}

TEST_CASE("flatten then unflatten is the identity; modified values write back") {
  RngStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    CircuitGenome g = random_small_genome(rng, 3, 4);
    ParamVector pv = flatten_params(g);
    CircuitGenome copy = g;
    unflatten_params(copy, pv);
    CHECK(serialize(copy) == serialize(g));

    for (double& v : pv.values) v += 1.0;
    unflatten_params(copy, pv);
    ParamVector round = flatten_params(copy);
    REQUIRE(round.size() == pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
      CHECK(round.refs[i].innovation == pv.refs[i].innovation);
      CHECK(round.values[i] == pv.values[i]);
    }
  }
}

TEST_CASE("unflatten rejects a reference to a missing gate") {
  CircuitGenome g = make_base_genome(1, {0}, {0});
  ParamVector pv;
  pv.refs.push_back({42, 0, "phi"});
  pv.values.push_back(1.0);
  CHECK_THROWS_AS(unflatten_params(g, pv), std::invalid_argument);
}

TEST_CASE("task_loss: empty genome against identity teacher is zero") {
  TaskSpec task = identity_teacher(2, {make_state(2, 0), make_state(2, 3)});
  CircuitGenome g = make_base_genome(2, {0, 1}, {0, 1});
  CHECK(task_loss(g, task) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("task_loss: exact Bell construction against Bell teacher is zero") {
  CircuitGenome teacher = make_base_genome(2, {0, 1}, {0, 1});
  teacher = insert_gate(teacher, make_gate(0, GateKind::H, 0.1, {0}));
  teacher = insert_gate(teacher, make_gate(1, GateKind::CX, 0.2, {0, 1}));
  TaskSpec task = teacher_from_circuit(teacher, {make_state(2, 0), make_state(2, 1)},
                                       LossKind::Fidelity);

  CircuitGenome cand = make_base_genome(2, {0, 1}, {0, 1});
  cand = insert_gate(cand, make_gate(7, GateKind::H, 0.3, {0}));
  cand = insert_gate(cand, make_gate(9, GateKind::CX, 0.6, {0, 1}));
  CHECK(task_loss(cand, task) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("task_loss: uniform readout on a 3-class dataset costs ln 3 per sample") {
  // All rows identical, so every feature range is degenerate and the encoded
  // input is |00>; H on both readout qubits then makes the readout marginal
  // uniform over 4 basis states, restricted+renormalized to 1/3 per class.
  DatasetTask d;
  d.name = "flat";
  for (int r = 0; r < 6; ++r) {
    d.features.push_back({1.0});
    d.labels.push_back(r % 3);
  }
  d.num_input_qubits = 2;
  d.num_classes = 3;
  d.readout.readout_qubits = {0, 1};
  d.readout.num_classes = 3;
  d.train_indices = {0, 1, 2};
  d.test_indices = {3, 4, 5};
  d.ranges = feature_ranges({{1.0}, {1.0}, {1.0}});
  for (int r = 0; r < 3; ++r) {
    d.train_states.push_back(encode_features({1.0}, 2, d.ranges));
    d.test_states.push_back(encode_features({1.0}, 2, d.ranges));
  }
  d.validate();
  TaskSpec task = d;

  CircuitGenome g = make_base_genome(2, {0, 1}, {0, 1});
  g = insert_gate(g, make_gate(0, GateKind::H, 0.1, {0}));
  g = insert_gate(g, make_gate(1, GateKind::H, 0.2, {1}));
  CHECK(task_loss(g, task) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  // Uniform prediction always argmaxes to class 0 (lowest-index tie break),
  // and the test labels are one of each class.
  FitnessReport report = evaluate(g, task);
  REQUIRE(report.accuracy.has_value());
  CHECK(*report.accuracy == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("task_loss rejects a genome whose register does not fit the task") {
  TaskSpec task = identity_teacher(2, {make_state(2, 0)});
  CircuitGenome g = make_base_genome(3, {0, 1}, {2});
  CHECK_THROWS_AS(task_loss(g, task), std::invalid_argument);
}

TEST_CASE("gradient worked example: RY against |0> target") {
  TaskSpec task = identity_teacher(1, {make_state(1, 0)});
  // Loss is sin^2(theta/2): derivative 0 at theta = 0, 0.5 at theta = pi/2.
  for (GradientMode mode :
       {GradientMode::FiniteDifference, GradientMode::ParameterShift}) {
    TrainConfig cfg;
    cfg.gradient_mode = mode;
    CircuitGenome g = make_base_genome(1, {0}, {0});
    g = insert_gate(g, make_gate(0, GateKind::RY, 0.5, {0}, {0.0}));
    std::vector<double> grad = gradient(g, task, cfg);
    REQUIRE(grad.size() == 1);
    CHECK(grad[0] == doctest::Approx(0.0).epsilon(1e-7));

    g.gates[0].params[0] = 3.14159265358979323846 / 2.0;
    grad = gradient(g, task, cfg);
    CHECK(grad[0] == doctest::Approx(0.5).epsilon(1e-7));
  }
}

TEST_CASE("gradient of a parameterless genome is empty") {
  TaskSpec task = identity_teacher(2, {make_state(2, 0)});
  CircuitGenome g = make_base_genome(2, {0, 1}, {0, 1});
  g = insert_gate(g, make_gate(0, GateKind::CX, 0.5, {0, 1}));
  CHECK(gradient(g, task, TrainConfig{}).empty());
}

TEST_CASE("parameter-shift matches tight finite differences on random tasks") {
  RngStream rng(20240817);
  int checked_params = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int num_qubits = 2 + static_cast<int>(rng.index(2));  // 2 or 3
    TaskSpec task = random_task(rng, num_qubits, trial);
    CircuitGenome g = random_small_genome(rng, num_qubits, 4);

    TrainConfig fd;
    fd.gradient_mode = GradientMode::FiniteDifference;
    fd.fd_step = 1e-5;
    TrainConfig shift;
    shift.gradient_mode = GradientMode::ParameterShift;
    // Controlled rotations fall back to central differences at fd_step;
    // align the steps so the check targets the analytic shift formulas.
    shift.fd_step = fd.fd_step;

    std::vector<double> g_fd = gradient(g, task, fd);
    std::vector<double> g_shift = gradient(g, task, shift);
    REQUIRE(g_fd.size() == g_shift.size());
    for (std::size_t i = 0; i < g_fd.size(); ++i) {
      CHECK(std::abs(g_fd[i] - g_shift[i]) < 1e-4);
      ++checked_params;
    }
  }
  CHECK(checked_params > 500);  // the sweep actually exercised parameters
}

TEST_CASE("Adam matches a scalar reference implementation step-for-step") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.weight_decay = 0.0;
  AdamOptimizer opt(1, cfg);

  std::vector<double> theta = {10.0};
  double ref_theta = 10.0, ref_m = 0.0, ref_v = 0.0;
  for (int t = 1; t <= 100; ++t) {
    // Quadratic landscape L = (theta - 3)^2, gradient 2(theta - 3).
    std::vector<double> grad = {2.0 * (theta[0] - 3.0)};
    opt.step(theta, grad);

    double ref_g = 2.0 * (ref_theta - 3.0);
    ref_m = cfg.adam_beta1 * ref_m + (1.0 - cfg.adam_beta1) * ref_g;
    ref_v = cfg.adam_beta2 * ref_v + (1.0 - cfg.adam_beta2) * ref_g * ref_g;
    double m_hat = ref_m / (1.0 - std::pow(cfg.adam_beta1, t));
    double v_hat = ref_v / (1.0 - std::pow(cfg.adam_beta2, t));
    ref_theta -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);

    CHECK(std::abs(theta[0] - ref_theta) < 1e-12);
  }
  CHECK(std::abs(theta[0] - 3.0) < 0.5);  // it actually descended
}

TEST_CASE("decoupled weight decay multiplies parameters by 1 - lr*wd") {
  TrainConfig plain;
  plain.learning_rate = 0.01;
  plain.weight_decay = 0.0;
  TrainConfig decayed = plain;
  decayed.weight_decay = 0.1;

  std::vector<double> a = {2.0}, b = {2.0};
  std::vector<double> grad = {0.7};
  AdamOptimizer(1, plain).step(a, grad);
  AdamOptimizer(1, decayed).step(b, grad);
  CHECK(b[0] == doctest::Approx(a[0] * (1.0 - 0.01 * 0.1)).epsilon(1e-15));
}

TEST_CASE("train drives RY from 3.0 into the |0> basin") {
  TaskSpec task = identity_teacher(1, {make_state(1, 0)});
  CircuitGenome g = make_base_genome(1, {0}, {0});
  g = insert_gate(g, make_gate(0, GateKind::RY, 0.5, {0}, {3.0}));

  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.05;
  TrainResult result = train(g, task, cfg);
  REQUIRE(!result.failed);
  REQUIRE(result.loss_history.size() == 201);
  CHECK(result.final_loss < 0.01);
  CHECK(std::abs(result.genome.gates[0].params[0]) < 0.2);
}

TEST_CASE("train returns a parameterless genome unchanged with constant history") {
  TaskSpec task = identity_teacher(2, {make_state(2, 0), make_state(2, 2)});
  CircuitGenome g = make_base_genome(2, {0, 1}, {0, 1});
  g = insert_gate(g, make_gate(0, GateKind::X, 0.5, {0}));

  TrainConfig cfg;
  cfg.epochs = 7;
  TrainResult result = train(g, task, cfg);
  REQUIRE(!result.failed);
  CHECK(serialize(result.genome) == serialize(g));
  REQUIRE(result.loss_history.size() == 8);
  for (double l : result.loss_history) CHECK(l == result.loss_history[0]);
}

TEST_CASE("train never returns a genome worse than its input") {
  RngStream rng(303);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 0.1;
  for (int trial = 0; trial < 20; ++trial) {
    int num_qubits = 2 + static_cast<int>(rng.index(2));
    TaskSpec task = random_task(rng, num_qubits, trial);
    CircuitGenome g = random_small_genome(rng, num_qubits, 4);
    double before = task_loss(g, task);
    TrainResult result = train(g, task, cfg);
    REQUIRE(!result.failed);
    CHECK(result.final_loss <= before + 1e-12);
    // The returned genome really carries the best-iterate parameters.
    CHECK(task_loss(result.genome, task) ==
          doctest::Approx(result.final_loss).epsilon(1e-12));
    double best_seen = result.loss_history[0];
    for (double l : result.loss_history) best_seen = std::min(best_seen, l);
    CHECK(result.final_loss == doctest::Approx(best_seen).epsilon(1e-12));
  }
}

TEST_CASE("training is deterministic for identical inputs") {
  RngStream rng(99);
  TaskSpec task = random_task(rng, 2, 0);
  CircuitGenome g = random_small_genome(rng, 2, 3);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 0.05;
  TrainResult a = train(g, task, cfg);
  TrainResult b = train(g, task, cfg);
  REQUIRE(a.loss_history.size() == b.loss_history.size());
  for (std::size_t i = 0; i < a.loss_history.size(); ++i)
    CHECK(a.loss_history[i] == b.loss_history[i]);
  CHECK(serialize(a.genome) == serialize(b.genome));
}

TEST_CASE("evaluate reports perfect fidelity for an exact teacher imitation") {
  CircuitGenome teacher = make_base_genome(2, {0, 1}, {0, 1});
  teacher = insert_gate(teacher, make_gate(0, GateKind::H, 0.1, {0}));
  teacher = insert_gate(teacher, make_gate(1, GateKind::CX, 0.2, {0, 1}));
  RngStream rng(5);
  std::vector<StateVector> probes = {make_state(2, 0), make_state(2, 1),
                                     random_product_state(rng, 2)};
  TaskSpec task = teacher_from_circuit(teacher, probes, LossKind::Fidelity);

  FitnessReport report = evaluate(teacher, task);
  REQUIRE(report.fidelity.has_value());
  REQUIRE(report.angular.has_value());
  CHECK(*report.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  // arccos near overlap 1 turns ~1e-16 rounding into ~1e-8 of angle.
  CHECK(*report.angular == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(report.loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(!report.accuracy.has_value());
}

TEST_CASE("fitness report serialization round-trips optionals") {
  FitnessReport r;
  r.loss = 0.25;
  r.accuracy = 0.8;
  nlohmann::ordered_json j = fitness_report_to_json(r);
  FitnessReport back = fitness_report_from_json(j);
  CHECK(back.loss == r.loss);
  REQUIRE(back.accuracy.has_value());
  CHECK(*back.accuracy == 0.8);
  CHECK(!back.fidelity.has_value());
  CHECK(!back.angular.has_value());
}
