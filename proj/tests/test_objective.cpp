#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qcevo/objective.hpp"
#include "qcevo/rng.hpp"

using namespace qcevo;

namespace {

StateVector random_state(int nq, RngStream& rng) {
  StateVector s = make_state(nq);
  double total = 0.0;
  for (auto& a : s.amps) {
    a = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    total += std::norm(a);
  }
  for (auto& a : s.amps) a /= std::sqrt(total);
  return s;
}

std::vector<double> random_distribution(std::size_t n, RngStream& rng) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = rng.uniform() + 1e-6;
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("fidelity identities") {
  StateVector zero = make_state(1), one = make_state(1, 1);
  StateVector plus = make_state(1);
  apply_gate(plus, GateKind::H, {0}, {});

  CHECK(fidelity(zero, zero) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(zero, one) == doctest::Approx(0.0));
  CHECK(fidelity(plus, zero) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fidelity_loss(zero, zero) == doctest::Approx(0.0));
  CHECK(fidelity_loss(zero, one) == doctest::Approx(1.0));

  StateVector wide = make_state(2);
  CHECK_THROWS_AS(fidelity(zero, wide), std::invalid_argument);
}

TEST_CASE("fidelity is invariant under global phase") {
  RngStream rng(9);
  for (int t = 0; t < 100; ++t) {
    StateVector a = random_state(3, rng), b = random_state(3, rng);
    const double f = fidelity(a, b);
    const cplx phase = std::polar(1.0, rng.uniform(-M_PI, M_PI));
    StateVector a2 = a;
    for (auto& amp : a2.amps) amp *= phase;
    CHECK(std::abs(fidelity(a2, b) - f) < 1e-10);
    StateVector b2 = b;
    for (auto& amp : b2.amps) amp *= phase;
    CHECK(std::abs(fidelity(a, b2) - f) < 1e-10);
  }
}

TEST_CASE("angular distance identities") {
  StateVector zero = make_state(1), one = make_state(1, 1);
  StateVector plus = make_state(1);
  apply_gate(plus, GateKind::H, {0}, {});

  CHECK(angular_distance(zero, zero) == doctest::Approx(0.0));
  CHECK(angular_distance(zero, one) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(angular_distance(plus, zero) == doctest::Approx(M_PI / 4).epsilon(1e-12));

  // Global phase does not register as distance.
  StateVector minus_zero = zero;
  for (auto& a : minus_zero.amps) a *= -1.0;
  CHECK(angular_distance(minus_zero, zero) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fidelity and angular distance rank state pairs identically") {
  RngStream rng(41);
  for (int t = 0; t < 200; ++t) {
    StateVector ref = random_state(3, rng);
    StateVector a = random_state(3, rng), b = random_state(3, rng);
    const bool fid_says = fidelity(a, ref) > fidelity(b, ref);
    const bool ang_says = angular_distance(a, ref) < angular_distance(b, ref);
    CHECK(fid_says == ang_says);
  }
}

TEST_CASE("kl divergence") {
  CHECK(kl_divergence({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
  // q = (1,0), p = (0.5,0.5) -> ln 2.
  CHECK(kl_divergence({0.5, 0.5}, {1.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // Zero prediction mass stays finite through the floor.
  const double v = kl_divergence({1.0, 0.0}, {0.5, 0.5});
  CHECK(std::isfinite(v));
  CHECK(v > 10.0);  // 0.5*ln(0.5/1e-12) dominates
  CHECK_THROWS_AS(kl_divergence({1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("kl divergence is nonnegative and zero on identical distributions") {
  RngStream rng(33);
  for (int t = 0; t < 200; ++t) {
    auto p = random_distribution(8, rng);
    auto q = random_distribution(8, rng);
    CHECK(kl_divergence(p, q) > -1e-10);
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("observable mse") {
  StateVector zero = make_state(1), one = make_state(1, 1);
  StateVector plus = make_state(1);
  apply_gate(plus, GateKind::H, {0}, {});

  CHECK(observable_mse(zero, zero, {{'Z', 0}}) == doctest::Approx(0.0));
  CHECK(observable_mse(zero, one, {{'Z', 0}}) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(observable_mse(plus, zero, {{'Z', 0}}) == doctest::Approx(1.0).epsilon(1e-12));
  // Mean over observables: Z differs by 4, X by 0 for |0> vs |1>.
  CHECK(observable_mse(zero, one, {{'Z', 0}, {'X', 0}}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(observable_mse(zero, one, {}), std::invalid_argument);
}

TEST_CASE("readout distribution basics") {
  ReadoutMap map2{{0}, 2};
  map2.validate();

  // Bell state: marginal on one qubit = (0.5, 0.5).
  StateVector bell = make_state(2);
  apply_gate(bell, GateKind::H, {0}, {});
  apply_gate(bell, GateKind::CX, {0, 1}, {});
  auto probs = readout_distribution(bell, map2);
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));

  // K = 3 on 2 readout qubits: uniform marginal drops basis 3 and
  // renormalizes to thirds.
  ReadoutMap map3{{0, 1}, 3};
  StateVector uniform = make_state(2);
  apply_gate(uniform, GateKind::H, {0}, {});
  apply_gate(uniform, GateKind::H, {1}, {});
  probs = readout_distribution(uniform, map3);
  REQUIRE(probs.size() == 3);
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // Zero class mass -> uniform fallback: state |11> has no weight on
  // labels {0,1,2}.
  StateVector eleven = make_state(2, 3);
  probs = readout_distribution(eleven, map3);
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  CHECK_THROWS_AS((ReadoutMap{{0}, 3}.validate()), std::invalid_argument);
}

TEST_CASE("readout distribution sums to one on random states") {
  RngStream rng(21);
  ReadoutMap map{{1, 2}, 3};
  for (int t = 0; t < 100; ++t) {
    auto probs = readout_distribution(random_state(4, rng), map);
    double total = 0.0;
    for (double p : probs) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cross entropy") {
  CHECK(cross_entropy({1.0, 0.0}, 0) == doctest::Approx(0.0));
  CHECK(cross_entropy({0.5, 0.5}, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const double floored = cross_entropy({1.0, 0.0}, 1);
  CHECK(std::isfinite(floored));
  CHECK(floored == doctest::Approx(-std::log(1e-12)).epsilon(1e-9));  // ~27.6
  CHECK_THROWS_AS(cross_entropy({0.5, 0.5}, 2), std::out_of_range);
  CHECK_THROWS_AS(cross_entropy({0.5, 0.5}, -1), std::out_of_range);
}

TEST_CASE("cross entropy equals target-weighted KL against a one-hot target") {
  RngStream rng(3);
  for (int t = 0; t < 100; ++t) {
    auto p = random_distribution(4, rng);
    const int label = rng.index(4);
    std::vector<double> one_hot(4, 0.0);
    one_hot[static_cast<std::size_t>(label)] = 1.0;
    // One-hot target has zero entropy, so KL(target || pred) = CE.
    CHECK(cross_entropy(p, label) ==
          doctest::Approx(kl_divergence(p, one_hot)).epsilon(1e-12));
  }
}

TEST_CASE("feature ranges and angle scaling") {
  std::vector<std::vector<double>> rows = {{1.0, -2.0}, {3.0, 0.0}, {2.0, -1.0}};
  auto ranges = feature_ranges(rows);
  REQUIRE(ranges.size() == 2);
  CHECK(ranges[0].min == 1.0);
  CHECK(ranges[0].max == 3.0);
  CHECK(ranges[1].min == -2.0);
  CHECK(ranges[1].max == 0.0);

  auto angles = encode_angles({1.0, -1.0}, ranges);
  CHECK(angles[0] == doctest::Approx(0.0));            // at minimum
  CHECK(angles[1] == doctest::Approx(M_PI / 2));       // midpoint
  angles = encode_angles({5.0, -7.0}, ranges);
  CHECK(angles[0] == doctest::Approx(M_PI));           // clamped high
  CHECK(angles[1] == doctest::Approx(0.0));            // clamped low

  // Degenerate range -> angle 0.
  auto flat = encode_angles({42.0}, {{42.0, 42.0}});
  CHECK(flat[0] == doctest::Approx(0.0));

  CHECK_THROWS_AS(encode_angles({}, {}), std::invalid_argument);
}

TEST_CASE("encode_features midpoint on one qubit gives |+> up to phase") {
  StateVector s = encode_features({0.5}, 1, {{0.0, 1.0}});
  // RY(pi/2)|0> = (|0> + |1>)/sqrt(2).
  CHECK(std::abs(s.amps[0] - cplx(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(s.amps[1] - cplx(1 / std::sqrt(2.0), 0)) < 1e-12);
}

TEST_CASE("encode_features cycles qubits and alternates axes") {
  // 5 features on 2 qubits: features 0,1 -> RY on q0,q1; features 2,3 ->
  // RZ on q0,q1; feature 4 -> RY on q0 again.
  std::vector<FeatureRange> ranges(5, FeatureRange{0.0, 1.0});
  std::vector<double> f = {0.3, 0.7, 0.2, 0.9, 0.4};
  StateVector got = encode_features(f, 2, ranges);

  StateVector expect = make_state(2);
  apply_gate(expect, GateKind::RY, {0}, {0.3 * M_PI});
  apply_gate(expect, GateKind::RY, {1}, {0.7 * M_PI});
  apply_gate(expect, GateKind::RZ, {0}, {0.2 * M_PI});
  apply_gate(expect, GateKind::RZ, {1}, {0.9 * M_PI});
  apply_gate(expect, GateKind::RY, {0}, {0.4 * M_PI});
  for (std::size_t i = 0; i < got.dim(); ++i)
    CHECK(std::abs(got.amps[i] - expect.amps[i]) < 1e-12);

  // Encoded states are normalized.
  CHECK(std::abs(norm(got) - 1.0) < 1e-12);
}

TEST_CASE("encode_features at range minimum leaves |0...0>") {
  std::vector<FeatureRange> ranges(3, FeatureRange{-1.0, 1.0});
  StateVector s = encode_features({-1.0, -1.0, -1.0}, 3, ranges);
  CHECK(std::abs(s.amps[0] - cplx(1, 0)) < 1e-12);
}

TEST_CASE("loss kind names round-trip") {
  for (LossKind k : {LossKind::Fidelity, LossKind::Angular, LossKind::KlDivergence,
                     LossKind::ObservableMse, LossKind::CrossEntropy})
    CHECK(loss_from_name(loss_name(k)) == k);
  CHECK(!loss_from_name("nope").has_value());
}
