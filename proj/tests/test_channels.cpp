// Copyright (c) contributors to the qwalk project.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qwalk/channels.hpp"
#include "qwalk/qops.hpp"
#include "qwalk/walk.hpp"
#include "test_support.hpp"

using namespace qwalk;
using testutil::max_abs_diff;

namespace {

GradientParams unit_params(double x, int num_spins) {
  GradientParams params;
  params.alpha_prime = 1.0;
  params.t = x;
  params.a = 1.0;
  params.gamma_per_spin.assign(num_spins, 1.0);
  return params;
}

DensityState random_state(int num_spins, std::mt19937& rng) {
  return DensityState::normalized(
      testutil::random_density_matrix(Eigen::Index(1) << num_spins, rng));
}

}  // namespace

TEST_CASE("dephasing probability closed form", "[channels]") {
  // x = 0: no dephasing. x = pi: the sine vanishes, p = 1/2 exactly.
  CHECK(dephasing_probability(unit_params(0.0, 1), 0).p == 0.0);
  CHECK(dephasing_probability(unit_params(kPi, 1), 0).p ==
        Catch::Approx(0.5).margin(1e-15));

  // x = pi/2: p = (1 - 2/pi)/2.
  CHECK(dephasing_probability(unit_params(kPi / 2.0, 1), 0).p ==
        Catch::Approx(0.18169011381620932).margin(1e-15));

  // Even in x and continuous through the series switchover.
  GradientParams neg = unit_params(0.8, 1);
  neg.gamma_per_spin[0] = -1.0;
  CHECK(dephasing_probability(neg, 0).p ==
        dephasing_probability(unit_params(0.8, 1), 0).p);
  const double just_below = dephasing_probability(unit_params(0.999e-6, 1), 0).p;
  const double just_above = dephasing_probability(unit_params(1.001e-6, 1), 0).p;
  CHECK(std::abs(just_below - just_above) < 1e-15);
  CHECK(just_below > 0.0);

  // The closed form never leaves [0, (1 + 0.2173...)/2].
  for (double x = 0.0; x < 50.0; x += 0.01) {
    const double p = dephasing_probability(unit_params(x, 1), 0).p;
    CHECK(p >= 0.0);
    CHECK(p <= 0.6087);
  }

  CHECK_THROWS_AS(DephasingStrength(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(DephasingStrength(1.01), std::invalid_argument);
}

TEST_CASE("z_dephase scales transverse terms by 1-2p", "[channels]") {
  std::mt19937 rng(31);
  const auto state = random_state(3, rng);
  const double p = 0.3;
  const auto out = z_dephase(state, 1, DephasingStrength(p));

  const auto before = pauli_decompose(state);
  const auto after = pauli_decompose(out);
  for (const auto& [label, value] : before.coeffs) {
    const char on_spin = label[1];
    const double scale = (on_spin == 'X' || on_spin == 'Y') ? 1.0 - 2.0 * p
                                                            : 1.0;
    CHECK(after.coeffs.at(label) == Catch::Approx(scale * value).margin(1e-12));
  }

  CHECK(max_abs_diff(z_dephase(state, 0, DephasingStrength(0.0)).matrix(),
                     state.matrix()) < 1e-15);
  CHECK_THROWS_AS(z_dephase(state, 3, DephasingStrength(0.1)),
                  std::invalid_argument);
}

TEST_CASE("full dephasing of the coin leaves corner probabilities alone",
          "[channels]") {
  cmatrix rho0 = cmatrix::Zero(8, 8);
  rho0(0, 0) = 1.0;
  const auto step1 = conjugate(DensityState::normalized(rho0),
                               walk_step(WalkSpec::square()));
  const auto dephased = z_dephase(step1, 0, DephasingStrength(0.5));

  const auto p = corner_probabilities(dephased);
  CHECK(p[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(p[1] == Catch::Approx(0.5).margin(1e-12));
  CHECK(p[2] == Catch::Approx(0.0).margin(1e-12));
  CHECK(p[3] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("full dephasing of every spin kills all transverse coherence",
          "[channels]") {
  const cmatrix rho = (pauli("III") + pauli("XXX")) / 8.0;
  auto state = DensityState::normalized(rho);
  for (int spin = 0; spin < 3; ++spin) {
    state = z_dephase(state, spin, DephasingStrength(0.5));
  }
  CHECK(max_abs_diff(state.matrix(), identity(3) / 8.0) < 1e-12);
}

TEST_CASE("z_dephase composition and idempotence", "[channels]") {
  std::mt19937 rng(17);
  const auto state = random_state(2, rng);

  const double p1 = 0.2, p2 = 0.35;
  const auto seq = z_dephase(z_dephase(state, 0, DephasingStrength(p1)), 0,
                             DephasingStrength(p2));
  const double p12 = p1 + p2 - 2.0 * p1 * p2;
  const auto once = z_dephase(state, 0, DephasingStrength(p12));
  CHECK(max_abs_diff(seq.matrix(), once.matrix()) < 1e-12);

  const auto half = z_dephase(state, 1, DephasingStrength(0.5));
  const auto half2 = z_dephase(half, 1, DephasingStrength(0.5));
  CHECK(max_abs_diff(half.matrix(), half2.matrix()) < 1e-12);
}

TEST_CASE("gradient_pulse zero duration is the identity", "[channels]") {
  std::mt19937 rng(3);
  const auto state = random_state(3, rng);
  const auto params = unit_params(0.0, 3);
  for (auto mode : {GradientMode::Independent, GradientMode::Collective}) {
    CHECK(max_abs_diff(gradient_pulse(state, params, mode).matrix(),
                       state.matrix()) < 1e-12);
  }
}

TEST_CASE("independent gradient equals per-spin z_dephase", "[channels]") {
  std::mt19937 rng(41);
  const auto state = random_state(3, rng);
  const auto params = unit_params(kPi, 3);

  auto expect = state;
  for (int spin = 0; spin < 3; ++spin) {
    expect = z_dephase(expect, spin, DephasingStrength(0.5));
  }
  const auto got = gradient_pulse(state, params, GradientMode::Independent);
  CHECK(max_abs_diff(got.matrix(), expect.matrix()) < 1e-12);
}

TEST_CASE("collective gradient matches the entrywise sinc oracle",
          "[channels]") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 4; ++trial) {
    const auto state = random_state(3, rng);
    GradientParams params = unit_params(0.9 + 0.4 * trial, 3);
    params.gamma_per_spin = {1.0, 0.76, 0.31};

    const auto got = gradient_pulse(state, params, GradientMode::Collective);
    const auto expect = oracle::gradient_collective_sinc(
        state.matrix(), params.alpha_prime, params.t, params.a,
        params.gamma_per_spin);
    CHECK(max_abs_diff(got.matrix(), expect) < 1e-8);
  }
}

TEST_CASE("single-spin collective gradient reproduces the closed form",
          "[channels]") {
  // Quadrature accuracy pinned against sinc on one spin, including near the
  // sinc minimum where the midpoint error is worst.
  std::mt19937 rng(59);
  const auto state = random_state(1, rng);
  for (double x : {0.3, kPi / 2.0, kPi, 4.4934, 2.0 * kPi}) {
    const auto got =
        gradient_pulse(state, unit_params(x, 1), GradientMode::Collective);
    const double scale = 2.0 * (0.5 - dephasing_probability(
                                           unit_params(x, 1), 0).p);
    cmatrix expect = state.matrix();
    expect(0, 1) *= scale;
    expect(1, 0) *= scale;
    INFO("x = " << x);
    CHECK(max_abs_diff(got.matrix(), expect) < 1e-8);
  }
}

TEST_CASE("collective gradient preserves zero-quantum coherence exactly",
          "[channels]") {
  // X1X2 + Y1Y2 lives in the zero-quantum subspace of two like spins: the
  // shared phase cancels and the collective average leaves it untouched,
  // while independent dephasing scales it by (1-2p)^2.
  const cmatrix zq = (pauli("XXI") + pauli("YYI")) / 2.0;
  const auto state = DensityState::normalized((identity(3) + zq) / 8.0);
  GradientParams params = unit_params(1.3, 3);

  const auto collective =
      gradient_pulse(state, params, GradientMode::Collective);
  const auto before = pauli_decompose(state);
  const auto after = pauli_decompose(collective);
  CHECK(after.coeffs.at("XXI") ==
        Catch::Approx(before.coeffs.at("XXI")).margin(1e-12));
  CHECK(after.coeffs.at("YYI") ==
        Catch::Approx(before.coeffs.at("YYI")).margin(1e-12));

  const auto independent =
      gradient_pulse(state, params, GradientMode::Independent);
  const double p = dephasing_probability(params, 0).p;
  const double scale = (1.0 - 2.0 * p) * (1.0 - 2.0 * p);
  const auto ind = pauli_decompose(independent);
  CHECK(ind.coeffs.at("XXI") ==
        Catch::Approx(scale * before.coeffs.at("XXI")).margin(1e-12));
  CHECK(scale < 0.9);  // the two modes genuinely differ here
}

TEST_CASE("gradient_pulse preserves trace and positivity", "[channels]") {
  std::mt19937 rng(67);
  for (auto mode : {GradientMode::Independent, GradientMode::Collective}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto state = random_state(2, rng);
      GradientParams params = unit_params(0.5 + trial, 2);
      params.gamma_per_spin = {1.0, 0.4};
      const auto out = gradient_pulse(state, params, mode);
      CHECK(std::abs(out.trace() - 1.0) < 1e-12);
      Eigen::SelfAdjointEigenSolver<cmatrix> es(out.matrix(),
                                                Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("gradient params validation", "[channels]") {
  std::mt19937 rng(71);
  const auto state = random_state(2, rng);

  GradientParams bad_t = unit_params(1.0, 2);
  bad_t.t = -0.1;
  CHECK_THROWS_AS(gradient_pulse(state, bad_t, GradientMode::Independent),
                  std::invalid_argument);

  GradientParams bad_a = unit_params(1.0, 2);
  bad_a.a = 0.0;
  CHECK_THROWS_AS(gradient_pulse(state, bad_a, GradientMode::Collective),
                  std::invalid_argument);

  const GradientParams wrong_size = unit_params(1.0, 3);
  CHECK_THROWS_AS(gradient_pulse(state, wrong_size, GradientMode::Independent),
                  std::invalid_argument);
}

TEST_CASE("protected_gradient with all spins protected is a pure pi pulse",
          "[channels]") {
  std::mt19937 rng(83);
  const auto state = random_state(3, rng);
  const auto params = unit_params(2.1, 3);

  const auto out = protected_gradient(state, {0, 1, 2}, params);
  const cmatrix flip = pauli("XXX");
  CHECK(max_abs_diff(out.matrix(), flip * state.matrix() * flip) < 1e-12);
}

TEST_CASE("protected_gradient with no spins equals two gradients",
          "[channels]") {
  std::mt19937 rng(89);
  const auto state = random_state(3, rng);
  const auto params = unit_params(1.7, 3);

  const auto twice = gradient_pulse(
      gradient_pulse(state, params, GradientMode::Independent), params,
      GradientMode::Independent);
  const auto out = protected_gradient(state, {}, params);
  CHECK(max_abs_diff(out.matrix(), twice.matrix()) < 1e-12);
}

TEST_CASE("protected spin coherence is refocused by the echo", "[channels]") {
  // (1 + X_coin)/2 on the coin, maximally mixed elsewhere. Protecting the
  // coin must hand back the transverse term at full magnitude.
  const cmatrix rho = (pauli("III") + pauli("XII")) / 8.0;
  const auto state = DensityState::normalized(rho);
  const auto params = unit_params(kPi / 1.3, 3);

  const auto out = protected_gradient(state, {0}, params);
  const auto coeffs = pauli_decompose(out);
  CHECK(std::abs(coeffs.coeffs.at("XII")) ==
        Catch::Approx(1.0 / 8.0).margin(1e-10));

  // Cross-check against a direct correlated two-gradient simulation (same z
  // for both pulses, pi flip in between). For this state the two models
  // agree: the protected spin refocuses, the others carry no coherence.
  const auto echoed = oracle::two_gradient_echo(
      state.matrix(), params.alpha_prime, params.t, params.a,
      params.gamma_per_spin, {0});
  CHECK(max_abs_diff(out.matrix(), echoed) < 1e-6);

  // A y term on the protected spin comes back axis-flipped by the pi_x.
  const cmatrix rho_y = (pauli("III") + pauli("YII")) / 8.0;
  const auto out_y =
      protected_gradient(DensityState::normalized(rho_y), {0}, params);
  CHECK(pauli_decompose(out_y).coeffs.at("YII") ==
        Catch::Approx(-1.0 / 8.0).margin(1e-10));
}

TEST_CASE("unprotected transverse coherence dephases twice", "[channels]") {
  const cmatrix rho = (pauli("III") + pauli("IXI")) / 8.0;
  const auto state = DensityState::normalized(rho);
  const auto params = unit_params(1.1, 3);
  const double p = dephasing_probability(params, 1).p;

  const auto out = protected_gradient(state, {0}, params);
  const double expect = (1.0 - 2.0 * p) * (1.0 - 2.0 * p) / 8.0;
  CHECK(pauli_decompose(out).coeffs.at("IXI") ==
        Catch::Approx(expect).margin(1e-12));

  CHECK_THROWS_AS(protected_gradient(state, {3}, params),
                  std::invalid_argument);
}

TEST_CASE("labeled pseudo-pure state structure", "[channels]") {
  const auto pps = labeled_pps();
  CHECK(pps.kind() == StateKind::Deviation);
  CHECK(pps.num_spins() == 4);
  CHECK(std::abs(pps.trace()) < 1e-15);

  // Partial trace over the label spin vanishes.
  const cmatrix& rho = pps.matrix();
  const cmatrix reduced = rho.block(0, 0, 8, 8) + rho.block(8, 8, 8, 8);
  CHECK(reduced.cwiseAbs().maxCoeff() < 1e-15);

  // Conditioned on the label |0> block: +|000><000|.
  cmatrix p000 = cmatrix::Zero(8, 8);
  p000(0, 0) = 1.0;
  CHECK(max_abs_diff(rho.block(0, 0, 8, 8), p000) < 1e-15);

  // Exactly the eight Z (x) {I,Z}^3 terms, all with coefficient 1/8.
  const auto coeffs = pauli_decompose(pps);
  int nonzero = 0;
  for (const auto& [label, value] : coeffs.coeffs) {
    if (std::abs(value) > 1e-14) {
      ++nonzero;
      CHECK(label[0] == 'Z');
      for (int k = 1; k < 4; ++k) {
        CHECK((label[k] == 'I' || label[k] == 'Z'));
      }
      CHECK(value == Catch::Approx(1.0 / 8.0).margin(1e-14));
    }
  }
  CHECK(nonzero == 8);
}

TEST_CASE("temporal average reconstructs the pure corner state", "[channels]") {
  const cmatrix iz = pauli1('I') + pauli1('Z');
  const std::vector<DensityState> experiments = {
      DensityState::deviation(kron(pauli1('Z'), kron(iz, iz))),
      DensityState::deviation(kron(pauli1('I'), kron(pauli1('Z'), iz))),
      DensityState::deviation(kron(pauli1('I'), kron(pauli1('I'), iz))),
  };
  const auto sum = temporal_average(experiments);

  cmatrix expect = cmatrix::Zero(8, 8);
  expect(0, 0) = 8.0;  // 8 |000><000|
  CHECK(max_abs_diff(sum.matrix(), expect) < 1e-14);
}

TEST_CASE("temporal average is linear and validates input", "[channels]") {
  std::mt19937 rng(97);
  std::vector<DensityState> inputs;
  for (int k = 0; k < 3; ++k) {
    inputs.push_back(
        DensityState::deviation(testutil::random_hermitian(8, rng)));
  }
  const cmatrix u = testutil::random_unitary(8, rng);

  std::vector<DensityState> evolved;
  for (const auto& s : inputs) evolved.push_back(conjugate(s, u));
  CHECK(max_abs_diff(temporal_average(evolved).matrix(),
                     conjugate(temporal_average(inputs), u).matrix()) < 1e-12);

  const auto zero = DensityState::deviation(cmatrix::Zero(8, 8));
  CHECK(temporal_average({zero, zero, zero}).matrix().cwiseAbs().maxCoeff() ==
        0.0);

  CHECK_THROWS_AS(temporal_average({inputs[0], inputs[1]}),
                  std::invalid_argument);
  const auto small = DensityState::deviation(testutil::random_hermitian(4, rng));
  CHECK_THROWS_AS(temporal_average({inputs[0], inputs[1], small}),
                  std::invalid_argument);
  const auto normalized = DensityState::normalized(identity(3) / 8.0);
  CHECK_THROWS_AS(temporal_average({inputs[0], inputs[1], normalized}),
                  std::invalid_argument);
}
