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
#include <complex>
#include <random>

#include "qwalk/molecules.hpp"
#include "qwalk/qops.hpp"
#include "qwalk/spinsys.hpp"
#include "test_support.hpp"

using namespace qwalk;
using namespace qwalk::nmr;
using testutil::max_abs_diff;

namespace {

Molecule single_spin(double offset_hz) {
  Molecule m;
  m.name = "one";
  m.spins = {{"C1", offset_hz}};
  return m;
}

Molecule ising_pair(double nu1, double nu2, double j_hz) {
  Molecule m;
  m.name = "pair";
  m.spins = {{"C1", nu1}, {"C2", nu2}};
  m.couplings = {{0, 1, j_hz, PairModel::Ising}};
  return m;
}

// tce_like with selected couplings zeroed, to isolate sequence errors.
Molecule tce_with_j(double j_cc, double j_c1h, double j_c2h) {
  Molecule m = tce_like();
  m.couplings[0].j_hz = j_cc;
  m.couplings[1].j_hz = j_c1h;
  m.couplings[2].j_hz = j_c2h;
  return m;
}

}  // namespace

TEST_CASE("molecule validation and lookups") {
  Molecule m = crotonic_like();
  REQUIRE_NOTHROW(m.validate());
  CHECK(m.num_spins() == 4);
  CHECK(m.index_of("C3") == 2);
  CHECK_THROWS_AS(m.index_of("C9"), std::invalid_argument);
  CHECK(m.j_between(1, 2) == Catch::Approx(69.7));
  CHECK(m.j_between(2, 1) == Catch::Approx(69.7));
  CHECK(m.species_of(0) == "C");
  CHECK(m.species_peers(0) == std::vector<int>{0, 1, 2, 3});

  Molecule tce = tce_like();
  CHECK(tce.species_of(2) == "H");
  CHECK(tce.species_peers(0) == std::vector<int>{0, 1});
  CHECK(tce.model_of(0, 1) == PairModel::Strong);
  CHECK(tce.model_of(0, 2) == PairModel::Ising);

  SECTION("rejects duplicate spin names") {
    m.spins[1].name = "C1";
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  }
  SECTION("rejects bad coupling indices") {
    m.couplings.push_back({2, 2, 5.0, PairModel::Ising});
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  }
  SECTION("rejects duplicate coupling pairs") {
    m.couplings.push_back({0, 1, 5.0, PairModel::Ising});
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  }
  SECTION("rejects cross-species strong coupling") {
    Molecule bad = tce_like();
    bad.couplings[1].model = PairModel::Strong;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
  SECTION("rejects more than four spins") {
    Molecule big = crotonic_like();
    big.spins.push_back({"C5", 100.0});
    CHECK_THROWS_AS(big.validate(), std::invalid_argument);
  }
}

TEST_CASE("molecule json round-trip") {
  const Molecule m = tce_like();
  const Molecule back = molecule_from_json(to_json(m));
  REQUIRE(back.num_spins() == m.num_spins());
  CHECK(back.name == m.name);
  for (int i = 0; i < m.num_spins(); ++i) {
    CHECK(back.spins[i].name == m.spins[i].name);
    CHECK(back.spins[i].offset_hz ==
          Catch::Approx(m.spins[i].offset_hz).margin(1e-12));
  }
  REQUIRE(back.couplings.size() == m.couplings.size());
  for (std::size_t c = 0; c < m.couplings.size(); ++c) {
    CHECK(back.couplings[c].i == m.couplings[c].i);
    CHECK(back.couplings[c].j == m.couplings[c].j);
    CHECK(back.couplings[c].j_hz ==
          Catch::Approx(m.couplings[c].j_hz).margin(1e-12));
    CHECK((back.couplings[c].model == m.couplings[c].model));
  }

  CHECK_THROWS_AS(molecule_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(molecule_from_json("{\"name\":\"x\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      molecule_from_json(
          "{\"name\":\"x\",\"spins\":[{\"name\":\"C1\",\"offset_hz\":0}],"
          "\"couplings\":[{\"i\":0,\"j\":0,\"j_hz\":1,\"model\":\"odd\"}]}"),
      std::invalid_argument);
}

TEST_CASE("built-in molecules have the documented registers") {
  const Molecule croto = crotonic_like();
  CHECK(croto.spins[0].offset_hz == Catch::Approx(-4850.0));
  CHECK(croto.spins[3].offset_hz == Catch::Approx(5610.0));
  CHECK(croto.j_between(2, 3) == Catch::Approx(72.4));
  for (const auto& c : croto.couplings) CHECK(c.model == PairModel::Ising);

  const Molecule tce = tce_like();
  CHECK(tce.spins[0].offset_hz == 0.0);
  CHECK(tce.spins[1].offset_hz == Catch::Approx(-1050.0));
  CHECK(tce.spins[1].offset_hz / tce.j_between(0, 1) == Catch::Approx(-10.5));
  CHECK(tce.j_between(0, 2) == Catch::Approx(201.0));
  CHECK(tce.j_between(1, 2) == Catch::Approx(9.0));

  const Molecule pair = carbon_pair(30.0);
  CHECK(pair.spins[1].offset_hz == Catch::Approx(-3000.0));
  CHECK(pair.model_of(0, 1) == PairModel::Strong);
  CHECK(carbon_pair(10.5, 100.0, PairModel::Ising).model_of(0, 1) ==
        PairModel::Ising);
}

TEST_CASE("hamiltonian matches closed forms") {
  SECTION("single spin is a z precession") {
    const Molecule m = single_spin(123.0);
    CHECK(max_abs_diff(hamiltonian(m), kPi * 123.0 * pauli1('Z')) < 1e-12);
    const double t = 0.0137;
    CHECK(max_abs_diff(free_evolution(m, t),
                       rotation_z(2.0 * kPi * 123.0 * t)) < 1e-12);
  }

  SECTION("ising pair is diagonal with shift and coupling phases") {
    const Molecule m = ising_pair(100.0, -50.0, 8.0);
    const cmatrix h = hamiltonian(m);
    for (int b = 0; b < 4; ++b) {
      const int z1 = b & 2 ? -1 : 1;
      const int z2 = b & 1 ? -1 : 1;
      CHECK(std::abs(h(b, b) - complex_t(kPi * (100.0 * z1 - 50.0 * z2) +
                                         kPi / 2.0 * 8.0 * z1 * z2)) < 1e-12);
    }
    CHECK(h.cwiseAbs().sum() ==
          Catch::Approx(h.diagonal().cwiseAbs().sum()));  // no off-diagonals
  }

  SECTION("strong pair adds the flip-flop element") {
    Molecule m = ising_pair(100.0, -50.0, 8.0);
    m.couplings[0].model = PairModel::Strong;
    const cmatrix h = hamiltonian(m);
    CHECK(std::abs(h(1, 2) - complex_t(kPi * 8.0)) < 1e-12);  // |01> <-> |10>
    CHECK(std::abs(h(2, 1) - complex_t(kPi * 8.0)) < 1e-12);
    CHECK(std::abs(h(0, 3)) < 1e-12);
    CHECK(std::abs(h(0, 0) - complex_t(kPi * 50.0 + kPi * 4.0)) < 1e-12);
  }

  SECTION("free evolution composes and is unitary") {
    const Molecule m = tce_like();
    const cmatrix u1 = free_evolution(m, 0.7e-3);
    const cmatrix u2 = free_evolution(m, 1.1e-3);
    CHECK(is_unitary(u1));
    CHECK(max_abs_diff(free_evolution(m, 1.8e-3), u2 * u1) < 1e-10);
  }
}

TEST_CASE("gaussian shapes are calibrated exactly") {
  const double duration = 704e-6;
  const auto shape = gaussian_shape(kPi / 2.0, duration, 128);
  REQUIRE(shape.size() == 128);
  double integral = 0.0;
  for (double a : shape) integral += 2.0 * kPi * a * duration / 128.0;
  CHECK(integral == Catch::Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(shape[64] > shape[20]);                          // peaked at center
  CHECK(shape[10] == Catch::Approx(shape[117]));         // symmetric
  for (double a : shape) CHECK(a >= 0.0);

  const auto negative = gaussian_shape(-kPi / 2.0, duration, 128);
  CHECK(negative[64] < 0.0);

  CHECK_THROWS_AS(gaussian_shape(kPi, 0.0, 128), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_shape(kPi, duration, 4), std::invalid_argument);
}

TEST_CASE("soft pulse calibration guard") {
  const Molecule m = single_spin(0.0);
  auto shape = gaussian_shape(kPi / 2.0, 1e-3, 64);
  REQUIRE_NOTHROW(soft_pulse(m, 0, shape, 1e-3, 0.0, kPi / 2.0));

  auto off = shape;
  for (double& a : off) a *= 1.05;
  CHECK_THROWS_AS(soft_pulse(m, 0, off, 1e-3, 0.0, kPi / 2.0),
                  std::invalid_argument);

  auto close = shape;
  for (double& a : close) a *= 1.01;  // inside the 2% acceptance band
  REQUIRE_NOTHROW(soft_pulse(m, 0, close, 1e-3, 0.0, kPi / 2.0));
}

TEST_CASE("soft pulse limiting cases") {
  SECTION("zero amplitude reduces to free evolution") {
    const Molecule m = tce_like();
    const std::vector<double> zero(32, 0.0);
    const cmatrix u = soft_pulse(m, 1, zero, 2e-3, 0.3, 0.0);
    CHECK(max_abs_diff(u, free_evolution(m, 2e-3)) < 1e-10);
  }

  SECTION("on-resonance uncoupled spin gets the exact rotation") {
    const Molecule m = single_spin(0.0);
    const double duration = 1e-3;
    const auto shape = gaussian_shape(kPi / 2.0, duration, 128);
    // All segments rotate about the same axis, so discretization is exact.
    CHECK(max_abs_diff(soft_pulse(m, 0, shape, duration, 0.0, kPi / 2.0),
                       rotation_xy(0.0, kPi / 2.0)) < 1e-12);
    CHECK(max_abs_diff(soft_pulse(m, 0, shape, duration, kPi / 2.0, kPi / 2.0),
                       rotation_xy(kPi / 2.0, kPi / 2.0)) < 1e-12);
  }

  SECTION("drives every spin of the species and no others") {
    Molecule m;
    m.name = "flat";
    m.spins = {{"C1", 0.0}, {"C2", 0.0}, {"H", 0.0}};
    const double duration = 1e-3;
    const auto shape = gaussian_shape(kPi / 2.0, duration, 64);
    const cmatrix u = soft_pulse(m, 0, shape, duration, 0.0, kPi / 2.0);
    const cmatrix r = rotation_xy(0.0, kPi / 2.0);
    const cmatrix expected = kron(kron(r, r), identity(1));
    CHECK(max_abs_diff(u, expected) < 1e-12);
  }

  SECTION("discretization is second order and Richardson-converged") {
    const Molecule m = crotonic_like();
    const double duration = 704e-6;
    auto at = [&](int samples) {
      return soft_pulse(m, 1, gaussian_shape(kPi / 2.0, duration, samples),
                        duration, 0.0, kPi / 2.0);
    };
    const cmatrix u128 = at(128);
    const cmatrix u256 = at(256);
    const cmatrix u512 = at(512);
    CHECK(is_unitary(u128));
    // Halving the step shrinks the change by ~4x (second-order sampling)...
    const double step1 = max_abs_diff(u256, u128);
    const double step2 = max_abs_diff(u512, u256);
    CHECK(step1 < 2e-5);
    CHECK(step2 < 0.30 * step1);
    // ... so the Richardson limits from successive pairs pin the continuum
    // unitary to 1e-8, which is what the 128-sample default guarantees.
    const cmatrix rich1 = (4.0 * u256 - u128) / 3.0;
    const cmatrix rich2 = (4.0 * u512 - u256) / 3.0;
    CHECK(max_abs_diff(rich1, rich2) < 1e-8);
  }
}

TEST_CASE("composite selective rotation is exact at J = 0") {
  const Molecule m = tce_with_j(0.0, 0.0, 0.0);

  SECTION("off-carrier target, pi/2, a few phases") {
    for (double phase : {0.0, 0.4, kPi / 2.0, 2.0, -1.3}) {
      const PulseSchedule s = tce_selective(m, 1, phase, kPi / 2.0);
      const cmatrix ideal = embed1(rotation_xy(phase, kPi / 2.0), 1, 3);
      CHECK(phase_distance(simulate_schedule(s), ideal) < 1e-10);
    }
  }

  SECTION("off-carrier target, pi and negative angles") {
    const cmatrix u_pi = simulate_schedule(tce_selective(m, 1, 0.7, kPi));
    CHECK(phase_distance(u_pi, embed1(rotation_xy(0.7, kPi), 1, 3)) < 1e-10);
    const cmatrix u_neg =
        simulate_schedule(tce_selective(m, 1, 0.7, -kPi / 2.0));
    CHECK(phase_distance(u_neg, embed1(rotation_xy(0.7, -kPi / 2.0), 1, 3)) <
          1e-10);
  }

  SECTION("carrier-spin target uses the walk-back variant") {
    for (double angle : {kPi / 2.0, kPi}) {
      const PulseSchedule s = tce_selective(m, 0, 0.2, angle);
      const cmatrix ideal = embed1(rotation_xy(0.2, angle), 0, 3);
      CHECK(phase_distance(simulate_schedule(s), ideal) < 1e-10);
    }
  }

  SECTION("proton couplings and shift are refocused by the echo pair") {
    Molecule coupled = tce_with_j(0.0, 201.0, 9.0);
    coupled.spins[2].offset_hz = 437.0;
    const PulseSchedule s = tce_selective(coupled, 1, 1.1, kPi / 2.0);
    // The proton ends with two pi pulses: identity up to phase on it.
    const cmatrix ideal = embed1(rotation_xy(1.1, kPi / 2.0), 1, 3);
    CHECK(phase_distance(simulate_schedule(s), ideal) < 1e-10);
  }
}

TEST_CASE("composite selective rotation structure") {
  const Molecule m = tce_like();
  const PulseSchedule s = tce_selective(m, 1, 0.0, kPi / 2.0);

  // tau = 1/(4 |dnu|), split around the proton echo.
  const double tau = 1.0 / (4.0 * 1050.0);
  CHECK(s.total_duration() == Catch::Approx(tau));
  REQUIRE(s.events.size() == 6);
  CHECK(s.events[0].kind == EventKind::HardPulse);
  CHECK(s.events[0].targets == std::vector<int>{0, 1});
  CHECK(s.events[1].kind == EventKind::Delay);
  CHECK(s.events[1].duration == Catch::Approx(tau / 2.0));
  CHECK(s.events[2].targets == std::vector<int>{2});
  CHECK(s.events[2].angle == Catch::Approx(kPi));
  CHECK(s.events[5].kind == EventKind::HardPulse);

  // Off-carrier shift is negative here, so the leading phase is +pi/2.
  CHECK(s.events[0].phase == Catch::Approx(kPi / 2.0));
  CHECK(s.events[5].phase == Catch::Approx(-kPi / 2.0));

  SECTION("validation") {
    CHECK_THROWS_AS(tce_selective(m, 1, 0.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(tce_selective(m, 2, 0.0, kPi / 2.0),
                    std::invalid_argument);  // proton has no species partner
    Molecule shifted = m;
    shifted.spins[0].offset_hz = 200.0;  // nobody on carrier
    CHECK_THROWS_AS(tce_selective(shifted, 1, 0.0, kPi / 2.0),
                    std::invalid_argument);
  }
}

TEST_CASE("schedule simulation") {
  const Molecule m = ising_pair(40.0, -25.0, 12.0);

  SECTION("events compose in order") {
    PulseSchedule s{m, {}};
    s.append(PulseEvent::ideal_rotation(0, 0.3, kPi / 2.0));
    s.append(PulseEvent::delay(1.7e-3));
    s.append(PulseEvent::frame_z(1, 0.9));
    s.append(PulseEvent::hard_pulse({0, 1}, 0.0, kPi));
    const cmatrix expected =
        embed1(rotation_xy(0.0, kPi), 0, 2) * embed1(rotation_xy(0.0, kPi), 1, 2) *
        embed1(rotation_z(0.9), 1, 2) * free_evolution(m, 1.7e-3) *
        embed1(rotation_xy(0.3, kPi / 2.0), 0, 2);
    CHECK(max_abs_diff(simulate_schedule(s), expected) < 1e-10);
  }

  SECTION("unitary mode rejects gradients, density mode applies them") {
    GradientParams params;
    params.alpha_prime = 2.0e4;
    params.t = 1e-3;
    params.a = 1.0;
    params.gamma_per_spin = {1.0, 0.5};
    PulseSchedule s{m, {}};
    s.append(PulseEvent::gradient_event(params, GradientMode::Independent));
    CHECK_THROWS_AS(simulate_schedule(s), std::invalid_argument);

    cmatrix plus = cmatrix::Zero(4, 4);
    plus.setConstant(0.25);  // |++><++|
    const DensityState rho = DensityState::normalized(plus);
    const DensityState out = simulate_schedule(s, rho);
    DensityState expected = rho;
    for (int spin : {0, 1})
      expected = z_dephase(expected, spin, dephasing_probability(params, spin));
    CHECK(max_abs_diff(out.matrix(), expected.matrix()) < 1e-12);
  }

  SECTION("density mode matches conjugation by the unitary") {
    std::mt19937 rng(77);
    const DensityState rho =
        DensityState::normalized(testutil::random_density_matrix(4, rng));
    PulseSchedule s{m, {}};
    s.append(PulseEvent::hard_pulse({0}, 1.0, kPi / 3.0));
    s.append(PulseEvent::delay(0.9e-3));
    s.append(PulseEvent::ideal_rotation(1, -0.4, kPi / 2.0));
    const DensityState via_density = simulate_schedule(s, rho);
    const DensityState via_unitary = conjugate(rho, simulate_schedule(s));
    CHECK(max_abs_diff(via_density.matrix(), via_unitary.matrix()) < 1e-12);
  }
}

TEST_CASE("schedule bookkeeping and validation") {
  const Molecule m = tce_like();
  PulseSchedule s{m, {}};
  s.append(PulseEvent::delay(1e-3));
  s.append(PulseEvent::frame_z(0, 0.25));
  s.append(PulseEvent::frame_z(0, 0.5));
  s.append(PulseEvent::frame_z(2, -1.0));
  s.append(PulseEvent::hard_pulse({0, 1}, 0.0, kPi / 2.0));
  s.append(PulseEvent::soft_pulse(1, std::vector<double>(16, 0.0), 2e-3, 0.0,
                                  0.0));

  CHECK(s.total_duration() == Catch::Approx(3e-3));
  CHECK(s.pulse_count() == 2);
  const auto totals = s.frame_totals();
  CHECK(totals[0] == Catch::Approx(0.75));
  CHECK(totals[1] == 0.0);
  CHECK(totals[2] == Catch::Approx(-1.0));

  CHECK_THROWS_AS(s.append(PulseEvent::ideal_rotation(3, 0.0, kPi)),
                  std::invalid_argument);
  CHECK_THROWS_AS(s.append(PulseEvent::delay(-1.0)), std::invalid_argument);
  CHECK_THROWS_AS(
      s.append(PulseEvent::soft_pulse(0, std::vector<double>(4, 1.0), 1e-3,
                                      0.0, 0.0)),
      std::invalid_argument);

  PulseSchedule other{crotonic_like(), {}};
  CHECK_THROWS_AS(other.extend(s), std::invalid_argument);

  PulseSchedule same{tce_like(), {}};
  same.append(PulseEvent::delay(2e-3));
  REQUIRE_NOTHROW(s.extend(same));
  CHECK(s.total_duration() == Catch::Approx(5e-3));
}
