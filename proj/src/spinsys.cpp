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

#include "qwalk/spinsys.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace qwalk::nmr {

namespace {

constexpr double kAngleTol = 1e-9;

bool finite(double x) { return std::isfinite(x); }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Hamiltonian with the molecule's couplings but explicit shift offsets, so
// the soft-pulse frame change can reuse it.
cmatrix build_hamiltonian(const Molecule& m,
                          const std::vector<double>& offsets_hz) {
  const int n = m.num_spins();
  cmatrix h = cmatrix::Zero(1 << n, 1 << n);
  for (int i = 0; i < n; ++i)
    if (offsets_hz[i] != 0.0)
      h += kPi * offsets_hz[i] * embed1(pauli1('Z'), i, n);
  for (const auto& c : m.couplings) {
    if (c.j_hz == 0.0) continue;
    cmatrix term = embed1(pauli1('Z'), c.i, n) * embed1(pauli1('Z'), c.j, n);
    if (c.model == PairModel::Strong)
      term += embed1(pauli1('X'), c.i, n) * embed1(pauli1('X'), c.j, n) +
              embed1(pauli1('Y'), c.i, n) * embed1(pauli1('Y'), c.j, n);
    h += (kPi / 2.0) * c.j_hz * term;
  }
  return h;
}

// Fixed eigenbasis of a Hamiltonian, for repeated exponentials.
struct Propagator {
  Eigen::SelfAdjointEigenSolver<cmatrix> es;

  explicit Propagator(const cmatrix& h) : es(h) {
    if (es.info() != Eigen::Success)
      throw std::runtime_error("propagator: eigensolver failed");
  }

  cmatrix at(double t) const {
    const auto& vals = es.eigenvalues();
    cvector phases(vals.size());
    for (Eigen::Index k = 0; k < vals.size(); ++k)
      phases(k) = std::exp(complex_t(0.0, -vals(k) * t));
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
  }
};

std::vector<double> molecule_offsets(const Molecule& m) {
  std::vector<double> offsets(m.spins.size());
  for (std::size_t i = 0; i < m.spins.size(); ++i)
    offsets[i] = m.spins[i].offset_hz;
  return offsets;
}

// Spins grouped by species, preserving index order within a group.
std::vector<std::vector<int>> species_groups(const Molecule& m,
                                             const std::vector<int>& spins) {
  std::map<std::string, std::vector<int>> groups;
  for (int s : spins) groups[m.species_of(s)].push_back(s);
  std::vector<std::vector<int>> out;
  for (auto& [species, members] : groups) out.push_back(std::move(members));
  return out;
}

// One pi/2 composite on the off-carrier spin `mover`: hard pulse on the
// whole species, a 1/(4|dnu|) interval whose free z-rotation supplies the
// middle Rz(+-pi/2), and the closing hard pulse. Spins outside the species
// are decoupled from the interval by a pair of pi pulses.
void append_half_pi_composite(PulseSchedule& s, const Molecule& m, int mover,
                              double phase) {
  const double dnu = m.spins[mover].offset_hz;
  const double tau = 1.0 / (4.0 * std::abs(dnu));
  const double lead = dnu < 0.0 ? phase + kPi / 2.0 : phase - kPi / 2.0;
  const double trail = dnu < 0.0 ? phase - kPi / 2.0 : phase + kPi / 2.0;

  std::vector<int> species = m.species_peers(mover);
  std::vector<int> others;
  for (int i = 0; i < m.num_spins(); ++i)
    if (std::find(species.begin(), species.end(), i) == species.end())
      others.push_back(i);

  s.append(PulseEvent::hard_pulse(species, lead, kPi / 2.0));
  if (others.empty()) {
    s.append(PulseEvent::delay(tau));
  } else {
    s.append(PulseEvent::delay(tau / 2.0));
    for (const auto& group : species_groups(m, others))
      s.append(PulseEvent::hard_pulse(group, 0.0, kPi));
    s.append(PulseEvent::delay(tau / 2.0));
    for (const auto& group : species_groups(m, others))
      s.append(PulseEvent::hard_pulse(group, 0.0, kPi));
  }
  s.append(PulseEvent::hard_pulse(species, trail, kPi / 2.0));
}

}  // namespace

int Molecule::index_of(std::string_view spin_name) const {
  for (std::size_t i = 0; i < spins.size(); ++i)
    if (spins[i].name == spin_name) return static_cast<int>(i);
  throw std::invalid_argument("molecule " + name + ": no spin named " +
                              std::string(spin_name));
}

double Molecule::j_between(int i, int j) const {
  for (const auto& c : couplings)
    if ((c.i == i && c.j == j) || (c.i == j && c.j == i)) return c.j_hz;
  return 0.0;
}

PairModel Molecule::model_of(int i, int j) const {
  for (const auto& c : couplings)
    if ((c.i == i && c.j == j) || (c.i == j && c.j == i)) return c.model;
  return PairModel::Ising;
}

std::string Molecule::species_of(int spin) const {
  require(spin >= 0 && spin < num_spins(), "species_of: spin out of range");
  const std::string& spin_name = spins[spin].name;
  std::size_t len = 0;
  while (len < spin_name.size() &&
         std::isalpha(static_cast<unsigned char>(spin_name[len])))
    ++len;
  return spin_name.substr(0, len);
}

std::vector<int> Molecule::species_peers(int spin) const {
  const std::string species = species_of(spin);
  std::vector<int> peers;
  for (int i = 0; i < num_spins(); ++i)
    if (species_of(i) == species) peers.push_back(i);
  return peers;
}

void Molecule::validate() const {
  require(!spins.empty() && num_spins() <= kMaxSpins,
          "molecule: spin count must be 1..4");
  std::set<std::string> names;
  for (const auto& s : spins) {
    require(!s.name.empty() &&
                std::isalpha(static_cast<unsigned char>(s.name.front())),
            "molecule: spin names must start with a species letter");
    require(names.insert(s.name).second, "molecule: duplicate spin name");
    require(finite(s.offset_hz), "molecule: offset must be finite");
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto& c : couplings) {
    require(c.i >= 0 && c.j > c.i && c.j < num_spins(),
            "molecule: coupling indices must satisfy 0 <= i < j < n");
    require(pairs.insert({c.i, c.j}).second,
            "molecule: duplicate coupling pair");
    require(finite(c.j_hz), "molecule: coupling must be finite");
    if (c.model == PairModel::Strong)
      require(species_of(c.i) == species_of(c.j),
              "molecule: strong coupling requires like species");
  }
}

PulseEvent PulseEvent::ideal_rotation(int spin, double phase, double angle) {
  PulseEvent e;
  e.kind = EventKind::IdealRotation;
  e.targets = {spin};
  e.phase = phase;
  e.angle = angle;
  return e;
}

PulseEvent PulseEvent::hard_pulse(std::vector<int> targets, double phase,
                                  double angle) {
  PulseEvent e;
  e.kind = EventKind::HardPulse;
  e.targets = std::move(targets);
  e.phase = phase;
  e.angle = angle;
  return e;
}

PulseEvent PulseEvent::soft_pulse(int target, std::vector<double> shape_hz,
                                  double duration, double phase,
                                  double angle) {
  PulseEvent e;
  e.kind = EventKind::SoftPulse;
  e.targets = {target};
  e.shape_hz = std::move(shape_hz);
  e.duration = duration;
  e.phase = phase;
  e.angle = angle;
  return e;
}

PulseEvent PulseEvent::delay(double duration) {
  PulseEvent e;
  e.kind = EventKind::Delay;
  e.duration = duration;
  return e;
}

PulseEvent PulseEvent::frame_z(int spin, double angle) {
  PulseEvent e;
  e.kind = EventKind::FrameZ;
  e.targets = {spin};
  e.angle = angle;
  return e;
}

PulseEvent PulseEvent::gradient_event(GradientParams params, GradientMode mode,
                                      std::vector<int> protected_spins) {
  PulseEvent e;
  e.kind = EventKind::Gradient;
  e.gradient = std::move(params);
  e.gradient_mode = mode;
  e.protected_spins = std::move(protected_spins);
  return e;
}

void PulseEvent::validate(int num_spins) const {
  std::set<int> seen;
  for (int t : targets) {
    require(t >= 0 && t < num_spins, "pulse event: target out of range");
    require(seen.insert(t).second, "pulse event: duplicate target");
  }
  require(finite(phase) && finite(angle) && finite(duration),
          "pulse event: parameters must be finite");
  switch (kind) {
    case EventKind::IdealRotation:
    case EventKind::FrameZ:
      require(targets.size() == 1, "pulse event: needs exactly one target");
      break;
    case EventKind::HardPulse:
      require(!targets.empty(), "pulse event: hard pulse needs targets");
      break;
    case EventKind::SoftPulse:
      require(targets.size() == 1, "pulse event: needs exactly one target");
      require(duration > 0.0, "pulse event: soft pulse needs a duration");
      require(shape_hz.size() >= 8, "pulse event: envelope too coarse");
      for (double a : shape_hz)
        require(finite(a), "pulse event: envelope must be finite");
      break;
    case EventKind::Delay:
      require(targets.empty(), "pulse event: delays take no targets");
      require(duration >= 0.0, "pulse event: delay must be nonnegative");
      break;
    case EventKind::Gradient:
      gradient.validate(num_spins);
      for (int p : protected_spins)
        require(p >= 0 && p < num_spins,
                "pulse event: protected spin out of range");
      break;
  }
}

void PulseSchedule::append(PulseEvent event) {
  event.validate(molecule.num_spins());
  events.push_back(std::move(event));
}

void PulseSchedule::extend(const PulseSchedule& tail) {
  require(tail.molecule.name == molecule.name &&
              tail.molecule.num_spins() == molecule.num_spins(),
          "schedule: cannot extend across molecules");
  for (const auto& e : tail.events) append(e);
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& e : events) t += e.duration;
  return t;
}

int PulseSchedule::pulse_count() const {
  int count = 0;
  for (const auto& e : events)
    if (e.kind == EventKind::IdealRotation || e.kind == EventKind::HardPulse ||
        e.kind == EventKind::SoftPulse)
      ++count;
  return count;
}

std::vector<double> PulseSchedule::frame_totals() const {
  std::vector<double> totals(molecule.num_spins(), 0.0);
  for (const auto& e : events)
    if (e.kind == EventKind::FrameZ) totals[e.targets.front()] += e.angle;
  return totals;
}

void PulseSchedule::validate() const {
  molecule.validate();
  for (const auto& e : events) e.validate(molecule.num_spins());
}

cmatrix hamiltonian(const Molecule& m) {
  m.validate();
  return build_hamiltonian(m, molecule_offsets(m));
}

cmatrix free_evolution(const Molecule& m, double t) {
  require(finite(t), "free_evolution: time must be finite");
  return expm_hermitian(hamiltonian(m), t);
}

std::vector<double> gaussian_shape(double angle, double duration,
                                   int samples) {
  require(finite(angle), "gaussian_shape: angle must be finite");
  require(duration > 0.0, "gaussian_shape: duration must be positive");
  require(samples >= 8, "gaussian_shape: too few samples");
  const double dt = duration / samples;
  const double sigma = duration / 6.0;  // +-3 sigma truncation
  std::vector<double> shape(samples);
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) * dt - duration / 2.0;
    shape[k] = std::exp(-t * t / (2.0 * sigma * sigma));
    sum += shape[k];
  }
  const double scale = angle / (2.0 * kPi * dt * sum);
  for (double& a : shape) a *= scale;
  return shape;
}

cmatrix soft_pulse(const Molecule& m, int target,
                   const std::vector<double>& shape_hz, double duration,
                   double phase, double nominal_angle) {
  m.validate();
  const int n = m.num_spins();
  require(target >= 0 && target < n, "soft_pulse: target out of range");
  require(duration > 0.0, "soft_pulse: duration must be positive");
  require(shape_hz.size() >= 8, "soft_pulse: envelope too coarse");
  require(finite(phase) && finite(nominal_angle),
          "soft_pulse: parameters must be finite");

  const double dt = duration / static_cast<double>(shape_hz.size());
  double realized = 0.0;
  for (double a : shape_hz) {
    require(finite(a), "soft_pulse: envelope must be finite");
    realized += 2.0 * kPi * a * dt;
  }
  if (std::abs(realized - nominal_angle) >
      std::max(0.02 * std::abs(nominal_angle), 1e-9))
    throw std::invalid_argument(
        "soft_pulse: envelope flip angle disagrees with the nominal angle");

  // Simulate in the frame rotating at the target species' carrier: species
  // offsets shift by -nu_t, other species keep theirs, couplings are frame
  // invariant, and the rf axis is static.
  const std::vector<int> species = m.species_peers(target);
  const double nu_t = m.spins[target].offset_hz;
  std::vector<double> offsets = molecule_offsets(m);
  for (int i : species) offsets[i] -= nu_t;
  const cmatrix h0 = build_hamiltonian(m, offsets);

  cmatrix drive = cmatrix::Zero(1 << n, 1 << n);
  const cmatrix axis = std::cos(phase) * pauli1('X') +
                       std::sin(phase) * pauli1('Y');
  for (int i : species) drive += embed1(axis, i, n);

  cmatrix u = identity(n);
  for (double amp : shape_hz)
    u = expm_hermitian(h0 + kPi * amp * drive, dt) * u;

  // Undo the frame change so the result lives in the schedule's per-species
  // rotating frame alongside delays and hard pulses.
  const cmatrix carrier = rotation_z(2.0 * kPi * nu_t * duration);
  for (int i : species) u = embed1(carrier, i, n) * u;
  return u;
}

PulseSchedule tce_selective(const Molecule& m, int target, double phase,
                            double angle) {
  m.validate();
  require(target >= 0 && target < m.num_spins(),
          "tce_selective: target out of range");
  const std::vector<int> species = m.species_peers(target);
  require(species.size() == 2,
          "tce_selective: needs exactly two spins of the target species");
  const int partner = species[0] == target ? species[1] : species[0];

  double a = angle;
  double ph = phase;
  if (a < 0.0) {  // R_phi(-theta) = R_(phi+pi)(theta)
    a = -a;
    ph += kPi;
  }
  const bool half = std::abs(a - kPi / 2.0) < kAngleTol;
  const bool full = std::abs(a - kPi) < kAngleTol;
  require(half || full, "tce_selective: angle must be +-pi/2 or +-pi");
  const int reps = full ? 2 : 1;

  const double nu_t = m.spins[target].offset_hz;
  const double nu_p = m.spins[partner].offset_hz;

  PulseSchedule s{m, {}};
  if (std::abs(nu_t) > kAngleTol) {
    // Composite sequence rotates the off-carrier spin; the carrier partner
    // sees two opposite-axis pulses that cancel.
    require(std::abs(nu_p) < kAngleTol,
            "tce_selective: partner spin must sit on the carrier");
    for (int r = 0; r < reps; ++r)
      append_half_pi_composite(s, m, target, ph);
  } else {
    // Carrier-spin target: rotate both, then walk the partner back.
    require(std::abs(nu_p) > kAngleTol,
            "tce_selective: species spins must be resolved in offset");
    s.append(PulseEvent::hard_pulse(species, ph, a));
    for (int r = 0; r < reps; ++r)
      append_half_pi_composite(s, m, partner, ph + kPi);
  }
  return s;
}

cmatrix simulate_schedule(const PulseSchedule& schedule) {
  schedule.validate();
  const Molecule& m = schedule.molecule;
  const int n = m.num_spins();
  Propagator free_prop(hamiltonian(m));

  cmatrix u = identity(n);
  for (const auto& e : schedule.events) {
    switch (e.kind) {
      case EventKind::IdealRotation:
      case EventKind::HardPulse: {
        const cmatrix r = rotation_xy(e.phase, e.angle);
        for (int t : e.targets) u = embed1(r, t, n) * u;
        break;
      }
      case EventKind::FrameZ:
        u = embed1(rotation_z(e.angle), e.targets.front(), n) * u;
        break;
      case EventKind::Delay:
        u = free_prop.at(e.duration) * u;
        break;
      case EventKind::SoftPulse:
        u = soft_pulse(m, e.targets.front(), e.shape_hz, e.duration, e.phase,
                       e.angle) *
            u;
        break;
      case EventKind::Gradient:
        throw std::invalid_argument(
            "simulate_schedule: gradients need the density-matrix overload");
    }
  }
  return u;
}

DensityState simulate_schedule(const PulseSchedule& schedule,
                               const DensityState& initial) {
  schedule.validate();
  const Molecule& m = schedule.molecule;
  const int n = m.num_spins();
  require(initial.num_spins() == n, "simulate_schedule: state size mismatch");
  Propagator free_prop(hamiltonian(m));

  DensityState state = initial;
  for (const auto& e : schedule.events) {
    switch (e.kind) {
      case EventKind::IdealRotation:
      case EventKind::HardPulse: {
        const cmatrix r = rotation_xy(e.phase, e.angle);
        for (int t : e.targets) state = conjugate(state, embed1(r, t, n));
        break;
      }
      case EventKind::FrameZ:
        state = conjugate(
            state, embed1(rotation_z(e.angle), e.targets.front(), n));
        break;
      case EventKind::Delay:
        state = conjugate(state, free_prop.at(e.duration));
        break;
      case EventKind::SoftPulse:
        state = conjugate(state,
                          soft_pulse(m, e.targets.front(), e.shape_hz,
                                     e.duration, e.phase, e.angle));
        break;
      case EventKind::Gradient:
        state = e.protected_spins.empty()
                    ? gradient_pulse(state, e.gradient, e.gradient_mode)
                    : protected_gradient(state, e.protected_spins, e.gradient);
        break;
    }
  }
  return state;
}

}  // namespace qwalk::nmr
