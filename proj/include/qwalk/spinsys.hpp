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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qwalk/channels.hpp"
#include "qwalk/qops.hpp"

// Liquid-state NMR register: molecule description, internal Hamiltonian,
// pulse schedules, and their simulation.
//
// Conventions, in the per-spin rotating frame at each species' carrier:
//   H = pi * sum_i nu_i Z_i  +  (pi/2) * sum_{i<j} J_ij C_ij      (rad/s)
// with nu_i the chemical-shift offset and J_ij the scalar coupling, both in
// Hz, and C_ij either Z_i Z_j (weak/ising) or X_i X_j + Y_i Y_j + Z_i Z_j
// (strong). Free evolution for time tau advances each spin by
// Rz(2 pi nu_i tau) on top of the coupling action.

namespace qwalk::nmr {

enum class PairModel { Ising, Strong };

struct SpinInfo {
  std::string name;       // species = leading alphabetic prefix, e.g. "C2"->C
  double offset_hz = 0.0;
};

struct Coupling {
  int i = 0;
  int j = 0;
  double j_hz = 0.0;
  PairModel model = PairModel::Ising;
};

struct Molecule {
  std::string name;
  std::vector<SpinInfo> spins;
  std::vector<Coupling> couplings;  // one entry per unordered pair, i < j

  int num_spins() const { return static_cast<int>(spins.size()); }
  int index_of(std::string_view spin_name) const;  // throws if absent
  double j_between(int i, int j) const;            // 0 when uncoupled
  PairModel model_of(int i, int j) const;
  std::string species_of(int spin) const;
  std::vector<int> species_peers(int spin) const;  // includes `spin`

  void validate() const;
};

enum class EventKind {
  IdealRotation,  // instantaneous single-spin rotation, no evolution
  HardPulse,      // instantaneous rotation on a set of spins
  SoftPulse,      // shaped pulse, evolves the full Hamiltonian underneath
  Delay,          // free evolution
  Gradient,       // engineered dephasing; density-matrix simulation only
  FrameZ,         // reference-frame z-rotation, instantaneous and exact
};

struct PulseEvent {
  EventKind kind = EventKind::Delay;
  std::vector<int> targets;       // spins addressed (Delay: empty)
  double phase = 0.0;             // transverse axis (rad); z angle for FrameZ
  double angle = 0.0;             // rotation angle (rad)
  double duration = 0.0;          // seconds (SoftPulse, Delay)
  std::vector<double> shape_hz;   // SoftPulse envelope samples (Hz)
  GradientParams gradient;        // Gradient events
  GradientMode gradient_mode = GradientMode::Independent;
  std::vector<int> protected_spins;  // Gradient events with an echo

  static PulseEvent ideal_rotation(int spin, double phase, double angle);
  static PulseEvent hard_pulse(std::vector<int> targets, double phase,
                               double angle);
  static PulseEvent soft_pulse(int target, std::vector<double> shape_hz,
                               double duration, double phase, double angle);
  static PulseEvent delay(double duration);
  static PulseEvent frame_z(int spin, double angle);
  static PulseEvent gradient_event(GradientParams params, GradientMode mode,
                                   std::vector<int> protected_spins = {});

  void validate(int num_spins) const;
};

struct PulseSchedule {
  Molecule molecule;
  std::vector<PulseEvent> events;  // applied first to last

  void append(PulseEvent event);
  void extend(const PulseSchedule& tail);  // same molecule required
  double total_duration() const;
  int pulse_count() const;  // rotations only, frame changes excluded
  /// Net FrameZ angle per spin across the schedule.
  std::vector<double> frame_totals() const;
  void validate() const;
};

/// Internal Hamiltonian in rad/s with the conventions above.
cmatrix hamiltonian(const Molecule& m);

/// exp(-i H t).
cmatrix free_evolution(const Molecule& m, double t);

/// Gaussian envelope truncated at +-3 sigma, `samples` midpoint values in Hz,
/// calibrated so 2 pi sum(amp) dt equals `angle` exactly.
std::vector<double> gaussian_shape(double angle, double duration,
                                   int samples = 128);

/// Shaped pulse at the carrier of `target`'s species, driving every spin of
/// that species, with the full internal Hamiltonian evolving underneath.
/// Piecewise-constant propagator in the species frame; the returned unitary
/// is in the schedule's usual per-species rotating frame. Rejects envelopes
/// whose realized flip angle differs from `nominal_angle` by more than 2%.
cmatrix soft_pulse(const Molecule& m, int target,
                   const std::vector<double>& shape_hz, double duration,
                   double phase, double nominal_angle);

/// Composite hard-pulse/delay sequence rotating `target` by `angle` (+-pi/2
/// or +-pi) about the transverse axis `phase` while the other spin of the
/// same species ends unrotated. Requires exactly two spins of the species,
/// one of them on carrier (offset 0), the target off carrier. Exact at
/// J = 0; with couplings on, the delays leak a small zz error.
PulseSchedule tce_selective(const Molecule& m, int target, double phase,
                            double angle);

/// Unitary of a schedule; rejects Gradient events.
cmatrix simulate_schedule(const PulseSchedule& schedule);

/// Density-matrix simulation; Gradient events become dephasing channels.
DensityState simulate_schedule(const PulseSchedule& schedule,
                               const DensityState& initial);

}  // namespace qwalk::nmr
