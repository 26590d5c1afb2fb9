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

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "qwalk/spinsys.hpp"

// Gate-level circuits and their compilation to pulse schedules: refocused
// coupling blocks, z-rotations tracked in software as reference-frame
// bookkeeping, and consecutive single-spin rotations merged.

namespace qwalk::nmr {

struct Gate {
  enum class Kind { RotationXY, RotationZ, ZZ };

  Kind kind = Kind::RotationXY;
  int spin = 0;
  int spin2 = 0;      // ZZ only
  double phase = 0.0;  // RotationXY only
  double angle = 0.0;

  static Gate rotation_xy(int spin, double phase, double angle);
  static Gate rotation_z(int spin, double angle);
  static Gate zz(int i, int j, double angle);  // exp(-i*angle/2 * Z_i Z_j)
};

using GateList = std::vector<Gate>;

cmatrix gate_unitary(const Gate& g, int num_spins);
cmatrix gate_list_unitary(const GateList& gates, int num_spins);

/// |Tr(u_ideal^dag u_sim)| / 2^n.
double gate_fidelity(const cmatrix& u_ideal, const cmatrix& u_sim);

/// Delay/pi-pulse schedule that realizes exp(-i*angle/2 * Z_i Z_j) on each
/// target pair simultaneously while refocusing every other coupling and all
/// chemical shifts (frame_z corrections included). Exact under the ising
/// model. Rejects uncoupled target pairs; throws std::runtime_error when no
/// sign assignment refocuses the requested combination.
PulseSchedule zz_gate(const Molecule& m,
                      const std::vector<std::tuple<int, int, double>>& targets);
PulseSchedule zz_gate(const Molecule& m, int i, int j, double angle);

// Fit of a simulated unitary against an ideal one, as per-spin z-rotations
// and per-pair zz errors sandwiching the ideal gate:
//   u_sim ~ Z(post) * u_ideal * Z(pre) * ZZ(zz_error)
// residual_infidelity is 1 - fidelity after the fit; it is the coherent
// error that frame and refocusing corrections cannot absorb.
struct ErrorDecomposition {
  std::vector<double> pre_z;
  std::vector<double> post_z;
  std::map<std::pair<int, int>, double> zz_error;
  double residual_infidelity = 0.0;
};

ErrorDecomposition error_decompose(const cmatrix& u_sim,
                                   const cmatrix& u_ideal);

/// 1 - residual infidelity of a calibrated Gaussian `soft_pulse` against the
/// ideal selective rotation, i.e. the fidelity after absorbable z and zz
/// errors are credited to the surrounding schedule.
double selective_fidelity(const Molecule& m, int target, double phase,
                          double angle, double duration, int samples = 128);

enum class PulseMode { Ideal, Soft };

struct CompileOptions {
  PulseMode mode = PulseMode::Ideal;
  /// Shaped-pulse duration per spin (seconds); required in soft mode.
  std::vector<double> soft_duration_s;
  int soft_samples = 128;
  /// Joint simplex refinement of delays, pulse phases and frame angles
  /// after heuristic compilation (soft mode only).
  bool refine = true;
};

struct CompileResult {
  PulseSchedule schedule;
  double gate_fidelity = 0.0;  // vs the ideal gate-list unitary
};

/// Compiles a gate list to a pulse schedule for `m`. Z-rotations cost no
/// pulses (they retard the reference frame); consecutive single-spin
/// rotations merge into at most one transverse pulse; runs of ZZ gates
/// become one refocused coupling block.
CompileResult compile(const GateList& gates, const Molecule& m,
                      const CompileOptions& opts = {});

}  // namespace qwalk::nmr
