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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwalk/qops.hpp"

// Simulated state tomography: readout pulses rotate density-matrix terms
// into single coherences (exactly one transverse Pauli letter), which are
// the directly observable family; a least-squares solve over a complete
// readout set recovers the Pauli coefficients.

namespace qwalk::tomo {

enum class ReadoutAction { None, X90, Y90 };

// Per-spin readout rotation pattern, written as a label like "yII": the
// uppercase letter I means no pulse, lowercase x or y a pi/2 rotation about
// that axis.
struct ReadoutPulse {
  std::vector<ReadoutAction> actions;

  static ReadoutPulse from_label(std::string_view label);
  std::string label() const;
  int num_spins() const { return static_cast<int>(actions.size()); }

  /// Tensor product of the per-spin readout rotations.
  cmatrix unitary() const;

  void validate() const;
};

/// The seven-pulse readout set yII, IIy, IIx, yyI, Ixx, yyy, xxx that
/// determines every traceless Pauli coefficient of a 3-spin state.
std::vector<ReadoutPulse> seven_pulse_set();

/// The same seven patterns prefixed with I on a leading label spin, for
/// the 4-spin labeled register (label spin never pulsed).
std::vector<ReadoutPulse> labeled_seven_pulse_set();

/// Expectations Tr(P*rho) keyed by Pauli label, restricted to
/// single-coherence labels.
using ObservableSet = std::map<std::string, double>;

/// True when the label has exactly one X or Y letter and I or Z elsewhere.
bool is_single_coherence(std::string_view label);

/// All single-coherence labels of a register, in pauli_labels order
/// (n * 2^n labels).
std::vector<std::string> single_coherence_labels(int num_spins);

/// Rotates the state by the readout unitary and reads Tr(P*rho') for every
/// single-coherence label P.
ObservableSet observe(const DensityState& state, const ReadoutPulse& r);

using Measurement = std::pair<ReadoutPulse, ObservableSet>;

// Ansatz for reconstruction. `support` is the label set the state is
// assumed to live in (default: every traceless label); `pinned` holds
// coefficients fixed a priori instead of solved for, as raw Tr(Q*rho)
// values. Pinned labels must lie inside the support.
struct ReconstructionOptions {
  std::vector<std::string> support;
  std::map<std::string, double> pinned;
};

/// Labels with I or Z on the leading label spin, identity excluded: the
/// support reachable from a labeled pseudo-pure state under gates and
/// dephasing on the remaining spins.
std::vector<std::string> label_diagonal_support(int num_spins);

struct CompletenessReport {
  bool complete = false;
  int rank = 0;
  int dimension = 0;
  std::vector<std::string> missing;
};

/// Rank of the linear map from the (non-pinned) support coefficients to the
/// stacked single-coherence observables of the readout set. Complete when
/// the rank equals the support dimension; `missing` names undetermined
/// directions.
CompletenessReport readout_set_complete(const std::vector<ReadoutPulse>& set,
                                        int num_spins,
                                        const ReconstructionOptions& opts = {});

/// Least-squares recovery of the deviation state from observed
/// expectations; duplicate determinations average uniformly. Requires a
/// complete readout set for the ansatz.
DensityState reconstruct(const std::vector<Measurement>& measurements,
                         const ReconstructionOptions& opts = {});

/// Ensemble overlap Tr(a*b)/sqrt(Tr(a^2)*Tr(b^2)) on the raw matrices.
/// Rejects zero-purity inputs.
double fidelity(const DensityState& a, const DensityState& b);

std::string to_json(const std::vector<Measurement>& measurements);
std::vector<Measurement> measurements_from_json(const std::string& text);

}  // namespace qwalk::tomo
