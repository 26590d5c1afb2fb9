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

#include <vector>

#include "qwalk/qops.hpp"

// Engineered decoherence via pulsed field gradients, plus the pseudo-pure
// preparations that feed the NMR experiments.

namespace qwalk {

// One gradient pulse: a spin at height z picks up the z-rotation
// alpha_prime * gamma_i * t * z; averaging z over the sample [-a, a]
// dephases transverse coherence.
struct GradientParams {
  double alpha_prime = 0.0;          // gradient strength (rad/s/T scale)
  double t = 0.0;                    // duration (s), >= 0
  double a = 0.0;                    // sample half-length (m), > 0
  std::vector<double> gamma_per_spin;  // gyromagnetic ratio per spin

  /// Dimensionless dephasing argument x_i = alpha_prime*gamma_i*t*a.
  double x(int spin) const;

  void validate(int num_spins) const;
};

// Single-spin z-dephasing weight, p in [0, 1]. The gradient closed form
// p = (1 - sinc(x))/2 lands in [0, (1 + 0.2173)/2]; values above 1/2 mean
// the transverse scale factor 1-2p has inverted sign and are kept as-is
// rather than clamped, since the Kraus pair stays valid up to p = 1.
struct DephasingStrength {
  double p = 0.0;

  explicit DephasingStrength(double p);
};

enum class GradientMode { Independent, Collective };

/// p_i = (1 - sin(x_i)/x_i)/2 for one gradient pulse, with the x -> 0
/// limit handled by series.
DephasingStrength dephasing_probability(const GradientParams& params,
                                        int spin);

/// Kraus channel {sqrt(1-p)*1, sqrt(p)*Z_spin}: coefficients of Pauli terms
/// transverse on `spin` scale by 1-2p, all others are untouched.
DensityState z_dephase(const DensityState& state, int spin,
                       DephasingStrength p);

/// Ensemble average over the sample. Independent mode dephases each spin
/// with its own p_i as if the gradients were uncorrelated; collective mode
/// averages the joint phase exp(-i*alpha_prime*t*z*sum_i gamma_i Z_i / 2)
/// over z by midpoint quadrature, preserving zero-quantum coherence.
DensityState gradient_pulse(const DensityState& state,
                            const GradientParams& params, GradientMode mode);

/// Gradient, pi x-rotation on `protected_spins`, identical gradient.
/// Protected spins keep their coherence (the echo refocuses them) and end
/// up pi-rotated; unprotected spins dephase twice (independent model).
DensityState protected_gradient(const DensityState& state,
                                const std::vector<int>& protected_spins,
                                const GradientParams& params);

/// Labeled pseudo-pure deviation Z (x) |000><000| on four spins; spin 0 is
/// the label.
DensityState labeled_pps();

/// Entrywise sum of exactly three 3-spin deviation states.
DensityState temporal_average(const std::vector<DensityState>& results);

}  // namespace qwalk
