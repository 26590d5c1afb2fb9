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

#include "qwalk/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace qwalk {

namespace {

const complex_t kI(0.0, 1.0);

// Quadrature resolution for the collective ensemble average; validated
// against the analytic single-spin sinc form to 1e-8 in the tests.
constexpr int kQuadraturePoints = 10001;

double sinc(double x) {
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// Gamma-weighted Z eigenvalue of a basis state.
double weight_of_basis(int b, const std::vector<double>& gamma) {
  const int n = static_cast<int>(gamma.size());
  double w = 0.0;
  for (int spin = 0; spin < n; ++spin) {
    const int bit = (b >> (n - 1 - spin)) & 1;
    w += gamma[spin] * (bit == 0 ? 1.0 : -1.0);
  }
  return w;
}

}  // namespace

double GradientParams::x(int spin) const {
  if (spin < 0 || spin >= static_cast<int>(gamma_per_spin.size())) {
    throw std::invalid_argument("GradientParams: spin index out of range");
  }
  return alpha_prime * gamma_per_spin[spin] * t * a;
}

void GradientParams::validate(int num_spins) const {
  if (t < 0.0) {
    throw std::invalid_argument("GradientParams: negative duration");
  }
  if (!(a > 0.0)) {
    throw std::invalid_argument("GradientParams: sample half-length must be > 0");
  }
  if (static_cast<int>(gamma_per_spin.size()) != num_spins) {
    throw std::invalid_argument(
        "GradientParams: gamma list does not match the register");
  }
}

DephasingStrength::DephasingStrength(double p_in) : p(p_in) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("DephasingStrength: p must lie in [0, 1]");
  }
}

DephasingStrength dephasing_probability(const GradientParams& params,
                                        int spin) {
  const double x = params.x(spin);
  return DephasingStrength(0.5 * (1.0 - sinc(x)));
}

DensityState z_dephase(const DensityState& state, int spin,
                       DephasingStrength p) {
  const int n = state.num_spins();
  if (spin < 0 || spin >= n) {
    throw std::invalid_argument("z_dephase: spin index out of range");
  }
  const std::vector<cmatrix> kraus = {
      std::sqrt(1.0 - p.p) * identity(n),
      std::sqrt(p.p) * embed1(pauli1('Z'), spin, n)};
  return apply_kraus(state, kraus);
}

DensityState gradient_pulse(const DensityState& state,
                            const GradientParams& params, GradientMode mode) {
  const int n = state.num_spins();
  params.validate(n);

  if (mode == GradientMode::Independent) {
    DensityState out = state;
    for (int spin = 0; spin < n; ++spin) {
      out = z_dephase(out, spin, dephasing_probability(params, spin));
    }
    return out;
  }

  // Collective: every spin sees the same field offset z. U(z) is diagonal,
  // so the ensemble average acts entrywise; accumulate the phase outer
  // product over the midpoint quadrature grid.
  const Eigen::Index d = state.dim();
  Eigen::VectorXd w(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    w(b) = weight_of_basis(static_cast<int>(b), params.gamma_per_spin);
  }
  cmatrix avg = cmatrix::Zero(d, d);
  cvector phase(d);
  for (int q = 0; q < kQuadraturePoints; ++q) {
    const double z =
        -params.a + 2.0 * params.a * (q + 0.5) / kQuadraturePoints;
    for (Eigen::Index b = 0; b < d; ++b) {
      phase(b) = std::exp(-kI * (params.alpha_prime * params.t * z * w(b) / 2.0));
    }
    avg += phase * phase.adjoint();
  }
  avg /= static_cast<double>(kQuadraturePoints);
  const cmatrix out = state.matrix().cwiseProduct(avg);
  return state.with_matrix((out + out.adjoint()) / 2.0);
}

DensityState protected_gradient(const DensityState& state,
                                const std::vector<int>& protected_spins,
                                const GradientParams& params) {
  const int n = state.num_spins();
  params.validate(n);
  std::vector<bool> is_protected(n, false);
  for (int spin : protected_spins) {
    if (spin < 0 || spin >= n) {
      throw std::invalid_argument("protected_gradient: spin index out of range");
    }
    is_protected[spin] = true;
  }

  // The echo refocuses the rotated spins exactly, so only the unprotected
  // ones keep their dephasing, accumulated once per gradient.
  DensityState out = state;
  for (int pass = 0; pass < 2; ++pass) {
    for (int spin = 0; spin < n; ++spin) {
      if (!is_protected[spin]) {
        out = z_dephase(out, spin, dephasing_probability(params, spin));
      }
    }
  }
  cmatrix flip = identity(n);
  for (int spin = 0; spin < n; ++spin) {
    if (is_protected[spin]) {
      flip = embed1(rotation_xy(0.0, kPi), spin, n) * flip;
    }
  }
  return conjugate(out, flip);
}

DensityState labeled_pps() {
  const cmatrix p0 = (pauli1('I') + pauli1('Z')) / 2.0;
  const cmatrix rho = kron(pauli1('Z'), kron(p0, kron(p0, p0)));
  return DensityState::deviation(rho);
}

DensityState temporal_average(const std::vector<DensityState>& results) {
  if (results.size() != 3) {
    throw std::invalid_argument("temporal_average: expected three experiments");
  }
  cmatrix sum = cmatrix::Zero(8, 8);
  for (const DensityState& state : results) {
    if (state.dim() != 8 || state.kind() != StateKind::Deviation) {
      throw std::invalid_argument(
          "temporal_average: inputs must be 3-spin deviation states");
    }
    sum += state.matrix();
  }
  return DensityState::deviation(sum);
}

}  // namespace qwalk
