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

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Dense operator algebra for small spin registers (at most four spins,
// 16x16 matrices). Conventions used throughout the project:
//
//  * spin 0 is the leftmost tensor factor and the most significant bit of
//    a computational-basis index;
//  * rotations follow R_a(theta) = exp(-i*theta*sigma_a/2), and a pulse of
//    transverse phase phi rotates about cos(phi)*X + sin(phi)*Y;
//  * |0> is the +1 eigenstate of Z (coin "heads").

namespace qwalk {

using complex_t = std::complex<double>;
using cmatrix = Eigen::MatrixXcd;
using cvector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxSpins = 4;

// Tolerances shared by validation code and tests.
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEqTol = 1e-12;

/// Number of spins for a square power-of-two matrix; throws otherwise.
int spin_count(const cmatrix& m);

cmatrix kron(const cmatrix& a, const cmatrix& b);
cmatrix identity(int num_spins);

/// Single-spin Pauli matrix for 'I', 'X', 'Y' or 'Z'.
const cmatrix& pauli1(char letter);

/// Tensor product of single-spin Paulis, e.g. "ZXI". Label length is the
/// spin count (1..4); leftmost letter acts on spin 0.
cmatrix pauli(std::string_view label);

/// All Pauli labels of a given length, in lexicographic I<X<Y<Z order.
std::vector<std::string> pauli_labels(int num_spins);

cmatrix rotation_z(double theta);
/// Rotation by `theta` about the transverse axis at angle `phase` from +x.
cmatrix rotation_xy(double phase, double theta);
cmatrix rotation_axis(char axis, double theta);

/// Single-spin operator embedded into an n-spin register.
cmatrix embed1(const cmatrix& u, int spin, int num_spins);

/// exp(-i*h*t) for Hermitian h, via its eigendecomposition.
cmatrix expm_hermitian(const cmatrix& h, double t = 1.0);

bool is_unitary(const cmatrix& m, double tol = kUnitaryTol);
bool is_hermitian(const cmatrix& m, double tol = kHermitianTol);

cmatrix traceless_part(const cmatrix& m);

enum class StateKind { Normalized, Deviation };

// Hermitian state container. Normalized states additionally satisfy
// trace == 1 and eigenvalues >= -1e-10; deviation states (NMR observable
// parts) carry no trace or positivity constraint.
class DensityState {
 public:
  static DensityState normalized(const cmatrix& rho);
  static DensityState deviation(const cmatrix& rho);

  const cmatrix& matrix() const { return rho_; }
  StateKind kind() const { return kind_; }
  Eigen::Index dim() const { return rho_.rows(); }
  int num_spins() const;
  double trace() const { return rho_.trace().real(); }

  /// Same-kind state with a replacement matrix, revalidated.
  DensityState with_matrix(const cmatrix& rho) const;

 private:
  DensityState(cmatrix rho, StateKind kind);

  cmatrix rho_;
  StateKind kind_;
};

/// Real Pauli coefficients c_P = Tr(P*rho)/2^n, keyed by label. Carries
/// every label of the register, including zeros.
struct PauliVector {
  int num_spins = 0;
  std::map<std::string, double> coeffs;
};

/// u*rho*u' for unitary u (checked to kUnitaryTol).
DensityState conjugate(const DensityState& state, const cmatrix& u);

/// Applies a Kraus channel; the set must satisfy sum K'K = 1 to kUnitaryTol.
DensityState apply_kraus(const DensityState& state,
                         const std::vector<cmatrix>& kraus);

PauliVector pauli_decompose(const DensityState& state);
cmatrix pauli_reconstruct(const PauliVector& pv);

/// min over global phase phi of the operator 2-norm ||u - e^{i*phi}*v||,
/// for unitaries of equal dimension. Zero iff equal up to phase.
double phase_distance(const cmatrix& u, const cmatrix& v);

}  // namespace qwalk
