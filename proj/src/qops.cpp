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

#include "qwalk/qops.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qwalk {

namespace {

const complex_t kI(0.0, 1.0);

bool is_power_of_two(Eigen::Index x) { return x > 0 && (x & (x - 1)) == 0; }

}  // namespace

int spin_count(const cmatrix& m) {
  if (m.rows() != m.cols() || !is_power_of_two(m.rows()) || m.rows() < 2) {
    throw std::invalid_argument("spin_count: matrix is not a spin register");
  }
  int n = 0;
  for (Eigen::Index d = m.rows(); d > 1; d >>= 1) ++n;
  if (n > kMaxSpins) {
    throw std::invalid_argument("spin_count: more than four spins");
  }
  return n;
}

cmatrix kron(const cmatrix& a, const cmatrix& b) {
  cmatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

cmatrix identity(int num_spins) {
  if (num_spins < 1 || num_spins > kMaxSpins) {
    throw std::invalid_argument("identity: spin count out of range");
  }
  return cmatrix::Identity(1 << num_spins, 1 << num_spins);
}

const cmatrix& pauli1(char letter) {
  static const cmatrix i2 = cmatrix::Identity(2, 2);
  static const cmatrix x = (cmatrix(2, 2) << 0, 1, 1, 0).finished();
  static const cmatrix y = (cmatrix(2, 2) << 0, -kI, kI, 0).finished();
  static const cmatrix z = (cmatrix(2, 2) << 1, 0, 0, -1).finished();
  switch (letter) {
    case 'I': return i2;
    case 'X': return x;
    case 'Y': return y;
    case 'Z': return z;
    default:
      throw std::invalid_argument(std::string("pauli1: invalid letter '") +
                                  letter + "'");
  }
}

cmatrix pauli(std::string_view label) {
  if (label.empty() || label.size() > static_cast<size_t>(kMaxSpins)) {
    throw std::invalid_argument("pauli: label length must be 1..4");
  }
  cmatrix out = pauli1(label[0]);
  for (size_t k = 1; k < label.size(); ++k) out = kron(out, pauli1(label[k]));
  return out;
}

std::vector<std::string> pauli_labels(int num_spins) {
  if (num_spins < 1 || num_spins > kMaxSpins) {
    throw std::invalid_argument("pauli_labels: spin count out of range");
  }
  static const char letters[] = {'I', 'X', 'Y', 'Z'};
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(1) << (2 * num_spins));
  std::string label(num_spins, 'I');
  const int total = 1 << (2 * num_spins);
  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int s = num_spins - 1; s >= 0; --s) {
      label[s] = letters[c & 3];
      c >>= 2;
    }
    out.push_back(label);
  }
  return out;
}

cmatrix rotation_z(double theta) {
  cmatrix out = cmatrix::Zero(2, 2);
  out(0, 0) = std::exp(-kI * (theta / 2));
  out(1, 1) = std::exp(kI * (theta / 2));
  return out;
}

cmatrix rotation_xy(double phase, double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  cmatrix out(2, 2);
  out(0, 0) = c;
  out(0, 1) = -kI * s * std::exp(-kI * phase);
  out(1, 0) = -kI * s * std::exp(kI * phase);
  out(1, 1) = c;
  return out;
}

cmatrix rotation_axis(char axis, double theta) {
  switch (std::tolower(static_cast<unsigned char>(axis))) {
    case 'x': return rotation_xy(0.0, theta);
    case 'y': return rotation_xy(kPi / 2, theta);
    case 'z': return rotation_z(theta);
    default:
      throw std::invalid_argument(std::string("rotation_axis: invalid axis '") +
                                  axis + "'");
  }
}

cmatrix embed1(const cmatrix& u, int spin, int num_spins) {
  if (u.rows() != 2 || u.cols() != 2) {
    throw std::invalid_argument("embed1: operator must be 2x2");
  }
  if (spin < 0 || spin >= num_spins) {
    throw std::invalid_argument("embed1: spin index out of range");
  }
  cmatrix out = (spin == 0) ? u : cmatrix::Identity(1 << spin, 1 << spin);
  if (spin > 0) out = kron(out, u);
  const int rest = num_spins - spin - 1;
  if (rest > 0) out = kron(out, cmatrix::Identity(1 << rest, 1 << rest));
  return out;
}

cmatrix expm_hermitian(const cmatrix& h, double t) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (!is_hermitian(h, 1e-12 * scale)) {
    throw std::invalid_argument("expm_hermitian: generator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<cmatrix> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  cvector phases(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    phases(k) = std::exp(-kI * (ev(k) * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

bool is_unitary(const cmatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - cmatrix::Identity(m.rows(), m.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

bool is_hermitian(const cmatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

cmatrix traceless_part(const cmatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("traceless_part: matrix not square");
  }
  return m - (m.trace() / static_cast<double>(m.rows())) *
                 cmatrix::Identity(m.rows(), m.cols());
}

DensityState::DensityState(cmatrix rho, StateKind kind)
    : rho_(std::move(rho)), kind_(kind) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 2) {
    throw std::invalid_argument("DensityState: matrix not square");
  }
  spin_count(rho_);  // power-of-two dimension, at most four spins
  if (!rho_.allFinite()) {
    throw std::invalid_argument("DensityState: non-finite entries");
  }
  if (!is_hermitian(rho_, kHermitianTol)) {
    throw std::invalid_argument("DensityState: matrix not Hermitian");
  }
  if (kind_ == StateKind::Normalized) {
    if (std::abs(rho_.trace().real() - 1.0) > kHermitianTol) {
      throw std::invalid_argument("DensityState: trace != 1");
    }
    Eigen::SelfAdjointEigenSolver<cmatrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("DensityState: negative eigenvalue");
    }
  }
}

DensityState DensityState::normalized(const cmatrix& rho) {
  return DensityState(rho, StateKind::Normalized);
}

DensityState DensityState::deviation(const cmatrix& rho) {
  return DensityState(rho, StateKind::Deviation);
}

DensityState DensityState::with_matrix(const cmatrix& rho) const {
  return DensityState(rho, kind_);
}

int DensityState::num_spins() const { return spin_count(rho_); }

DensityState conjugate(const DensityState& state, const cmatrix& u) {
  if (u.rows() != state.dim() || u.cols() != state.dim()) {
    throw std::invalid_argument("conjugate: dimension mismatch");
  }
  if (!is_unitary(u)) {
    throw std::invalid_argument("conjugate: operator is not unitary");
  }
  return state.with_matrix(u * state.matrix() * u.adjoint());
}

DensityState apply_kraus(const DensityState& state,
                         const std::vector<cmatrix>& kraus) {
  if (kraus.empty()) {
    throw std::invalid_argument("apply_kraus: empty operator set");
  }
  const Eigen::Index d = state.dim();
  cmatrix sum = cmatrix::Zero(d, d);
  for (const cmatrix& k : kraus) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("apply_kraus: dimension mismatch");
    }
    sum += k.adjoint() * k;
  }
  if ((sum - cmatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kUnitaryTol) {
    throw std::invalid_argument("apply_kraus: operators are not complete");
  }
  cmatrix out = cmatrix::Zero(d, d);
  for (const cmatrix& k : kraus) out += k * state.matrix() * k.adjoint();
  return state.with_matrix(out);
}

PauliVector pauli_decompose(const DensityState& state) {
  const int n = state.num_spins();
  PauliVector pv;
  pv.num_spins = n;
  const double dim = static_cast<double>(state.dim());
  for (const std::string& label : pauli_labels(n)) {
    pv.coeffs[label] = (pauli(label) * state.matrix()).trace().real() / dim;
  }
  return pv;
}

cmatrix pauli_reconstruct(const PauliVector& pv) {
  if (pv.num_spins < 1 || pv.num_spins > kMaxSpins) {
    throw std::invalid_argument("pauli_reconstruct: spin count out of range");
  }
  const Eigen::Index d = 1 << pv.num_spins;
  cmatrix out = cmatrix::Zero(d, d);
  for (const auto& [label, c] : pv.coeffs) {
    if (static_cast<int>(label.size()) != pv.num_spins) {
      throw std::invalid_argument("pauli_reconstruct: label length mismatch");
    }
    if (c != 0.0) out += c * pauli(label);
  }
  return out;
}

// For unitary u, v the distance reduces to the eigenphases of w = v'u:
// ||u - e^{i*phi}*v|| = max_k |lambda_k(w) - e^{i*phi}|, so the optimal phi
// is the midpoint of the smallest arc enclosing the eigenphases.
double phase_distance(const cmatrix& u, const cmatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    throw std::invalid_argument("phase_distance: dimension mismatch");
  }
  const cmatrix w = v.adjoint() * u;
  Eigen::ComplexEigenSolver<cmatrix> es(w);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("phase_distance: eigensolver failed");
  }
  const cvector& lam = es.eigenvalues();

  std::vector<double> th(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) th[k] = std::arg(lam(k));
  std::sort(th.begin(), th.end());

  // Largest circular gap between consecutive eigenphases.
  size_t gap_after = th.size() - 1;
  double max_gap = th.front() + 2 * kPi - th.back();
  for (size_t k = 0; k + 1 < th.size(); ++k) {
    const double gap = th[k + 1] - th[k];
    if (gap > max_gap) {
      max_gap = gap;
      gap_after = k;
    }
  }
  const double arc_start = (gap_after == th.size() - 1)
                               ? th.front()
                               : th[gap_after + 1] - 2 * kPi;
  const double phi = arc_start + (2 * kPi - max_gap) / 2;

  const complex_t target = std::exp(kI * phi);
  double dist = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    dist = std::max(dist, std::abs(lam(k) - target));
  }
  return dist;
}

}  // namespace qwalk
