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

#include "qwalk/walk.hpp"

#include <cmath>
#include <stdexcept>

namespace qwalk {

cmatrix hadamard_coin() {
  cmatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

WalkSpec WalkSpec::square() { return square(hadamard_coin()); }

WalkSpec WalkSpec::square(const cmatrix& coin) {
  WalkSpec spec;
  spec.n_nodes = 4;
  spec.coin = coin;
  spec.encoding = WalkEncoding::SquareTwoQubit;
  spec.validate();
  return spec;
}

WalkSpec WalkSpec::cycle(int n_nodes, const cmatrix& coin) {
  WalkSpec spec;
  spec.n_nodes = n_nodes;
  spec.coin = coin;
  spec.encoding = WalkEncoding::CycleRegister;
  spec.validate();
  return spec;
}

void WalkSpec::validate() const {
  if (n_nodes < 2) {
    throw std::invalid_argument("WalkSpec: need at least 2 nodes");
  }
  if (encoding == WalkEncoding::SquareTwoQubit && n_nodes != 4) {
    throw std::invalid_argument("WalkSpec: square encoding requires 4 nodes");
  }
  if (coin.rows() != 2 || coin.cols() != 2 || !is_unitary(coin)) {
    throw std::invalid_argument("WalkSpec: coin must be a 2x2 unitary");
  }
}

int corner_position_index(int corner) {
  // Gray code: corner -> (q2,q3) bits -> index q2*2 + q3.
  static constexpr int kIndex[4] = {0, 2, 3, 1};
  if (corner < 0 || corner > 3) {
    throw std::invalid_argument("corner_position_index: corner out of range");
  }
  return kIndex[corner];
}

cmatrix cycle_shift(int n_nodes) {
  if (n_nodes < 2) {
    throw std::invalid_argument("cycle_shift: need at least 2 nodes");
  }
  const int dim = 2 * n_nodes;
  cmatrix s = cmatrix::Zero(dim, dim);
  for (int i = 0; i < n_nodes; ++i) {
    const int down = (i + n_nodes - 1) % n_nodes;
    const int up = (i + 1) % n_nodes;
    s(down, i) = 1.0;                        // heads block
    s(n_nodes + up, n_nodes + i) = 1.0;      // tails block
  }
  return s;
}

cmatrix square_shift() {
  const cmatrix ph = (cmatrix(2, 2) << 1, 0, 0, 0).finished();
  const cmatrix pt = (cmatrix(2, 2) << 0, 0, 0, 1).finished();
  const cmatrix& x = pauli1('X');
  const cmatrix& i2 = pauli1('I');
  return kron(ph, kron(x, i2)) + kron(pt, kron(i2, x));
}

cmatrix walk_step(const WalkSpec& spec) {
  spec.validate();
  if (spec.encoding == WalkEncoding::SquareTwoQubit) {
    return square_shift() * kron(spec.coin, cmatrix::Identity(4, 4));
  }
  return cycle_shift(spec.n_nodes) *
         kron(spec.coin, cmatrix::Identity(spec.n_nodes, spec.n_nodes));
}

CornerDistribution corner_probabilities(const DensityState& state) {
  if (state.dim() != 8) {
    throw std::invalid_argument(
        "corner_probabilities: state is not a 3-spin square register");
  }
  CornerDistribution dist;
  for (int corner = 0; corner < 4; ++corner) {
    const int pos = corner_position_index(corner);
    dist.p[corner] = state.matrix()(pos, pos).real() +
                     state.matrix()(4 + pos, 4 + pos).real();
  }
  if (state.kind() == StateKind::Normalized) {
    for (double v : dist.p) {
      if (v < -1e-10 || v > 1.0 + 1e-10) {
        throw std::runtime_error("corner_probabilities: value out of range");
      }
    }
    if (std::abs(dist.sum() - 1.0) > 1e-10) {
      throw std::runtime_error("corner_probabilities: probabilities do not sum to 1");
    }
  }
  return dist;
}

std::vector<DensityState> run_quantum_walk(const WalkSpec& spec, int steps,
                                           const DensityState& initial,
                                           const StepChannel& channel) {
  if (steps < 0) {
    throw std::invalid_argument("run_quantum_walk: negative step count");
  }
  const cmatrix w = walk_step(spec);
  if (initial.dim() != w.rows()) {
    throw std::invalid_argument("run_quantum_walk: state/register mismatch");
  }
  std::vector<DensityState> out;
  out.reserve(steps + 1);
  out.push_back(initial);
  for (int k = 0; k < steps; ++k) {
    DensityState next = conjugate(out.back(), w);
    if (channel) {
      const double trace_in = next.trace();
      next = channel(next);
      if (std::abs(next.trace() - trace_in) > 1e-10) {
        throw std::invalid_argument(
            "run_quantum_walk: channel is not trace-preserving");
      }
    }
    out.push_back(next);
  }
  return out;
}

std::vector<CornerDistribution> classical_walk(int steps, int start_corner) {
  if (steps < 0) {
    throw std::invalid_argument("classical_walk: negative step count");
  }
  if (start_corner < 0 || start_corner > 3) {
    throw std::invalid_argument("classical_walk: corner out of range");
  }

  // 8 states: coin (H=0,T=1) x position index. One step re-flips the coin
  // fairly, then moves along the edge selected by the new coin.
  Eigen::Matrix<double, 8, 8> m = Eigen::Matrix<double, 8, 8>::Zero();
  for (int coin = 0; coin < 2; ++coin) {
    for (int pos = 0; pos < 4; ++pos) {
      const int from = coin * 4 + pos;
      const int horiz = pos ^ 2;  // flip q2
      const int vert = pos ^ 1;   // flip q3
      m(0 * 4 + horiz, from) += 0.5;
      m(1 * 4 + vert, from) += 0.5;
    }
  }

  Eigen::Matrix<double, 8, 1> v = Eigen::Matrix<double, 8, 1>::Zero();
  v(corner_position_index(start_corner)) = 1.0;  // coin heads, given corner

  std::vector<CornerDistribution> out;
  out.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) v = m * v;
    CornerDistribution dist;
    for (int corner = 0; corner < 4; ++corner) {
      const int pos = corner_position_index(corner);
      dist.p[corner] = v(pos) + v(4 + pos);
    }
    out.push_back(dist);
  }
  return out;
}

}  // namespace qwalk
