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

#include <array>
#include <functional>
#include <vector>

#include "qwalk/qops.hpp"

// Coined discrete-time walk on a cycle, specialised to the square.
//
// Square register: spin 0 is the coin (|0> = heads), spins 1-2 are the
// position bits (q2, q3). Corners are Gray-coded so that flipping q2 is a
// horizontal move and flipping q3 a vertical move:
//   corner 0 = (0,0), corner 1 = (1,0), corner 2 = (1,1), corner 3 = (0,1).

namespace qwalk {

enum class WalkEncoding { CycleRegister, SquareTwoQubit };

struct WalkSpec {
  int n_nodes = 4;
  cmatrix coin;  // 2x2 unitary
  WalkEncoding encoding = WalkEncoding::SquareTwoQubit;

  static WalkSpec square();                    // Hadamard coin
  static WalkSpec square(const cmatrix& coin);
  static WalkSpec cycle(int n_nodes, const cmatrix& coin);

  void validate() const;
};

/// The Hadamard coin (|H> -> (|H>+|T>)/sqrt(2)).
cmatrix hadamard_coin();

struct CornerDistribution {
  std::array<double, 4> p{};

  double operator[](int corner) const { return p.at(corner); }
  double sum() const { return p[0] + p[1] + p[2] + p[3]; }
};

/// Computational-basis position index (bits q2,q3) of a Gray-coded corner.
int corner_position_index(int corner);

/// Coin-conditional shift on an n-node cycle (dimension 2n): heads moves
/// i -> i-1 (mod n), tails i -> i+1 (mod n).
cmatrix cycle_shift(int n_nodes);

/// Square shift P_H (x) X_q2 + P_T (x) X_q3 on the 3-spin register.
cmatrix square_shift();

/// One walk step: shift composed with the coin toss on the coin spin.
cmatrix walk_step(const WalkSpec& spec);

/// p_c = Tr[(1_coin (x) |c><c|) rho] for each Gray-coded corner.
CornerDistribution corner_probabilities(const DensityState& state);

using StepChannel = std::function<DensityState(const DensityState&)>;

/// States after 0..steps applications of (channel o unitary step). The
/// channel, when provided, must preserve the trace to 1e-10.
std::vector<DensityState> run_quantum_walk(const WalkSpec& spec, int steps,
                                           const DensityState& initial,
                                           const StepChannel& channel = {});

/// Exact classical counterpart: fair-coin re-flip then conditional move,
/// evolved as an 8-state Markov chain and marginalised to corners.
std::vector<CornerDistribution> classical_walk(int steps, int start_corner);

}  // namespace qwalk
