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

#include <functional>
#include <vector>

// Derivative-free minimization for the pulse compiler: smooth, cheap,
// low-dimensional objectives (gate infidelities over delays and phases).

namespace qwalk {

struct OptimOptions {
  double ftol = 1e-12;      // stop when the simplex f-spread falls below this
  double xtol = 1e-10;      // ... or the simplex diameter does
  int max_evals = 10000;
  int restarts = 2;         // rebuild the simplex around the incumbent
  // Parabolic per-coordinate polish sweeps after the simplex converges;
  // tightens smooth minima well past simplex stagnation.
  int polish_sweeps = 3;
};

struct OptimResult {
  std::vector<double> x;
  double fval = 0.0;
  int evals = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead simplex with restarts and parabolic polish. `step` gives the
/// initial simplex extent per coordinate (one value broadcast if size 1).
OptimResult nelder_mead(const Objective& f, std::vector<double> x0,
                        std::vector<double> step,
                        const OptimOptions& opts = {});

}  // namespace qwalk
