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

#include "qwalk/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qwalk {

namespace {

struct Vertex {
  std::vector<double> x;
  double f = 0.0;
};

double diameter(const std::vector<Vertex>& simplex) {
  double d = 0.0;
  const auto& base = simplex.front().x;
  for (std::size_t v = 1; v < simplex.size(); ++v)
    for (std::size_t i = 0; i < base.size(); ++i)
      d = std::max(d, std::abs(simplex[v].x[i] - base[i]));
  return d;
}

// One simplex run from `x0` with per-coordinate extent `step`.
Vertex simplex_run(const Objective& f, const std::vector<double>& x0,
                   const std::vector<double>& step, const OptimOptions& opts,
                   int& evals) {
  const std::size_t n = x0.size();
  std::vector<Vertex> s(n + 1);
  s[0] = {x0, f(x0)};
  ++evals;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = x0;
    x[i] += step[i];
    s[i + 1] = {x, f(x)};
    ++evals;
  }

  while (evals < opts.max_evals) {
    std::sort(s.begin(), s.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (s.back().f - s.front().f < opts.ftol && diameter(s) < opts.xtol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s[v].x[i] / n;

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = centroid[i] + t * (centroid[i] - s[n].x[i]);
      return x;
    };

    const auto xr = blend(1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < s[0].f) {
      const auto xe = blend(2.0);
      const double fe = f(xe);
      ++evals;
      s[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < s[n - 1].f) {
      s[n] = {xr, fr};
      continue;
    }
    const bool outside = fr < s[n].f;
    const auto xc = blend(outside ? 0.5 : -0.5);
    const double fc = f(xc);
    ++evals;
    if (fc < (outside ? fr : s[n].f)) {
      s[n] = {xc, fc};
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {  // shrink toward the best vertex
      for (std::size_t i = 0; i < n; ++i)
        s[v].x[i] = s[0].x[i] + 0.5 * (s[v].x[i] - s[0].x[i]);
      s[v].f = f(s[v].x);
      ++evals;
    }
  }

  std::sort(s.begin(), s.end(),
            [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  return s.front();
}

// Quadratic fit through (x-h, x, x+h) per coordinate; step to the vertex when
// the fit is convex and the move helps.
Vertex polish(const Objective& f, Vertex best, std::vector<double> h,
              const OptimOptions& opts, int& evals) {
  for (int sweep = 0; sweep < opts.polish_sweeps; ++sweep) {
    for (std::size_t i = 0; i < best.x.size(); ++i) {
      if (evals + 3 > opts.max_evals) return best;
      auto xm = best.x;
      auto xp = best.x;
      xm[i] -= h[i];
      xp[i] += h[i];
      const double fm = f(xm);
      const double fp = f(xp);
      evals += 2;
      const double curvature = fm - 2.0 * best.f + fp;
      if (curvature > 0.0) {
        auto xv = best.x;
        xv[i] += 0.5 * h[i] * (fm - fp) / curvature;
        const double fv = f(xv);
        ++evals;
        if (fv < best.f) best = {xv, fv};
      } else if (fm < best.f || fp < best.f) {
        best = fm < fp ? Vertex{xm, fm} : Vertex{xp, fp};
      }
      h[i] *= 0.1;
    }
  }
  return best;
}

}  // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> x0,
                        std::vector<double> step, const OptimOptions& opts) {
  if (x0.empty()) throw std::invalid_argument("nelder_mead: empty start point");
  if (step.size() == 1) step.assign(x0.size(), step.front());
  if (step.size() != x0.size())
    throw std::invalid_argument("nelder_mead: step size mismatch");
  for (double s : step)
    if (!(s > 0.0)) throw std::invalid_argument("nelder_mead: step must be positive");

  int evals = 0;
  Vertex best{x0, std::numeric_limits<double>::infinity()};
  auto scale = step;
  for (int run = 0; run <= opts.restarts && evals < opts.max_evals; ++run) {
    const Vertex v = simplex_run(f, run == 0 ? x0 : best.x, scale, opts, evals);
    if (v.f < best.f) best = v;
    for (double& s : scale) s *= 0.05;  // re-seed tightly around the incumbent
  }

  std::vector<double> h(step.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1e-4 * step[i];
  best = polish(f, best, h, opts, evals);

  return {best.x, best.f, evals, true};
}

}  // namespace qwalk
