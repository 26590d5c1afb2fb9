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

#include "qwalk/compiler.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "qwalk/optim.hpp"

namespace qwalk::nmr {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::pair<int, int> canonical_pair(int i, int j) {
  return {std::min(i, j), std::max(i, j)};
}

// +-1 sign of spin `row` during Walsh segment `s` (rows and segments 0..7).
int walsh_sign(int row, int s) {
  return std::popcount(static_cast<unsigned>(row & s)) % 2 ? -1 : 1;
}

// z eigenvalue of spin `i` on basis state `b` (spin 0 is the MSB).
int z_sign(int b, int i, int n) { return (b >> (n - 1 - i)) & 1 ? -1 : 1; }

// diag phases exp(-i/2 (sum_i z_i[v] z_sign + sum_pairs chi zz)) for the
// error model; `zpart` has one angle per spin, `zzpart` one per pair entry.
cvector z_zz_diagonal(int n, const std::vector<double>& zpart,
                      const std::vector<std::pair<std::pair<int, int>, double>>&
                          zzpart) {
  const int d = 1 << n;
  cvector diag(d);
  for (int b = 0; b < d; ++b) {
    double angle = 0.0;
    for (int i = 0; i < n; ++i) angle += zpart[i] * z_sign(b, i, n);
    for (const auto& [pair, chi] : zzpart)
      angle += chi * z_sign(b, pair.first, n) * z_sign(b, pair.second, n);
    diag(b) = std::exp(complex_t(0.0, -angle / 2.0));
  }
  return diag;
}

// ------------------------------------------------------------------
// Refocused coupling blocks.
// ------------------------------------------------------------------

struct BlockTarget {
  int i = 0;
  int j = 0;
  double time = 0.0;  // required shared evolution time (s), > 0
};

struct BlockPlan {
  std::vector<PulseEvent> events;
  std::vector<double> shift_z;  // extra Rz angle the block leaves per spin
  double total_time = 0.0;
  int flip_count = 0;
  int segment_count = 0;
};

// Evaluates one Walsh row assignment: every target pair must accumulate its
// required time, every other coupled pair must refocus to zero.
std::optional<BlockPlan> plan_for_rows(const Molecule& m,
                                       const std::vector<int>& rows,
                                       const std::vector<BlockTarget>& targets) {
  const int n = m.num_spins();
  std::array<double, 8> pair_time{};
  std::array<bool, 8> active{};
  for (const auto& t : targets) {
    const int k = rows[t.i] ^ rows[t.j];
    if (k == 0) return std::nullopt;
    if (active[k] && std::abs(pair_time[k] - t.time) > 1e-12) return std::nullopt;
    pair_time[k] = t.time;
    active[k] = true;
  }
  for (const auto& c : m.couplings) {
    if (c.j_hz == 0.0) continue;
    bool is_target = false;
    for (const auto& t : targets)
      if (t.i == c.i && t.j == c.j) is_target = true;
    if (is_target) continue;
    const int k = rows[c.i] ^ rows[c.j];
    if (k == 0 || active[k]) return std::nullopt;
  }

  std::array<double, 8> base{};
  double min_base = 0.0;
  for (int s = 0; s < 8; ++s) {
    for (int k = 1; k < 8; ++k)
      if (active[k]) base[s] += pair_time[k] * walsh_sign(k, s);
    min_base = std::min(min_base, base[s]);
  }
  const double c0 = -min_base;  // minimal total time with tau_s >= 0

  // Merge segments with identical sign patterns, in first-occurrence order.
  std::vector<std::pair<std::vector<int>, double>> segments;
  for (int s = 0; s < 8; ++s) {
    const double tau = (c0 + base[s]) / 8.0;
    if (tau <= c0 * 1e-12) continue;
    std::vector<int> pattern(n);
    for (int i = 0; i < n; ++i) pattern[i] = walsh_sign(rows[i], s);
    auto found = std::find_if(segments.begin(), segments.end(),
                              [&](const auto& seg) { return seg.first == pattern; });
    if (found == segments.end())
      segments.push_back({pattern, tau});
    else
      found->second += tau;
  }

  BlockPlan plan;
  plan.total_time = c0;
  plan.segment_count = static_cast<int>(segments.size());
  plan.shift_z.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double signed_time = 0.0;
    for (const auto& [pattern, tau] : segments)
      signed_time += pattern[i] * tau;
    plan.shift_z[i] = 2.0 * kPi * m.spins[i].offset_hz * signed_time;
  }

  std::vector<int> current(n, 1);
  auto flip_to = [&](const std::vector<int>& pattern) {
    for (int i = 0; i < n; ++i)
      if (current[i] != pattern[i]) {
        plan.events.push_back(PulseEvent::ideal_rotation(i, 0.0, kPi));
        current[i] = pattern[i];
        ++plan.flip_count;
      }
  };
  for (const auto& [pattern, tau] : segments) {
    flip_to(pattern);
    plan.events.push_back(PulseEvent::delay(tau));
  }
  flip_to(std::vector<int>(n, 1));
  return plan;
}

BlockPlan plan_coupling_block(const Molecule& m,
                              const std::map<std::pair<int, int>, double>& angles) {
  const int n = m.num_spins();
  std::vector<BlockTarget> targets;
  for (const auto& [pair, angle] : angles) {
    const auto [i, j] = pair;
    require(i >= 0 && j > i && j < n, "zz block: bad pair indices");
    require(std::isfinite(angle), "zz block: angle must be finite");
    const double j_hz = m.j_between(i, j);
    if (j_hz == 0.0)
      throw std::invalid_argument("zz block: target pair is uncoupled");
    // Evolution for time t gives exp(-i pi J t / 2 * ZZ); fold the angle to
    // the nonnegative-time branch, dropping full turns (global phase only).
    double eff = std::fmod(angle * (j_hz > 0.0 ? 1.0 : -1.0), 2.0 * kPi);
    if (eff < 0.0) eff += 2.0 * kPi;
    if (eff < 1e-12 || 2.0 * kPi - eff < 1e-12) continue;
    targets.push_back({i, j, eff / (kPi * std::abs(j_hz))});
  }
  if (targets.empty()) {
    BlockPlan plan;
    plan.shift_z.assign(n, 0.0);
    return plan;
  }

  std::optional<BlockPlan> best;
  std::vector<int> rows(n, 0);
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 8;
  for (int code = 0; code < combos; ++code) {
    int c = code;
    for (int i = 0; i < n; ++i) {
      rows[i] = c % 8;
      c /= 8;
    }
    auto plan = plan_for_rows(m, rows, targets);
    if (!plan) continue;
    const auto score = std::tuple(plan->total_time, plan->flip_count,
                                  plan->segment_count);
    if (!best || score < std::tuple(best->total_time, best->flip_count,
                                    best->segment_count))
      best = std::move(plan);
  }
  if (!best)
    throw std::runtime_error(
        "zz block: no refocusing assignment covers the requested pairs");
  return *best;
}

// ------------------------------------------------------------------
// Single-spin merging.
// ------------------------------------------------------------------

struct Zyz {
  double alpha = 0.0;  // applied last
  double beta = 0.0;   // y-rotation
  double gamma = 0.0;  // applied first
};

// u ~ Rz(alpha) Ry(beta) Rz(gamma) up to global phase.
Zyz zyz_decompose(const Eigen::Matrix2cd& u) {
  const complex_t det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  const Eigen::Matrix2cd su = u / std::sqrt(det);
  const complex_t a = su(0, 0);
  const complex_t b = su(1, 0);
  Zyz r;
  r.beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  if (std::abs(b) < 1e-14) {
    r.alpha = -2.0 * std::arg(a);
  } else if (std::abs(a) < 1e-14) {
    r.alpha = 2.0 * std::arg(b);
  } else {
    r.alpha = std::arg(b) - std::arg(a);
    r.gamma = -std::arg(a) - std::arg(b);
  }
  return r;
}

// Merges runs of single-spin gates (ZZ gates are barriers for their spins)
// into at most Rz, Ry, Rz each; single-spin gates on distinct spins commute,
// so emission at the barrier preserves the circuit.
GateList merge_single_spin(const GateList& gates, int n) {
  std::vector<Eigen::Matrix2cd> acc(n, Eigen::Matrix2cd::Identity());
  std::vector<bool> dirty(n, false);
  GateList out;

  auto flush = [&](int s) {
    if (!dirty[s]) return;
    const Zyz r = zyz_decompose(acc[s]);
    if (std::abs(r.gamma) > 1e-14) out.push_back(Gate::rotation_z(s, r.gamma));
    if (std::abs(r.beta) > 1e-14)
      out.push_back(Gate::rotation_xy(s, kPi / 2.0, r.beta));
    if (std::abs(r.alpha) > 1e-14) out.push_back(Gate::rotation_z(s, r.alpha));
    acc[s] = Eigen::Matrix2cd::Identity();
    dirty[s] = false;
  };

  for (const auto& g : gates) {
    switch (g.kind) {
      case Gate::Kind::RotationXY:
        acc[g.spin] = rotation_xy(g.phase, g.angle) * acc[g.spin];
        dirty[g.spin] = true;
        break;
      case Gate::Kind::RotationZ:
        acc[g.spin] = rotation_z(g.angle) * acc[g.spin];
        dirty[g.spin] = true;
        break;
      case Gate::Kind::ZZ:
        flush(g.spin);
        flush(g.spin2);
        out.push_back(g);
        break;
    }
  }
  for (int s = 0; s < n; ++s) flush(s);
  return out;
}

void validate_gates(const GateList& gates, int n) {
  for (const auto& g : gates) {
    require(g.spin >= 0 && g.spin < n, "compile: gate spin out of range");
    require(std::isfinite(g.angle) && std::isfinite(g.phase),
            "compile: gate parameters must be finite");
    if (g.kind == Gate::Kind::ZZ) {
      require(g.spin2 >= 0 && g.spin2 < n && g.spin2 != g.spin,
              "compile: zz gate needs two distinct spins");
    }
  }
}

// Cached canonical (phase 0) soft pulse and its error decomposition.
struct SoftEntry {
  std::vector<double> shape;
  double duration = 0.0;
  cmatrix u0;
  ErrorDecomposition errors;
};

// Fast schedule unitary for refinement: delays and frame angles vary, soft
// pulses vary only by transverse phase (a frame conjugation of u0).
struct FastEvaluator {
  const Molecule& m;
  int n;
  Eigen::SelfAdjointEigenSolver<cmatrix> es;
  // Per event: kind tag, fixed unitary or handles into the parameter vector.
  struct Step {
    int kind = 0;  // 0 fixed, 1 delay(param), 2 soft(param phase), 3 frame(param)
    cmatrix fixed;
    int param = -1;
    const SoftEntry* soft = nullptr;
    std::vector<int> species;
    int spin = -1;
  };
  std::vector<Step> steps;

  explicit FastEvaluator(const Molecule& mol)
      : m(mol), n(mol.num_spins()), es(hamiltonian(mol)) {}

  cmatrix delay_u(double t) const {
    cvector ph(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < ph.size(); ++k)
      ph(k) = std::exp(complex_t(0.0, -es.eigenvalues()(k) * t));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  }

  cmatrix unitary(const std::vector<double>& x) const {
    cmatrix u = identity(n);
    for (const auto& st : steps) {
      switch (st.kind) {
        case 0:
          u = st.fixed * u;
          break;
        case 1:
          u = delay_u(std::max(0.0, x[st.param])) * u;
          break;
        case 2: {
          const double psi = x[st.param];
          cvector conj_diag(1 << n);
          for (int b = 0; b < (1 << n); ++b) {
            int zsum = 0;
            for (int i : st.species) zsum += z_sign(b, i, n);
            conj_diag(b) = std::exp(complex_t(0.0, -psi * zsum / 2.0));
          }
          u = conj_diag.asDiagonal() * st.soft->u0 *
              conj_diag.conjugate().asDiagonal() * u;
          break;
        }
        case 3: {
          cvector diag(1 << n);
          for (int b = 0; b < (1 << n); ++b)
            diag(b) = std::exp(
                complex_t(0.0, -x[st.param] * z_sign(b, st.spin, n) / 2.0));
          u = diag.asDiagonal() * u;
          break;
        }
      }
    }
    return u;
  }
};

}  // namespace

// ------------------------------------------------------------------
// Gates.
// ------------------------------------------------------------------

Gate Gate::rotation_xy(int spin, double phase, double angle) {
  Gate g;
  g.kind = Kind::RotationXY;
  g.spin = spin;
  g.phase = phase;
  g.angle = angle;
  return g;
}

Gate Gate::rotation_z(int spin, double angle) {
  Gate g;
  g.kind = Kind::RotationZ;
  g.spin = spin;
  g.angle = angle;
  return g;
}

Gate Gate::zz(int i, int j, double angle) {
  Gate g;
  g.kind = Kind::ZZ;
  g.spin = i;
  g.spin2 = j;
  g.angle = angle;
  return g;
}

cmatrix gate_unitary(const Gate& g, int num_spins) {
  validate_gates({g}, num_spins);
  switch (g.kind) {
    case Gate::Kind::RotationXY:
      return embed1(rotation_xy(g.phase, g.angle), g.spin, num_spins);
    case Gate::Kind::RotationZ:
      return embed1(rotation_z(g.angle), g.spin, num_spins);
    case Gate::Kind::ZZ: {
      const int d = 1 << num_spins;
      cmatrix u = cmatrix::Zero(d, d);
      for (int b = 0; b < d; ++b)
        u(b, b) = std::exp(complex_t(
            0.0, -g.angle / 2.0 * z_sign(b, g.spin, num_spins) *
                     z_sign(b, g.spin2, num_spins)));
      return u;
    }
  }
  throw std::logic_error("gate_unitary: unknown kind");
}

cmatrix gate_list_unitary(const GateList& gates, int num_spins) {
  cmatrix u = identity(num_spins);
  for (const auto& g : gates) u = gate_unitary(g, num_spins) * u;
  return u;
}

double gate_fidelity(const cmatrix& u_ideal, const cmatrix& u_sim) {
  require(u_ideal.rows() == u_sim.rows() && u_ideal.cols() == u_sim.cols(),
          "gate_fidelity: dimension mismatch");
  return std::abs((u_ideal.adjoint() * u_sim).trace()) /
         static_cast<double>(u_ideal.rows());
}

// ------------------------------------------------------------------
// zz_gate.
// ------------------------------------------------------------------

PulseSchedule zz_gate(const Molecule& m,
                      const std::vector<std::tuple<int, int, double>>& targets) {
  m.validate();
  std::map<std::pair<int, int>, double> angles;
  for (const auto& [i, j, angle] : targets) {
    require(i != j, "zz_gate: needs two distinct spins");
    angles[canonical_pair(i, j)] += angle;
  }
  const BlockPlan plan = plan_coupling_block(m, angles);
  PulseSchedule s{m, {}};
  for (const auto& e : plan.events) s.append(e);
  for (int i = 0; i < m.num_spins(); ++i) {
    const double correction = std::remainder(-plan.shift_z[i], 2.0 * kPi);
    if (std::abs(correction) > 1e-14)
      s.append(PulseEvent::frame_z(i, correction));
  }
  return s;
}

PulseSchedule zz_gate(const Molecule& m, int i, int j, double angle) {
  return zz_gate(m, {{i, j, angle}});
}

// ------------------------------------------------------------------
// Error decomposition.
// ------------------------------------------------------------------

ErrorDecomposition error_decompose(const cmatrix& u_sim,
                                   const cmatrix& u_ideal) {
  require(u_sim.rows() == u_ideal.rows() && u_sim.cols() == u_ideal.cols(),
          "error_decompose: dimension mismatch");
  const int n = spin_count(u_sim);
  const int d = 1 << n;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  const int np = static_cast<int>(pairs.size());
  // Coupling errors sandwich the ideal pulse: each pair carries a pre and a
  // post share; zz_error reports the total angle per pair.
  const int n_params = 2 * n + 2 * np;

  const cmatrix sim_conj = u_sim.conjugate();
  auto objective = [&](const std::vector<double>& x) {
    // model = Z(post) ZZ(chi_post) * u_ideal * Z(pre) ZZ(chi_pre)
    std::vector<double> pre(x.begin(), x.begin() + n);
    std::vector<double> post(x.begin() + n, x.begin() + 2 * n);
    std::vector<std::pair<std::pair<int, int>, double>> zz_pre;
    std::vector<std::pair<std::pair<int, int>, double>> zz_post;
    for (int p = 0; p < np; ++p) {
      zz_pre.push_back({pairs[p], x[2 * n + p]});
      zz_post.push_back({pairs[p], x[2 * n + np + p]});
    }
    const cvector pre_diag = z_zz_diagonal(n, pre, zz_pre);
    const cvector post_diag = z_zz_diagonal(n, post, zz_post);
    complex_t tr = 0.0;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        tr += sim_conj(r, c) * post_diag(r) * u_ideal(r, c) * pre_diag(c);
    return 1.0 - std::abs(tr) / static_cast<double>(d);
  };
  // The model has gauge copies at large angles (ZZ(pi) equals i Rz(pi) x
  // Rz(pi) up to phase); a tiny norm penalty plus a staged search keep the
  // fit at the smallest-angle representative: z angles first with couplings
  // frozen, then the zz shares released from a small simplex.
  auto regularized = [&](const std::vector<double>& x) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    return objective(x) + 1e-9 * norm2;
  };

  OptimOptions opts;
  opts.max_evals = 40000;
  opts.restarts = 2;
  opts.polish_sweeps = 4;
  std::vector<double> x0(n_params, 0.0);
  std::vector<double> step(n_params, 0.05);
  {
    auto z_only = [&](const std::vector<double>& z) {
      std::vector<double> full(n_params, 0.0);
      std::copy(z.begin(), z.end(), full.begin());
      return regularized(full);
    };
    const OptimResult zfit =
        nelder_mead(z_only, std::vector<double>(2 * n, 0.0), {0.2}, opts);
    std::copy(zfit.x.begin(), zfit.x.end(), x0.begin());
  }
  const OptimResult fit = nelder_mead(regularized, x0, step, opts);

  ErrorDecomposition out;
  out.pre_z.resize(n);
  out.post_z.resize(n);
  for (int i = 0; i < n; ++i) {
    out.pre_z[i] = std::remainder(fit.x[i], 2.0 * kPi);
    out.post_z[i] = std::remainder(fit.x[n + i], 2.0 * kPi);
  }
  for (int p = 0; p < np; ++p)
    out.zz_error[pairs[p]] =
        std::remainder(fit.x[2 * n + p] + fit.x[2 * n + np + p], 2.0 * kPi);
  out.residual_infidelity = std::max(0.0, objective(fit.x));
  return out;
}

double selective_fidelity(const Molecule& m, int target, double phase,
                          double angle, double duration, int samples) {
  const auto shape = gaussian_shape(angle, duration, samples);
  const cmatrix u_sim = soft_pulse(m, target, shape, duration, phase, angle);
  const cmatrix u_ideal =
      embed1(rotation_xy(phase, angle), target, m.num_spins());
  return 1.0 - error_decompose(u_sim, u_ideal).residual_infidelity;
}

// ------------------------------------------------------------------
// compile.
// ------------------------------------------------------------------

CompileResult compile(const GateList& gates, const Molecule& m,
                      const CompileOptions& opts) {
  m.validate();
  const int n = m.num_spins();
  validate_gates(gates, n);
  if (opts.mode == PulseMode::Soft) {
    require(static_cast<int>(opts.soft_duration_s.size()) == n,
            "compile: soft mode needs one pulse duration per spin");
    for (double t : opts.soft_duration_s)
      require(t > 0.0, "compile: soft pulse durations must be positive");
  }

  const GateList merged = merge_single_spin(gates, n);

  PulseSchedule schedule{m, {}};
  std::vector<double> pending(n, 0.0);
  std::map<std::pair<int, int>, double> pending_zz;
  std::map<std::pair<int, double>, SoftEntry> soft_cache;

  auto soft_entry = [&](int spin, double angle) -> const SoftEntry& {
    auto key = std::make_pair(spin, angle);
    auto found = soft_cache.find(key);
    if (found != soft_cache.end()) return found->second;
    SoftEntry entry;
    entry.duration = opts.soft_duration_s[spin];
    entry.shape = gaussian_shape(angle, entry.duration, opts.soft_samples);
    entry.u0 = soft_pulse(m, spin, entry.shape, entry.duration, 0.0, angle);
    entry.errors = error_decompose(
        entry.u0, embed1(rotation_xy(0.0, angle), spin, n));
    return soft_cache.emplace(key, std::move(entry)).first->second;
  };

  for (std::size_t g = 0; g < merged.size();) {
    const Gate& gate = merged[g];
    if (gate.kind == Gate::Kind::RotationZ) {
      pending[gate.spin] += gate.angle;
      ++g;
      continue;
    }
    if (gate.kind == Gate::Kind::RotationXY) {
      if (opts.mode == PulseMode::Ideal) {
        const double psi =
            std::remainder(gate.phase - pending[gate.spin], 2.0 * kPi);
        schedule.append(
            PulseEvent::ideal_rotation(gate.spin, psi, gate.angle));
      } else {
        // The canonical pulse realizes Z(post) R_psi(theta) Z(pre) ZZ(chi)
        // up to its residual; choose psi so the R factor lands on the ideal
        // axis, fold the z errors into the pending frame and the zz errors
        // into the next coupling block.
        const SoftEntry& entry = soft_entry(gate.spin, gate.angle);
        const double psi =
            std::remainder(gate.phase - pending[gate.spin] +
                               entry.errors.pre_z[gate.spin],
                           2.0 * kPi);
        schedule.append(PulseEvent::soft_pulse(
            gate.spin, entry.shape, entry.duration, psi, gate.angle));
        for (int i = 0; i < n; ++i)
          pending[i] -= entry.errors.pre_z[i] + entry.errors.post_z[i];
        for (const auto& [pair, chi] : entry.errors.zz_error)
          if (std::abs(chi) > 1e-12 && m.j_between(pair.first, pair.second) != 0.0)
            pending_zz[pair] += chi;
      }
      ++g;
      continue;
    }
    // Maximal run of ZZ gates becomes one refocused block.
    std::map<std::pair<int, int>, double> block;
    while (g < merged.size() && merged[g].kind == Gate::Kind::ZZ) {
      block[canonical_pair(merged[g].spin, merged[g].spin2)] += merged[g].angle;
      ++g;
    }
    for (auto& [pair, chi] : pending_zz) block[pair] -= chi;
    pending_zz.clear();
    const BlockPlan plan = plan_coupling_block(m, block);
    for (const auto& e : plan.events) schedule.append(e);
    for (int i = 0; i < n; ++i) pending[i] -= plan.shift_z[i];
  }

  for (int i = 0; i < n; ++i) {
    const double frame = std::remainder(pending[i], 2.0 * kPi);
    if (std::abs(frame) > 1e-14) schedule.append(PulseEvent::frame_z(i, frame));
  }

  const cmatrix u_ideal = gate_list_unitary(gates, n);

  if (opts.mode == PulseMode::Soft && opts.refine) {
    FastEvaluator eval(m);
    std::vector<double> x0;
    std::vector<double> step;
    for (const auto& e : schedule.events) {
      FastEvaluator::Step st;
      switch (e.kind) {
        case EventKind::Delay:
          st.kind = 1;
          st.param = static_cast<int>(x0.size());
          x0.push_back(e.duration);
          step.push_back(std::max(0.02 * e.duration, 1e-6));
          break;
        case EventKind::SoftPulse: {
          st.kind = 2;
          st.param = static_cast<int>(x0.size());
          x0.push_back(e.phase);
          step.push_back(0.02);
          st.soft = &soft_cache.at({e.targets.front(), e.angle});
          st.species = m.species_peers(e.targets.front());
          break;
        }
        case EventKind::FrameZ:
          st.kind = 3;
          st.param = static_cast<int>(x0.size());
          st.spin = e.targets.front();
          x0.push_back(e.angle);
          step.push_back(0.02);
          break;
        default: {
          st.kind = 0;
          const cmatrix r = rotation_xy(e.phase, e.angle);
          cmatrix u = identity(n);
          for (int t : e.targets) u = embed1(r, t, n) * u;
          st.fixed = u;
          break;
        }
      }
      eval.steps.push_back(std::move(st));
    }
    if (!x0.empty()) {
      auto objective = [&](const std::vector<double>& x) {
        double penalty = 0.0;
        for (const auto& st : eval.steps)
          if (st.kind == 1 && x[st.param] < 0.0) penalty -= 1e3 * x[st.param];
        return 1.0 - gate_fidelity(u_ideal, eval.unitary(x)) + penalty;
      };
      OptimOptions nm;
      nm.max_evals = 6000;
      nm.restarts = 1;
      nm.polish_sweeps = 2;
      const OptimResult fit = nelder_mead(objective, x0, step, nm);
      std::size_t p = 0;
      for (auto& e : schedule.events) {
        if (e.kind == EventKind::Delay)
          e.duration = std::max(0.0, fit.x[p++]);
        else if (e.kind == EventKind::SoftPulse)
          e.phase = fit.x[p++];
        else if (e.kind == EventKind::FrameZ)
          e.angle = fit.x[p++];
      }
    }
  }

  CompileResult result{std::move(schedule), 0.0};
  result.gate_fidelity = gate_fidelity(u_ideal, simulate_schedule(result.schedule));
  return result;
}

}  // namespace qwalk::nmr
