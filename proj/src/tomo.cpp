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

#include "qwalk/tomo.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qwalk::tomo {

namespace {

// Singular values of the observation matrix are O(1); rank and null-space
// membership use one absolute cutoff.
constexpr double kRankTol = 1e-8;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

char action_letter(ReadoutAction a) {
  switch (a) {
    case ReadoutAction::None: return 'I';
    case ReadoutAction::X90: return 'x';
    default: return 'y';
  }
}

std::vector<ReadoutPulse> pulses_from_labels(
    const std::vector<std::string>& labels) {
  std::vector<ReadoutPulse> set;
  set.reserve(labels.size());
  for (const std::string& label : labels)
    set.push_back(ReadoutPulse::from_label(label));
  return set;
}

std::vector<std::string> traceless_labels(int num_spins) {
  std::vector<std::string> labels = pauli_labels(num_spins);
  labels.erase(labels.begin());  // leading all-I label
  return labels;
}

// Observation rows of one readout pulse: entry (P, Q) is
// Tr(P * R * Q * R^dag) / 2^n, exactly 0 or +-1 for 90-degree pulses.
// Cached per (readout, support); reconstruction may run from worker threads.
Eigen::MatrixXd readout_rows(const ReadoutPulse& r,
                             const std::vector<std::string>& observables,
                             const std::vector<std::string>& support) {
  static std::mutex cache_mutex;
  static std::map<std::string, Eigen::MatrixXd> cache;
  std::string key = r.label();
  for (const std::string& label : support) {
    key.push_back('|');
    key.append(label);
  }
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const auto found = cache.find(key);
    if (found != cache.end()) return found->second;
  }
  const cmatrix u = r.unitary();
  Eigen::MatrixXd rows(observables.size(), support.size());
  for (std::size_t q = 0; q < support.size(); ++q) {
    const cmatrix w = u * pauli(support[q]) * u.adjoint();
    const PauliVector pv = pauli_decompose(DensityState::deviation(w));
    for (std::size_t p = 0; p < observables.size(); ++p)
      rows(p, q) = pv.coeffs.at(observables[p]);
  }
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache.emplace(std::move(key), std::move(rows)).first->second;
}

struct Ansatz {
  int num_spins = 0;
  std::vector<std::string> free_labels;
  std::vector<std::string> pinned_labels;
  std::vector<double> pinned_values;
};

Ansatz resolve_ansatz(int num_spins, const ReconstructionOptions& opts) {
  require(num_spins >= 1 && num_spins <= kMaxSpins,
          "tomography: register must have one to four spins");
  Ansatz a;
  a.num_spins = num_spins;
  std::vector<std::string> support =
      opts.support.empty() ? traceless_labels(num_spins) : opts.support;
  const std::vector<std::string> all = pauli_labels(num_spins);
  for (const std::string& label : support) {
    require(static_cast<int>(label.size()) == num_spins &&
                std::find(all.begin(), all.end(), label) != all.end(),
            "tomography: malformed support label");
    require(label != all.front(), "tomography: identity label in support");
  }
  std::sort(support.begin(), support.end());
  require(std::adjacent_find(support.begin(), support.end()) == support.end(),
          "tomography: duplicate support label");
  for (const auto& [label, value] : opts.pinned) {
    const auto at = std::find(support.begin(), support.end(), label);
    require(at != support.end(),
            "tomography: pinned label outside the support");
    a.pinned_labels.push_back(label);
    a.pinned_values.push_back(value);
    support.erase(at);
  }
  a.free_labels = std::move(support);
  return a;
}

}  // namespace

ReadoutPulse ReadoutPulse::from_label(std::string_view label) {
  ReadoutPulse r;
  for (char c : label) {
    switch (c) {
      case 'I': r.actions.push_back(ReadoutAction::None); break;
      case 'x': r.actions.push_back(ReadoutAction::X90); break;
      case 'y': r.actions.push_back(ReadoutAction::Y90); break;
      default:
        throw std::invalid_argument(
            "readout label: expected I, x or y letters");
    }
  }
  r.validate();
  return r;
}

std::string ReadoutPulse::label() const {
  std::string out;
  for (ReadoutAction a : actions) out.push_back(action_letter(a));
  return out;
}

cmatrix ReadoutPulse::unitary() const {
  validate();
  const int n = num_spins();
  cmatrix u = identity(n);
  for (int i = 0; i < n; ++i) {
    if (actions[i] == ReadoutAction::None) continue;
    const char axis = actions[i] == ReadoutAction::X90 ? 'x' : 'y';
    u = embed1(rotation_axis(axis, kPi / 2.0), i, n) * u;
  }
  return u;
}

void ReadoutPulse::validate() const {
  require(!actions.empty() && num_spins() <= kMaxSpins,
          "readout pulse: one to four spins");
}

std::vector<ReadoutPulse> seven_pulse_set() {
  return pulses_from_labels(
      {"yII", "IIy", "IIx", "yyI", "Ixx", "yyy", "xxx"});
}

std::vector<ReadoutPulse> labeled_seven_pulse_set() {
  return pulses_from_labels(
      {"IyII", "IIIy", "IIIx", "IyyI", "IIxx", "Iyyy", "Ixxx"});
}

bool is_single_coherence(std::string_view label) {
  int transverse = 0;
  for (char c : label) {
    if (c == 'X' || c == 'Y') ++transverse;
    else if (c != 'I' && c != 'Z') return false;
  }
  return transverse == 1;
}

std::vector<std::string> single_coherence_labels(int num_spins) {
  std::vector<std::string> out;
  for (const std::string& label : pauli_labels(num_spins))
    if (is_single_coherence(label)) out.push_back(label);
  return out;
}

ObservableSet observe(const DensityState& state, const ReadoutPulse& r) {
  require(r.num_spins() == state.num_spins(),
          "observe: readout pulse and state sizes differ");
  const DensityState rotated = conjugate(state, r.unitary());
  ObservableSet values;
  for (const std::string& label : single_coherence_labels(r.num_spins()))
    values[label] = (pauli(label) * rotated.matrix()).trace().real();
  return values;
}

std::vector<std::string> label_diagonal_support(int num_spins) {
  require(num_spins >= 2 && num_spins <= kMaxSpins,
          "label_diagonal_support: two to four spins");
  std::vector<std::string> out;
  for (const std::string& label : traceless_labels(num_spins))
    if (label.front() == 'I' || label.front() == 'Z') out.push_back(label);
  return out;
}

CompletenessReport readout_set_complete(const std::vector<ReadoutPulse>& set,
                                        int num_spins,
                                        const ReconstructionOptions& opts) {
  const Ansatz ansatz = resolve_ansatz(num_spins, opts);
  const std::vector<std::string> observables =
      single_coherence_labels(num_spins);

  CompletenessReport report;
  report.dimension = static_cast<int>(ansatz.free_labels.size());
  Eigen::MatrixXd a(set.size() * observables.size(), ansatz.free_labels.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    require(set[k].num_spins() == num_spins,
            "readout_set_complete: pulse size mismatch");
    a.middleRows(k * observables.size(), observables.size()) =
        readout_rows(set[k], observables, ansatz.free_labels);
  }
  if (a.rows() == 0 || a.cols() == 0) {
    report.missing = ansatz.free_labels;
    return report;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > kRankTol) ++report.rank;
  report.complete = report.rank == report.dimension;
  if (!report.complete) {
    for (Eigen::Index q = 0; q < a.cols(); ++q) {
      double null_weight = 0.0;
      for (Eigen::Index k = report.rank; k < svd.matrixV().cols(); ++k)
        null_weight += svd.matrixV()(q, k) * svd.matrixV()(q, k);
      if (null_weight > kRankTol) report.missing.push_back(ansatz.free_labels[q]);
    }
  }
  return report;
}

DensityState reconstruct(const std::vector<Measurement>& measurements,
                         const ReconstructionOptions& opts) {
  require(!measurements.empty(), "reconstruct: no measurements");
  const int n = measurements.front().first.num_spins();
  const Ansatz ansatz = resolve_ansatz(n, opts);
  const std::vector<std::string> observables = single_coherence_labels(n);

  const Eigen::Index block = static_cast<Eigen::Index>(observables.size());
  Eigen::MatrixXd a(measurements.size() * block, ansatz.free_labels.size());
  Eigen::MatrixXd a_pinned(measurements.size() * block,
                           ansatz.pinned_labels.size());
  Eigen::VectorXd b(measurements.size() * block);
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const auto& [pulse, values] = measurements[k];
    require(pulse.num_spins() == n, "reconstruct: readout size mismatch");
    a.middleRows(k * block, block) =
        readout_rows(pulse, observables, ansatz.free_labels);
    if (!ansatz.pinned_labels.empty())
      a_pinned.middleRows(k * block, block) =
          readout_rows(pulse, observables, ansatz.pinned_labels);
    for (Eigen::Index p = 0; p < block; ++p) {
      const auto at = values.find(observables[p]);
      require(at != values.end(),
              "reconstruct: observable set is missing a single-coherence label");
      b(k * block + p) = at->second;
    }
  }
  for (std::size_t j = 0; j < ansatz.pinned_labels.size(); ++j)
    b -= ansatz.pinned_values[j] * a_pinned.col(j);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > kRankTol) ++rank;
  if (rank < static_cast<int>(ansatz.free_labels.size())) {
    std::ostringstream what;
    what << "reconstruct: readout set incomplete; undetermined directions:";
    for (Eigen::Index q = 0; q < a.cols(); ++q) {
      double null_weight = 0.0;
      for (Eigen::Index k = rank; k < svd.matrixV().cols(); ++k)
        null_weight += svd.matrixV()(q, k) * svd.matrixV()(q, k);
      if (null_weight > kRankTol) what << ' ' << ansatz.free_labels[q];
    }
    throw std::invalid_argument(what.str());
  }
  const Eigen::VectorXd d = svd.solve(b);

  const double scale = 1.0 / static_cast<double>(Eigen::Index{1} << n);
  cmatrix rho = cmatrix::Zero(1 << n, 1 << n);
  for (std::size_t q = 0; q < ansatz.free_labels.size(); ++q)
    rho += scale * d(q) * pauli(ansatz.free_labels[q]);
  for (std::size_t j = 0; j < ansatz.pinned_labels.size(); ++j)
    rho += scale * ansatz.pinned_values[j] * pauli(ansatz.pinned_labels[j]);
  return DensityState::deviation(rho);
}

double fidelity(const DensityState& a, const DensityState& b) {
  require(a.dim() == b.dim(), "fidelity: dimension mismatch");
  const double pa = (a.matrix() * a.matrix()).trace().real();
  const double pb = (b.matrix() * b.matrix()).trace().real();
  require(pa > 1e-24 && pb > 1e-24, "fidelity: zero-purity state");
  const double overlap = (a.matrix() * b.matrix()).trace().real();
  return overlap / std::sqrt(pa * pb);
}

std::string to_json(const std::vector<Measurement>& measurements) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [pulse, values] : measurements) {
    nlohmann::json entry;
    entry["readout"] = pulse.label();
    entry["values"] = values;
    j.push_back(entry);
  }
  return j.dump(2);
}

std::vector<Measurement> measurements_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("measurement json: ") + e.what());
  }
  std::vector<Measurement> out;
  try {
    for (const auto& entry : j) {
      Measurement m;
      m.first = ReadoutPulse::from_label(entry.at("readout").get<std::string>());
      for (const auto& [label, value] : entry.at("values").items()) {
        require(is_single_coherence(label),
                "measurement json: label is not a single coherence");
        m.second[label] = value.get<double>();
      }
      out.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("measurement json: ") + e.what());
  }
  return out;
}

}  // namespace qwalk::tomo
