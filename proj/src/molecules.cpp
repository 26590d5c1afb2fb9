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

#include "qwalk/molecules.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qwalk::nmr {

namespace {

std::string model_name(PairModel model) {
  return model == PairModel::Strong ? "strong" : "ising";
}

PairModel model_from_name(const std::string& name) {
  if (name == "strong") return PairModel::Strong;
  if (name == "ising") return PairModel::Ising;
  throw std::invalid_argument("molecule json: unknown pair model " + name);
}

}  // namespace

Molecule crotonic_like() {
  Molecule m;
  m.name = "crotonic";
  m.spins = {{"C1", -4850.0}, {"C2", -1320.0}, {"C3", 2230.0}, {"C4", 5610.0}};
  m.couplings = {{0, 1, 41.6, PairModel::Ising}, {0, 2, 1.5, PairModel::Ising},
                 {0, 3, 7.1, PairModel::Ising},  {1, 2, 69.7, PairModel::Ising},
                 {1, 3, 1.2, PairModel::Ising},  {2, 3, 72.4, PairModel::Ising}};
  return m;
}

Molecule tce_like() {
  Molecule m;
  m.name = "tce";
  m.spins = {{"C1", 0.0}, {"C2", -1050.0}, {"H", 0.0}};
  m.couplings = {{0, 1, 100.0, PairModel::Strong},
                 {0, 2, 201.0, PairModel::Ising},
                 {1, 2, 9.0, PairModel::Ising}};
  return m;
}

Molecule carbon_pair(double ratio, double j_hz, PairModel model) {
  Molecule m;
  m.name = "carbon-pair";
  m.spins = {{"C1", 0.0}, {"C2", -ratio * j_hz}};
  m.couplings = {{0, 1, j_hz, model}};
  m.validate();
  return m;
}

std::string to_json(const Molecule& m) {
  m.validate();
  nlohmann::json j;
  j["name"] = m.name;
  j["spins"] = nlohmann::json::array();
  for (const auto& s : m.spins)
    j["spins"].push_back({{"name", s.name}, {"offset_hz", s.offset_hz}});
  j["couplings"] = nlohmann::json::array();
  for (const auto& c : m.couplings)
    j["couplings"].push_back({{"i", c.i},
                              {"j", c.j},
                              {"j_hz", c.j_hz},
                              {"model", model_name(c.model)}});
  return j.dump(2) + "\n";
}

Molecule molecule_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("molecule json: ") + e.what());
  }
  try {
    Molecule m;
    m.name = j.at("name").get<std::string>();
    for (const auto& s : j.at("spins"))
      m.spins.push_back({s.at("name").get<std::string>(),
                         s.at("offset_hz").get<double>()});
    for (const auto& c : j.value("couplings", nlohmann::json::array()))
      m.couplings.push_back({c.at("i").get<int>(), c.at("j").get<int>(),
                             c.at("j_hz").get<double>(),
                             model_from_name(c.value("model", "ising"))});
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("molecule json: ") + e.what());
  }
}

Molecule load_molecule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open molecule file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return molecule_from_json(buffer.str());
}

void save_molecule(const Molecule& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write molecule file " + path);
  out << to_json(m);
}

}  // namespace qwalk::nmr
