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

#include <iosfwd>
#include <string>

#include "qwalk/spinsys.hpp"

// Built-in molecule registers and their JSON serialization.

namespace qwalk::nmr {

/// Four weakly coupled carbons (crotonic-acid-like): well-resolved shifts,
/// every pair coupled. Spin order C1, C2, C3, C4.
Molecule crotonic_like();

/// Two strongly coupled carbons plus a proton (trichloroethylene-like):
/// C1 on carrier, C2 at -10.5 J12, J12 flagged strong. Spin order C1, C2, H.
Molecule tce_like();

/// The isolated carbon pair of tce_like() with a configurable shift-to-J
/// ratio: offsets 0 and -ratio*j_hz, coupled at j_hz under `model`.
Molecule carbon_pair(double ratio, double j_hz = 100.0,
                     PairModel model = PairModel::Strong);

std::string to_json(const Molecule& m);
Molecule molecule_from_json(const std::string& text);

Molecule load_molecule(const std::string& path);
void save_molecule(const Molecule& m, const std::string& path);

}  // namespace qwalk::nmr
