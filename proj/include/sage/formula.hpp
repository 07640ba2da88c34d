//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <string>
#include <string_view>

#include "sage/molecule.hpp"

namespace sage {

struct MolecularFormula {
  std::map<Element, int> counts;

  int count(Element e) const;
  bool operator==(const MolecularFormula &) const = default;
};

/// Element counts including implicit, bracket and graph-node hydrogens.
MolecularFormula molecular_formula(const Molecule &mol);

/// Hill order: C, H, then the rest alphabetically (alphabetical throughout
/// when there is no carbon).
std::string to_string(const MolecularFormula &formula);

/// Parses a Hill-style formula such as "C4H11NO". Throws
/// std::invalid_argument on malformed text or unsupported elements.
MolecularFormula parse_formula(std::string_view text);

double molecular_weight(const MolecularFormula &formula);
double molecular_weight(const Molecule &mol);

}  // namespace sage
