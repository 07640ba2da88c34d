//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "sage/molecule.hpp"

namespace sage {

enum class AmineType { kPrimary, kSecondary, kTertiary, kCyclic, kPoly, kNotAmine };

enum class Restriction { kNone, kPrimarySecondary, kTertiaryCyclicPoly };

struct AmineSite {
  int atom_index = -1;
  int h_count = 0;
  bool in_ring = false;
};

/// Neutral, saturated nitrogens with one to three heavy neighbours that are
/// not part of an aromatic ring and not attached to a C=O or C=S carbon.
std::vector<AmineSite> find_amine_sites(const Molecule &mol);

AmineType classify_amine(const Molecule &mol);
AmineType classify_amine(const std::vector<AmineSite> &sites);

bool is_amine(const Molecule &mol);

bool matches_restriction(AmineType type, Restriction restriction);

/// Lowercase names: primary, secondary, tertiary, cyclic, poly, not-amine.
std::string_view to_string(AmineType type);
std::optional<AmineType> amine_type_from_string(std::string_view name);

/// none, primary-secondary, tertiary-cyclic-poly.
std::string_view to_string(Restriction restriction);
std::optional<Restriction> restriction_from_string(std::string_view name);

}  // namespace sage
