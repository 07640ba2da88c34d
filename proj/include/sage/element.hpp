//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sage {

// Values are atomic numbers.
enum class Element : std::uint8_t {
  H = 1,
  B = 5,
  C = 6,
  N = 7,
  O = 8,
  F = 9,
  P = 15,
  S = 16,
  Cl = 17,
  Br = 35,
  I = 53,
};

constexpr int atomic_number(Element e) { return static_cast<int>(e); }

std::string_view element_symbol(Element e);

/// Looks up a supported element by its (capitalized) symbol.
std::optional<Element> element_from_symbol(std::string_view symbol);

/// True for the elements that may be written outside brackets in SMILES.
bool in_organic_subset(Element e);

/// Standard atomic mass, rounded to four decimals.
double atomic_mass(Element e);

/// Allowed total valences (bond-order sum plus hydrogens) for an element
/// carrying `charge`, ascending. Empty when no valence is possible.
std::vector<int> allowed_valences(Element e, int charge);

/// Hydrogens an organic-subset atom receives for a given bond-order sum,
/// or nullopt when the sum exceeds every allowed valence.
std::optional<int> default_implicit_hydrogens(Element e, int bond_order_sum);

}  // namespace sage
