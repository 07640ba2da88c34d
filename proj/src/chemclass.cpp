//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/chemclass.hpp"

#include <array>
#include <utility>

#include "sage/rings.hpp"

namespace sage {
namespace {

bool carbonyl_like(const Molecule &mol, int carbon) {
  for (const auto &nb : mol.neighbors(carbon)) {
    const Element e = mol.atom(nb.atom).element;
    if ((e == Element::O || e == Element::S) &&
        mol.bond(nb.bond).order == BondOrder::kDouble)
      return true;
  }
  return false;
}

constexpr std::array<std::pair<AmineType, std::string_view>, 6> kTypeNames{{
    {AmineType::kPrimary, "primary"},
    {AmineType::kSecondary, "secondary"},
    {AmineType::kTertiary, "tertiary"},
    {AmineType::kCyclic, "cyclic"},
    {AmineType::kPoly, "poly"},
    {AmineType::kNotAmine, "not-amine"},
}};

constexpr std::array<std::pair<Restriction, std::string_view>, 3> kRestrictionNames{{
    {Restriction::kNone, "none"},
    {Restriction::kPrimarySecondary, "primary-secondary"},
    {Restriction::kTertiaryCyclicPoly, "tertiary-cyclic-poly"},
}};

}  // namespace

std::vector<AmineSite> find_amine_sites(const Molecule &mol) {
  std::vector<AmineSite> sites;
  std::vector<bool> aromatic;
  for (int i = 0; i < static_cast<int>(mol.atom_count()); ++i) {
    const Atom &a = mol.atom(i);
    if (a.element != Element::N || a.formal_charge != 0) continue;
    const int h = mol.hydrogen_count(i) + mol.degree(i) - mol.heavy_degree(i);
    if (h > 2 || mol.heavy_degree(i) == 0) continue;
    bool ok = true;
    for (const auto &nb : mol.neighbors(i)) {
      if (mol.bond(nb.bond).order != BondOrder::kSingle ||
          (mol.atom(nb.atom).element == Element::C && carbonyl_like(mol, nb.atom))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (a.in_ring) {
      if (aromatic.empty()) aromatic = aromatic_atoms(mol);
      if (aromatic[i]) continue;
    }
    sites.push_back({i, h, a.in_ring});
  }
  return sites;
}

AmineType classify_amine(const std::vector<AmineSite> &sites) {
  if (sites.empty()) return AmineType::kNotAmine;
  for (const AmineSite &s : sites)
    if (s.in_ring) return AmineType::kCyclic;
  if (sites.size() >= 2) return AmineType::kPoly;
  switch (sites.front().h_count) {
    case 2: return AmineType::kPrimary;
    case 1: return AmineType::kSecondary;
    default: return AmineType::kTertiary;
  }
}

AmineType classify_amine(const Molecule &mol) {
  return classify_amine(find_amine_sites(mol));
}

bool is_amine(const Molecule &mol) { return !find_amine_sites(mol).empty(); }

bool matches_restriction(AmineType type, Restriction restriction) {
  if (type == AmineType::kNotAmine) return false;
  switch (restriction) {
    case Restriction::kNone: return true;
    case Restriction::kPrimarySecondary:
      return type == AmineType::kPrimary || type == AmineType::kSecondary;
    case Restriction::kTertiaryCyclicPoly:
      return type == AmineType::kTertiary || type == AmineType::kCyclic ||
             type == AmineType::kPoly;
  }
  return false;
}

std::string_view to_string(AmineType type) {
  for (const auto &[t, name] : kTypeNames)
    if (t == type) return name;
  return "?";
}

std::optional<AmineType> amine_type_from_string(std::string_view name) {
  for (const auto &[t, n] : kTypeNames)
    if (n == name) return t;
  return std::nullopt;
}

std::string_view to_string(Restriction restriction) {
  for (const auto &[r, name] : kRestrictionNames)
    if (r == restriction) return name;
  return "?";
}

std::optional<Restriction> restriction_from_string(std::string_view name) {
  for (const auto &[r, n] : kRestrictionNames)
    if (n == name) return r;
  return std::nullopt;
}

}  // namespace sage
