//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/formula.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <vector>

namespace sage {

int MolecularFormula::count(Element e) const {
  auto it = counts.find(e);
  return it == counts.end() ? 0 : it->second;
}

MolecularFormula molecular_formula(const Molecule &mol) {
  MolecularFormula f;
  int hydrogens = 0;
  for (int i = 0; i < static_cast<int>(mol.atom_count()); ++i) {
    ++f.counts[mol.atom(i).element];
    hydrogens += mol.hydrogen_count(i);
  }
  if (hydrogens > 0) f.counts[Element::H] += hydrogens;
  return f;
}

std::string to_string(const MolecularFormula &formula) {
  std::vector<std::pair<std::string, int>> parts;
  for (const auto &[e, n] : formula.counts)
    if (n > 0) parts.emplace_back(std::string(element_symbol(e)), n);
  const bool carbon = formula.count(Element::C) > 0;
  std::sort(parts.begin(), parts.end(), [&](const auto &a, const auto &b) {
    auto key = [&](const std::string &s) {
      if (carbon && s == "C") return 0;
      if (carbon && s == "H") return 1;
      return 2;
    };
    if (key(a.first) != key(b.first)) return key(a.first) < key(b.first);
    return a.first < b.first;
  });
  std::string out;
  for (const auto &[sym, n] : parts) {
    out += sym;
    if (n > 1) out += std::to_string(n);
  }
  return out;
}

MolecularFormula parse_formula(std::string_view text) {
  MolecularFormula f;
  std::size_t i = 0;
  if (text.empty()) throw std::invalid_argument("empty formula");
  while (i < text.size()) {
    if (!std::isupper(static_cast<unsigned char>(text[i])))
      throw std::invalid_argument("malformed formula '" + std::string(text) + "'");
    std::string sym(1, text[i++]);
    if (i < text.size() && std::islower(static_cast<unsigned char>(text[i])))
      sym += text[i++];
    auto e = element_from_symbol(sym);
    if (!e) throw std::invalid_argument("unsupported element '" + sym + "'");
    int n = 0;
    bool digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      n = n * 10 + (text[i++] - '0');
      digits = true;
    }
    f.counts[*e] += digits ? n : 1;
  }
  return f;
}

double molecular_weight(const MolecularFormula &formula) {
  double w = 0.0;
  for (const auto &[e, n] : formula.counts) w += atomic_mass(e) * n;
  return w;
}

double molecular_weight(const Molecule &mol) {
  return molecular_weight(molecular_formula(mol));
}

}  // namespace sage
