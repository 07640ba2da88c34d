//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/element.hpp"

#include <array>
#include <cstdlib>
#include <utility>

namespace sage {
namespace {

struct ElementInfo {
  Element element;
  std::string_view symbol;
  double mass;
  bool organic;
};

constexpr std::array<ElementInfo, 11> kElements{{
    {Element::H, "H", 1.0080, false},
    {Element::B, "B", 10.8100, true},
    {Element::C, "C", 12.0110, true},
    {Element::N, "N", 14.0070, true},
    {Element::O, "O", 15.9990, true},
    {Element::F, "F", 18.9984, true},
    {Element::P, "P", 30.9738, true},
    {Element::S, "S", 32.0600, true},
    {Element::Cl, "Cl", 35.4500, true},
    {Element::Br, "Br", 79.9040, true},
    {Element::I, "I", 126.9045, true},
}};

const ElementInfo &info(Element e) {
  for (const auto &i : kElements)
    if (i.element == e) return i;
  std::abort();
}

std::vector<int> base_valences(Element e) {
  switch (e) {
  case Element::H:
  case Element::F:
  case Element::Cl:
  case Element::Br:
  case Element::I:
    return {1};
  case Element::B:
  case Element::N:
    return {3};
  case Element::C:
    return {4};
  case Element::O:
    return {2};
  case Element::P:
    return {3, 5};
  case Element::S:
    return {2, 4, 6};
  }
  return {};
}

}  // namespace

std::string_view element_symbol(Element e) { return info(e).symbol; }

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (const auto &i : kElements)
    if (i.symbol == symbol) return i.element;
  return std::nullopt;
}

bool in_organic_subset(Element e) { return info(e).organic; }

double atomic_mass(Element e) { return info(e).mass; }

std::vector<int> allowed_valences(Element e, int charge) {
  std::vector<int> out;
  for (int v : base_valences(e)) {
    int shifted = v;
    switch (e) {
    case Element::C:
    case Element::H:
      shifted = v - std::abs(charge);
      break;
    case Element::B:
      shifted = v - charge;
      break;
    default:
      // Groups 15-17: a cation gains a bond (ammonium), an anion loses one.
      shifted = v + charge;
      break;
    }
    if (shifted >= 0) out.push_back(shifted);
  }
  return out;
}

std::optional<int> default_implicit_hydrogens(Element e, int bond_order_sum) {
  for (int v : allowed_valences(e, 0))
    if (v >= bond_order_sum) return v - bond_order_sum;
  return std::nullopt;
}

}  // namespace sage
