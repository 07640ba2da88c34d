//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/reference.hpp"

#include <array>

namespace sage {
namespace {

using enum AmineType;

constexpr std::array<ReferenceAmine, 23> kAmines{{
    {"MEA", "NCCO", kPrimary, 61.084},
    {"AHMPD", "NC(CO)(CO)CO", kPrimary, 121.136},
    {"DEA", "OCCNCCO", kSecondary, 105.137},
    {"DA", "CCNCC", kSecondary, 73.139},
    {"DEEA", "CCN(CC)CCO", kTertiary, 117.192},
    {"MDEA", "CN(CCO)CCO", kTertiary, 119.164},
    {"2-MPZ", "CC1CNCCN1", kCyclic, 100.165},
    {"2-PPE", "OCCC1CCCCN1", kCyclic, 129.203},
    {"HomoPZ", "C1CNCCNC1", kCyclic, 100.165},
    {"DETA", "NCCNCCN", kPoly, 103.169},
    {"AMP", "CC(C)(N)CO", kPrimary, 89.138},
    {"IPA", "CC(C)N", kPrimary, 59.112},
    {"IPAP", "CC(C)NCCCO", kSecondary, 117.192},
    {"4DMA1B", "CN(C)CCCCO", kTertiary, 117.192},
    {"1DMA2P", "CC(O)CN(C)C", kTertiary, 103.165},
    {"1-MPZ", "CN1CCNCC1", kCyclic, 100.165},
    {"EPZ", "CCN1CCNCC1", kCyclic, 114.192},
    {"PZ", "C1CNCCN1", kCyclic, 86.138},
    {"AEP", "NCCN1CCNCC1", kCyclic, 129.207},
    {"TETA", "NCCNCCNCCN", kPoly, 146.238},
    {"DEAE-EO", "CCN(CC)CCOCCO", kTertiary, 161.245},
    {"1M-2PPE", "CN1CCCCC1CO", kCyclic, 129.203},
    {"1-(2HE)PP", "OCCN1CCCCC1", kCyclic, 129.203},
}};

}  // namespace

std::span<const ReferenceAmine> reference_amines() { return kAmines; }

std::optional<ReferenceAmine> find_reference_amine(std::string_view name) {
  for (const auto &a : kAmines)
    if (a.name == name) return a;
  return std::nullopt;
}

}  // namespace sage
