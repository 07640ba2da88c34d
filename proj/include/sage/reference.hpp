//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "sage/chemclass.hpp"

namespace sage {

/// A known CO2-capture amine used as a benchmark target.
struct ReferenceAmine {
  std::string_view name;
  std::string_view smiles;
  AmineType type;
  double molecular_weight;
};

/// The 23 benchmark amines: rediscovery targets first, then similarity and
/// median-similarity targets.
std::span<const ReferenceAmine> reference_amines();

std::optional<ReferenceAmine> find_reference_amine(std::string_view name);

}  // namespace sage
