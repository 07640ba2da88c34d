//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "sage/molecule.hpp"

namespace sage {

/// A ring as its atom indices in cyclic order.
using Ring = std::vector<int>;

/// Smallest set of smallest rings (a minimum cycle basis). For a connected
/// molecule the count equals bonds - atoms + 1.
std::vector<Ring> perceive_rings(const Molecule &mol);

/// Per-atom flag for membership in a 5- or 6-membered ring that satisfies
/// Huckel's rule on the kekulized structure. Fused systems are handled ring
/// by ring, with exocyclic double bonds to ring atoms donating one electron.
std::vector<bool> aromatic_atoms(const Molecule &mol);

/// Shortest path lengths (in bonds) between all atom pairs; -1 if unreachable.
std::vector<std::vector<int>> topological_distances(const Molecule &mol);

}  // namespace sage
