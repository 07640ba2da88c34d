//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Internal: graph ranking and DFS string emission shared by the SMILES
// writer, canonicalization and rank-guided kekulization.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sage/molecule.hpp"

namespace sage::detail {

struct WriterGraph {
  std::vector<std::string> atom_text;
  std::vector<std::vector<std::pair<int, BondOrder>>> adj;

  std::size_t size() const { return atom_text.size(); }
};

/// Emits a SMILES-like DFS string. Traversal starts at the lowest-ranked atom
/// and visits neighbors in ascending rank.
std::string write_dfs(const WriterGraph &graph, std::span<const int> rank);

/// Total order of atoms, invariant to input numbering. Partition refinement
/// over `invariants` and neighbor ranks; residual ties are broken by trying
/// each member of the first tied class and keeping the branch whose DFS
/// string is lexicographically smallest. The winning string is returned via
/// `best` when non-null.
std::vector<int> canonical_ranks(const WriterGraph &graph,
                                 std::span<const std::uint64_t> invariants,
                                 std::string *best = nullptr);

/// Writer view of a validated molecule (kekulized, organic subset when
/// possible), together with its canonical atom invariants.
WriterGraph writer_graph(const Molecule &mol);
std::vector<std::uint64_t> atom_invariants(const Molecule &mol);

/// Bracket/organic text for one atom with a known total hydrogen count.
std::string atom_text(const Atom &atom, int bond_order_sum, int hydrogens);

}  // namespace sage::detail
