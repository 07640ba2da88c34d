//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sage/molecule.hpp"

namespace sage {

/// Reads SMILES into an unvalidated graph: organic subset, bracket atoms with
/// charge and hydrogen count, branches, ring closures (digits and %nn) and
/// bond symbols. Stereo marks (/ \ @) are accepted and discarded. Throws
/// ParseError for syntax errors, unmatched ring closures, unsupported
/// elements and multi-fragment input ('.'). Valence is not checked.
AtomGraph read_smiles_graph(std::string_view text);

/// read_smiles_graph followed by Molecule::from_graph.
Molecule parse_smiles(std::string_view text);

/// False when a bracket atom's hydrogens leave it below every standard
/// valence for its element and charge.
bool is_radical_free(const AtomGraph &graph);
bool is_radical_free(const Molecule &mol);

/// Deterministic, atom-order-invariant kekulized SMILES.
std::string canonical_smiles(const Molecule &mol);

/// A valid SMILES for `mol` from a random traversal; reparses to the same
/// graph. Used to probe canonical and fingerprint invariance.
std::string random_smiles(const Molecule &mol, std::mt19937_64 &rng);

/// Canonical form of a SMILES string; throws ParseError.
std::string canonicalize(std::string_view smiles);

/// Reads a molecule list: UTF-8, one SMILES per line (first whitespace
/// separated field), blank lines and '#' comment lines ignored.
std::vector<std::string> read_smiles_lines(std::string_view content);
/// Throws IoError when the file cannot be read.
std::vector<std::string> read_smiles_file(const std::string &path);

}  // namespace sage
