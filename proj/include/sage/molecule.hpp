//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/element.hpp"

namespace sage {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

/// Contribution of a (kekulized) bond to the valence of its atoms.
constexpr int valence_contribution(BondOrder o) {
  return o == BondOrder::kAromatic ? 1 : static_cast<int>(o);
}

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;
  // Only set for atoms written in brackets.
  std::optional<int> explicit_h;
  // Written in lowercase in the input. Informational once kekulized.
  bool aromatic = false;
  bool in_ring = false;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == begin ? end : begin; }
};

/// An unvalidated molecular graph: what the SMILES reader produces and what
/// the graph-editing operators manipulate before revalidation.
struct AtomGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  int add_atom(Atom atom);
  void add_bond(int a, int b, BondOrder order);
  /// Index of the bond joining a and b, or -1.
  int find_bond(int a, int b) const;
  void remove_bond(int index);
};

enum class ParseErrorKind {
  kSyntax,
  kValence,
  kDisconnected,
  kUnsupportedElement,
  kRingClosure,
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
public:
  ParseError(ParseErrorKind kind, const std::string &what,
             std::ptrdiff_t position = -1);

  ParseErrorKind kind() const noexcept { return kind_; }
  // Character offset into the input, or -1 when not tied to a position.
  std::ptrdiff_t position() const noexcept { return position_; }

private:
  ParseErrorKind kind_;
  std::ptrdiff_t position_;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Immutable, validated molecular graph. All bonds are kekulized; every atom
/// has a standard valence for its element and charge; the graph is connected.
class Molecule {
public:
  /// Validates and kekulizes `graph`. Throws ParseError (kValence,
  /// kDisconnected) when the graph cannot be a molecule.
  static Molecule from_graph(AtomGraph graph);

  std::size_t atom_count() const { return atoms_.size(); }
  std::size_t bond_count() const { return bonds_.size(); }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }

  std::span<const Neighbor> neighbors(int atom) const {
    return {adjacency_.data() + offsets_[atom],
            adjacency_.data() + offsets_[atom + 1]};
  }
  int degree(int atom) const { return offsets_[atom + 1] - offsets_[atom]; }
  int heavy_degree(int atom) const;
  int bond_order_sum(int atom) const;

  int implicit_hydrogens(int atom) const { return implicit_h_[atom]; }
  /// Implicit plus bracket hydrogens. Hydrogen atoms present as graph nodes
  /// are not included.
  int hydrogen_count(int atom) const;

  bool bond_in_ring(int bond) const { return bond_in_ring_[bond]; }
  int heavy_atom_count() const;
  int bond_index(int a, int b) const;

  /// Editable copy with atoms normalized to organic-subset form wherever the
  /// default hydrogen count reproduces the atom, so edits re-derive hydrogens.
  AtomGraph to_graph() const;

private:
  Molecule() = default;

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> implicit_h_;
  std::vector<int> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<bool> bond_in_ring_;
};

/// Bonds whose removal does not disconnect the graph, as a per-bond mask.
std::vector<bool> ring_bond_mask(std::size_t atom_count,
                                 std::span<const Bond> bonds);

/// Assigns single/double orders to aromatic bonds. `priority` orders atoms
/// for the deterministic matching search (lower first). Returns false when no
/// Kekulé structure exists.
bool kekulize(AtomGraph &graph, std::span<const int> priority);

}  // namespace sage
