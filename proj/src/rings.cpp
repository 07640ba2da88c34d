//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/rings.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>

namespace sage {
namespace {

using BondSet = std::vector<std::uint64_t>;

bool test(const BondSet &s, int bit) { return (s[bit / 64] >> (bit % 64)) & 1u; }
void flip(BondSet &s, int bit) { s[bit / 64] ^= std::uint64_t{1} << (bit % 64); }

int lowest_bit(const BondSet &s) {
  for (std::size_t w = 0; w < s.size(); ++w)
    if (s[w] != 0) return static_cast<int>(w * 64) + __builtin_ctzll(s[w]);
  return -1;
}

struct BfsTree {
  std::vector<int> dist;
  std::vector<int> parent_bond;
};

BfsTree bfs(const Molecule &mol, int root) {
  const int n = static_cast<int>(mol.atom_count());
  BfsTree t{std::vector<int>(n, -1), std::vector<int>(n, -1)};
  std::queue<int> q;
  t.dist[root] = 0;
  q.push(root);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto &nb : mol.neighbors(u)) {
      if (t.dist[nb.atom] != -1) continue;
      t.dist[nb.atom] = t.dist[u] + 1;
      t.parent_bond[nb.atom] = nb.bond;
      q.push(nb.atom);
    }
  }
  return t;
}

Ring ordered_atoms(const Molecule &mol, const BondSet &bonds) {
  std::vector<int> members;
  for (int b = 0; b < static_cast<int>(mol.bond_count()); ++b)
    if (test(bonds, b)) members.push_back(b);
  Ring ring;
  int start = mol.bond(members.front()).begin;
  int prev_bond = -1, cur = start;
  do {
    ring.push_back(cur);
    for (int b : members) {
      if (b == prev_bond) continue;
      const Bond &bd = mol.bond(b);
      if (bd.begin == cur || bd.end == cur) {
        prev_bond = b;
        cur = bd.other(cur);
        break;
      }
    }
  } while (cur != start && ring.size() <= members.size());
  return ring;
}

}  // namespace

std::vector<Ring> perceive_rings(const Molecule &mol) {
  const int n = static_cast<int>(mol.atom_count());
  const int m = static_cast<int>(mol.bond_count());
  const int needed = m - n + 1;
  if (needed <= 0) return {};
  const std::size_t words = (m + 63) / 64;

  // Horton candidates: for each root x and bond (u, v), the cycle formed by
  // the tree paths x->u, x->v and the bond, when the paths only share x.
  std::set<std::pair<int, BondSet>> candidates;
  for (int x = 0; x < n; ++x) {
    const BfsTree t = bfs(mol, x);
    auto path = [&](int v) {
      std::vector<int> atoms{v};
      BondSet bonds(words, 0);
      while (v != x) {
        const int b = t.parent_bond[v];
        flip(bonds, b);
        v = mol.bond(b).other(v);
        atoms.push_back(v);
      }
      return std::make_pair(atoms, bonds);
    };
    for (int b = 0; b < m; ++b) {
      if (!mol.bond_in_ring(b)) continue;
      const Bond &bd = mol.bond(b);
      auto [pu_atoms, pu] = path(bd.begin);
      auto [pv_atoms, pv] = path(bd.end);
      std::sort(pu_atoms.begin(), pu_atoms.end());
      std::sort(pv_atoms.begin(), pv_atoms.end());
      std::vector<int> shared;
      std::set_intersection(pu_atoms.begin(), pu_atoms.end(), pv_atoms.begin(),
                            pv_atoms.end(), std::back_inserter(shared));
      if (shared.size() != 1) continue;
      BondSet cycle(words, 0);
      for (std::size_t w = 0; w < words; ++w) cycle[w] = pu[w] | pv[w];
      if (test(cycle, b)) continue;
      flip(cycle, b);
      const int size = t.dist[bd.begin] + t.dist[bd.end] + 1;
      if (size < 3) continue;
      candidates.emplace(size, std::move(cycle));
    }
  }

  std::vector<BondSet> basis;
  std::vector<int> pivots;
  std::vector<Ring> rings;
  for (const auto &[size, cycle] : candidates) {
    BondSet v = cycle;
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (test(v, pivots[i]))
        for (std::size_t w = 0; w < words; ++w) v[w] ^= basis[i][w];
    const int p = lowest_bit(v);
    if (p < 0) continue;
    basis.push_back(std::move(v));
    pivots.push_back(p);
    rings.push_back(ordered_atoms(mol, cycle));
    if (static_cast<int>(rings.size()) == needed) break;
  }
  return rings;
}

std::vector<bool> aromatic_atoms(const Molecule &mol) {
  std::vector<bool> out(mol.atom_count(), false);
  for (const Ring &ring : perceive_rings(mol)) {
    if (ring.size() != 5 && ring.size() != 6) continue;
    std::vector<bool> member(mol.atom_count(), false);
    for (int a : ring) member[a] = true;
    int electrons = 0;
    bool ok = true;
    for (int a : ring) {
      const Atom &atom = mol.atom(a);
      int in_ring_double = 0, fused_double = 0, exo_double = 0;
      bool triple = false;
      for (const auto &nb : mol.neighbors(a)) {
        const BondOrder o = mol.bond(nb.bond).order;
        if (o == BondOrder::kTriple) triple = true;
        if (o != BondOrder::kDouble) continue;
        if (member[nb.atom])
          ++in_ring_double;
        else if (mol.atom(nb.atom).in_ring &&
                 (mol.atom(nb.atom).element == Element::C ||
                  mol.atom(nb.atom).element == Element::N))
          ++fused_double;
        else
          ++exo_double;
      }
      if (triple || in_ring_double + fused_double > 1) {
        ok = false;
        break;
      }
      if (in_ring_double + fused_double == 1) {
        electrons += 1;
        continue;
      }
      if (exo_double == 1) continue;  // e.g. ring C=O donates nothing
      const Element e = atom.element;
      const bool lone_pair =
          ((e == Element::N || e == Element::P) && atom.formal_charge == 0 &&
           mol.degree(a) + mol.hydrogen_count(a) == 3) ||
          ((e == Element::O || e == Element::S) && atom.formal_charge == 0 &&
           mol.degree(a) == 2) ||
          (e == Element::C && atom.formal_charge == -1);
      if (lone_pair) {
        electrons += 2;
        continue;
      }
      if (e == Element::B || (e == Element::C && atom.formal_charge == 1))
        continue;
      ok = false;
      break;
    }
    if (ok && electrons % 4 == 2)
      for (int a : ring) out[a] = true;
  }
  return out;
}

std::vector<std::vector<int>> topological_distances(const Molecule &mol) {
  const int n = static_cast<int>(mol.atom_count());
  std::vector<std::vector<int>> d(n);
  for (int i = 0; i < n; ++i) d[i] = bfs(mol, i).dist;
  return d;
}

}  // namespace sage
