//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/molecule.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <utility>

#include "canon.hpp"

namespace sage {

int AtomGraph::add_atom(Atom atom) {
  atoms.push_back(std::move(atom));
  return static_cast<int>(atoms.size()) - 1;
}

void AtomGraph::add_bond(int a, int b, BondOrder order) {
  bonds.push_back({a, b, order});
}

int AtomGraph::find_bond(int a, int b) const {
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    const Bond &bd = bonds[i];
    if ((bd.begin == a && bd.end == b) || (bd.begin == b && bd.end == a))
      return static_cast<int>(i);
  }
  return -1;
}

void AtomGraph::remove_bond(int index) {
  bonds.erase(bonds.begin() + index);
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
  case ParseErrorKind::kSyntax:
    return "Syntax";
  case ParseErrorKind::kValence:
    return "Valence";
  case ParseErrorKind::kDisconnected:
    return "Disconnected";
  case ParseErrorKind::kUnsupportedElement:
    return "UnsupportedElement";
  case ParseErrorKind::kRingClosure:
    return "RingClosure";
  }
  return "Unknown";
}

ParseError::ParseError(ParseErrorKind kind, const std::string &what,
                       std::ptrdiff_t position)
    : std::runtime_error(what), kind_(kind), position_(position) {}

std::vector<bool> ring_bond_mask(std::size_t atom_count,
                                 std::span<const Bond> bonds) {
  const int n = static_cast<int>(atom_count);
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    adj[bonds[i].begin].emplace_back(bonds[i].end, static_cast<int>(i));
    adj[bonds[i].end].emplace_back(bonds[i].begin, static_cast<int>(i));
  }
  // Tarjan bridge finding; a bond is in a ring iff it is not a bridge.
  std::vector<bool> in_ring(bonds.size(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int u, int via) {
    disc[u] = low[u] = timer++;
    for (const auto &[v, b] : adj[u]) {
      if (b == via) continue;
      if (disc[v] == -1) {
        dfs(v, b);
        low[u] = std::min(low[u], low[v]);
        if (low[v] > disc[u]) in_ring[b] = false;
      } else {
        low[u] = std::min(low[u], disc[v]);
      }
    }
  };
  for (int i = 0; i < n; ++i)
    if (disc[i] == -1) dfs(i, -1);
  return in_ring;
}

namespace {

int raw_bond_sum(const AtomGraph &g, int atom) {
  int s = 0;
  for (const Bond &b : g.bonds)
    if (b.begin == atom || b.end == atom) s += valence_contribution(b.order);
  return s;
}

// Whether an aromatic atom must receive one double bond from the matching.
bool needs_pi_bond(const AtomGraph &g, int atom) {
  const Atom &a = g.atoms[atom];
  const int used = raw_bond_sum(g, atom) + a.explicit_h.value_or(0);
  for (int v : allowed_valences(a.element, a.formal_charge))
    if (v >= used) return v - used >= 1;
  return false;
}

}  // namespace

bool kekulize(AtomGraph &graph, std::span<const int> priority) {
  const int n = static_cast<int>(graph.atoms.size());
  std::vector<std::vector<std::pair<int, int>>> arom(n);
  for (std::size_t i = 0; i < graph.bonds.size(); ++i) {
    const Bond &b = graph.bonds[i];
    if (b.order != BondOrder::kAromatic) continue;
    arom[b.begin].emplace_back(b.end, static_cast<int>(i));
    arom[b.end].emplace_back(b.begin, static_cast<int>(i));
  }
  std::vector<bool> need(n, false);
  for (int i = 0; i < n; ++i)
    need[i] = !arom[i].empty() && needs_pi_bond(graph, i);

  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (need[i]) order.push_back(i);
  auto by_priority = [&](int a, int b) { return priority[a] < priority[b]; };
  std::sort(order.begin(), order.end(), by_priority);
  for (auto &list : arom)
    std::sort(list.begin(), list.end(), [&](const auto &a, const auto &b) {
      return priority[a.first] < priority[b.first];
    });

  std::vector<int> mate_bond(n, -1);
  std::function<bool(std::size_t)> solve = [&](std::size_t pos) -> bool {
    while (pos < order.size() && mate_bond[order[pos]] != -1) ++pos;
    if (pos == order.size()) return true;
    const int u = order[pos];
    for (const auto &[v, b] : arom[u]) {
      if (!need[v] || mate_bond[v] != -1) continue;
      mate_bond[u] = mate_bond[v] = b;
      if (solve(pos + 1)) return true;
      mate_bond[u] = mate_bond[v] = -1;
    }
    return false;
  };
  if (!solve(0)) return false;

  for (std::size_t i = 0; i < graph.bonds.size(); ++i) {
    Bond &b = graph.bonds[i];
    if (b.order != BondOrder::kAromatic) continue;
    b.order = mate_bond[b.begin] == static_cast<int>(i) ? BondOrder::kDouble
                                                        : BondOrder::kSingle;
  }
  return true;
}

namespace {

// Canonical priority of the pre-kekulization graph so the chosen Kekulé
// structure does not depend on input atom order.
std::vector<int> aromatic_priority(const AtomGraph &g,
                                   const std::vector<bool> &ring_atom) {
  const int n = static_cast<int>(g.atoms.size());
  detail::WriterGraph wg;
  wg.atom_text.resize(n);
  wg.adj.resize(n);
  std::vector<std::uint64_t> inv(n);
  std::vector<int> degree(n, 0);
  for (const Bond &b : g.bonds) {
    wg.adj[b.begin].emplace_back(b.end, b.order);
    wg.adj[b.end].emplace_back(b.begin, b.order);
    ++degree[b.begin];
    ++degree[b.end];
  }
  for (int i = 0; i < n; ++i) {
    const Atom &a = g.atoms[i];
    const int h = a.explicit_h.value_or(15);
    std::string text(element_symbol(a.element));
    if (a.aromatic) text[0] = static_cast<char>(text[0] - 'A' + 'a');
    wg.atom_text[i] = "[" + text + "H" + std::to_string(h) + ":" +
                      std::to_string(a.formal_charge) + "]";
    inv[i] = (static_cast<std::uint64_t>(atomic_number(a.element)) << 32) |
             (static_cast<std::uint64_t>(a.formal_charge + 64) << 24) |
             (static_cast<std::uint64_t>(degree[i]) << 16) |
             (static_cast<std::uint64_t>(h) << 8) |
             (static_cast<std::uint64_t>(a.aromatic) << 1) |
             (ring_atom[i] ? 1u : 0u);
  }
  return detail::canonical_ranks(wg, inv);
}

}  // namespace

Molecule Molecule::from_graph(AtomGraph graph) {
  const int n = static_cast<int>(graph.atoms.size());
  if (n == 0) throw ParseError(ParseErrorKind::kSyntax, "empty molecule");

  for (std::size_t i = 0; i < graph.bonds.size(); ++i) {
    const Bond &b = graph.bonds[i];
    if (b.begin == b.end || b.begin < 0 || b.end < 0 || b.begin >= n ||
        b.end >= n)
      throw ParseError(ParseErrorKind::kRingClosure, "invalid bond endpoints");
    for (std::size_t j = 0; j < i; ++j) {
      const Bond &c = graph.bonds[j];
      if ((c.begin == b.begin && c.end == b.end) ||
          (c.begin == b.end && c.end == b.begin))
        throw ParseError(ParseErrorKind::kRingClosure, "duplicate bond");
    }
  }

  {
    std::vector<std::vector<int>> adj(n);
    for (const Bond &b : graph.bonds) {
      adj[b.begin].push_back(b.end);
      adj[b.end].push_back(b.begin);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          stack.push_back(v);
        }
    }
    if (reached != n)
      throw ParseError(ParseErrorKind::kDisconnected,
                       "molecule has more than one fragment");
  }

  const std::vector<bool> ring_bond = ring_bond_mask(n, graph.bonds);
  std::vector<bool> ring_atom(n, false);
  for (std::size_t i = 0; i < graph.bonds.size(); ++i)
    if (ring_bond[i]) ring_atom[graph.bonds[i].begin] =
        ring_atom[graph.bonds[i].end] = true;

  bool has_aromatic = false;
  for (Bond &b : graph.bonds) {
    if (b.order != BondOrder::kAromatic) continue;
    if (!graph.atoms[b.begin].aromatic || !graph.atoms[b.end].aromatic)
      b.order = BondOrder::kSingle;
    else
      has_aromatic = true;
  }
  if (has_aromatic) {
    const std::vector<int> priority = aromatic_priority(graph, ring_atom);
    if (!kekulize(graph, priority))
      throw ParseError(ParseErrorKind::kValence,
                       "aromatic system has no Kekule structure");
  }

  Molecule mol;
  mol.atoms_ = std::move(graph.atoms);
  mol.bonds_ = std::move(graph.bonds);
  mol.bond_in_ring_ = ring_bond;
  for (int i = 0; i < n; ++i) mol.atoms_[i].in_ring = ring_atom[i];

  std::vector<int> deg(n, 0);
  for (const Bond &b : mol.bonds_) {
    ++deg[b.begin];
    ++deg[b.end];
  }
  mol.offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) mol.offsets_[i + 1] = mol.offsets_[i] + deg[i];
  mol.adjacency_.resize(mol.offsets_[n]);
  std::vector<int> fill(mol.offsets_.begin(), mol.offsets_.end() - 1);
  for (std::size_t i = 0; i < mol.bonds_.size(); ++i) {
    const Bond &b = mol.bonds_[i];
    mol.adjacency_[fill[b.begin]++] = {b.end, static_cast<int>(i)};
    mol.adjacency_[fill[b.end]++] = {b.begin, static_cast<int>(i)};
  }

  mol.implicit_h_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atoms_[i];
    const int sum = mol.bond_order_sum(i);
    if (!a.explicit_h) {
      auto h = default_implicit_hydrogens(a.element, sum);
      if (!h)
        throw ParseError(ParseErrorKind::kValence,
                         "valence exceeded on atom " + std::to_string(i) +
                             " (" + std::string(element_symbol(a.element)) +
                             ")");
      mol.implicit_h_[i] = *h;
      continue;
    }
    const int total = sum + *a.explicit_h;
    const auto allowed = allowed_valences(a.element, a.formal_charge);
    if (std::find(allowed.begin(), allowed.end(), total) == allowed.end()) {
      const bool radical = allowed.empty() || total < allowed.front();
      throw ParseError(ParseErrorKind::kValence,
                       std::string(radical ? "radical" : "non-standard valence") +
                           " on atom " + std::to_string(i) + " (" +
                           std::string(element_symbol(a.element)) + ")");
    }
  }
  return mol;
}

int Molecule::heavy_degree(int atom) const {
  int d = 0;
  for (const auto &nb : neighbors(atom))
    if (atoms_[nb.atom].element != Element::H) ++d;
  return d;
}

int Molecule::bond_order_sum(int atom) const {
  int s = 0;
  for (const auto &nb : neighbors(atom))
    s += valence_contribution(bonds_[nb.bond].order);
  return s;
}

int Molecule::hydrogen_count(int atom) const {
  return implicit_h_[atom] + atoms_[atom].explicit_h.value_or(0);
}

int Molecule::heavy_atom_count() const {
  return static_cast<int>(std::count_if(atoms_.begin(), atoms_.end(),
                                        [](const Atom &a) {
                                          return a.element != Element::H;
                                        }));
}

int Molecule::bond_index(int a, int b) const {
  for (const auto &nb : neighbors(a))
    if (nb.atom == b) return nb.bond;
  return -1;
}

AtomGraph Molecule::to_graph() const {
  AtomGraph g;
  g.atoms.reserve(atoms_.size());
  for (int i = 0; i < static_cast<int>(atoms_.size()); ++i) {
    Atom a = atoms_[i];
    a.aromatic = false;
    a.in_ring = false;
    if (a.formal_charge == 0 && in_organic_subset(a.element)) {
      auto h = default_implicit_hydrogens(a.element, bond_order_sum(i));
      if (h && *h == hydrogen_count(i)) a.explicit_h.reset();
    }
    g.atoms.push_back(std::move(a));
  }
  g.bonds = bonds_;
  return g;
}

}  // namespace sage
