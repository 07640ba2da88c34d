//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/genops.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>
#include <utility>

#include "sage/chemclass.hpp"
#include "sage/rings.hpp"
#include "sage/smiles.hpp"

namespace sage {
namespace {

constexpr std::array<std::string_view, kMutationKindCount> kKindNames{
    "append_atom", "insert_atom", "change_bond_order",
    "add_ring_bond", "remove_ring_bond", "bridge_bicyclic"};

struct Site {
  MutationKind kind;
  int a = -1;
  int b = -1;
  int extra = 0;
};

// Hydrogens that an edit may replace with a bond. Bracket atoms keep their
// written hydrogen count, so they never take part.
int free_h(const Molecule &mol, int atom) {
  return mol.atom(atom).explicit_h ? 0 : mol.hydrogen_count(atom);
}

std::vector<Element> chain_elements(const MutationConfig &config) {
  std::vector<Element> out;
  for (Element e : config.alphabet) {
    const auto v = allowed_valences(e, 0);
    if (!v.empty() && v.back() >= 2) out.push_back(e);
  }
  return out;
}

std::vector<Site> find_sites(const Molecule &mol, MutationKind kind,
                             const MutationConfig &config) {
  std::vector<Site> sites;
  const int n = static_cast<int>(mol.atom_count());
  const int m = static_cast<int>(mol.bond_count());
  const int heavy = mol.heavy_atom_count();
  const int chain = static_cast<int>(chain_elements(config).size());
  switch (kind) {
    case MutationKind::kAppendAtom:
      if (heavy + 1 > config.max_heavy_atoms) break;
      for (int i = 0; i < n; ++i)
        if (free_h(mol, i) >= 1)
          for (int e = 0; e < static_cast<int>(config.alphabet.size()); ++e)
            sites.push_back({kind, i, -1, e});
      break;
    case MutationKind::kInsertAtom:
      if (heavy + 1 > config.max_heavy_atoms) break;
      for (int b = 0; b < m; ++b) {
        const Bond &bd = mol.bond(b);
        if (bd.order != BondOrder::kSingle || mol.atom(bd.begin).element == Element::H ||
            mol.atom(bd.end).element == Element::H)
          continue;
        for (int e = 0; e < chain; ++e) sites.push_back({kind, b, -1, e});
      }
      break;
    case MutationKind::kChangeBondOrder:
      for (int b = 0; b < m; ++b) {
        const Bond &bd = mol.bond(b);
        if (mol.atom(bd.begin).explicit_h || mol.atom(bd.end).explicit_h) continue;
        const int cur = static_cast<int>(bd.order);
        const int room = std::min(free_h(mol, bd.begin), free_h(mol, bd.end));
        for (int o = 1; o <= 3; ++o)
          if (o != cur && o - cur <= room) sites.push_back({kind, b, -1, o});
      }
      break;
    case MutationKind::kAddRingBond: {
      const auto dist = topological_distances(mol);
      for (int i = 0; i < n; ++i) {
        if (free_h(mol, i) < 1) continue;
        for (int j = i + 1; j < n; ++j) {
          const int d = dist[i][j];
          if (free_h(mol, j) >= 1 && d >= 2 && d >= config.min_ring_size - 1 &&
              d <= config.max_ring_size - 1)
            sites.push_back({kind, i, j, 0});
        }
      }
      break;
    }
    case MutationKind::kRemoveRingBond:
      for (int b = 0; b < m; ++b)
        if (mol.bond_in_ring(b)) sites.push_back({kind, b, -1, 0});
      break;
    case MutationKind::kBridgeBicyclic: {
      if (chain == 0) break;
      std::set<std::pair<int, int>> pairs;
      for (const Ring &ring : perceive_rings(mol)) {
        const int r = static_cast<int>(ring.size());
        for (int x = 0; x < r; ++x)
          for (int y = x + 2; y < r; ++y) {
            if (x == 0 && y == r - 1) continue;
            const int i = std::min(ring[x], ring[y]), j = std::max(ring[x], ring[y]);
            if (free_h(mol, i) >= 1 && free_h(mol, j) >= 1 && mol.bond_index(i, j) < 0)
              pairs.emplace(i, j);
          }
      }
      for (const auto &[i, j] : pairs)
        for (int len = 1; len <= config.max_bridge_atoms; ++len)
          if (heavy + len <= config.max_heavy_atoms) sites.push_back({kind, i, j, len});
      break;
    }
  }
  return sites;
}

Atom plain_atom(Element e) {
  Atom a;
  a.element = e;
  return a;
}

// `chain` supplies the bridge atoms; append and insert use chain[0].
AtomGraph apply_site(const Molecule &mol, const Site &s, const std::vector<Element> &chain) {
  AtomGraph g = mol.to_graph();
  switch (s.kind) {
    case MutationKind::kAppendAtom: {
      const int x = g.add_atom(plain_atom(chain[0]));
      g.add_bond(s.a, x, BondOrder::kSingle);
      break;
    }
    case MutationKind::kInsertAtom: {
      const Bond bd = g.bonds[s.a];
      g.remove_bond(s.a);
      const int x = g.add_atom(plain_atom(chain[0]));
      g.add_bond(bd.begin, x, BondOrder::kSingle);
      g.add_bond(x, bd.end, BondOrder::kSingle);
      break;
    }
    case MutationKind::kChangeBondOrder:
      g.bonds[s.a].order = static_cast<BondOrder>(s.extra);
      break;
    case MutationKind::kAddRingBond:
      g.add_bond(s.a, s.b, BondOrder::kSingle);
      break;
    case MutationKind::kRemoveRingBond:
      g.remove_bond(s.a);
      break;
    case MutationKind::kBridgeBicyclic: {
      int prev = s.a;
      for (int k = 0; k < s.extra; ++k) {
        const int x = g.add_atom(plain_atom(chain[k]));
        g.add_bond(prev, x, BondOrder::kSingle);
        prev = x;
      }
      g.add_bond(prev, s.b, BondOrder::kSingle);
      break;
    }
  }
  return g;
}

EditResult finish(AtomGraph graph, const MutationConfig &config) {
  EditResult r;
  try {
    Molecule mol = Molecule::from_graph(std::move(graph));
    if (mol.heavy_atom_count() > config.max_heavy_atoms) {
      r.rejection = Rejection::kTooLarge;
      return r;
    }
    if (config.require_amine && !is_amine(mol)) {
      r.rejection = Rejection::kNotAmine;
      return r;
    }
    r.molecule = std::move(mol);
  } catch (const ParseError &) {
    r.rejection = Rejection::kValenceViolation;
  }
  return r;
}

std::vector<Element> random_chain(const Site &s, std::mt19937_64 &rng,
                                  const MutationConfig &config) {
  if (s.kind == MutationKind::kAppendAtom) return {config.alphabet[s.extra]};
  const auto elems = chain_elements(config);
  if (s.kind == MutationKind::kInsertAtom) return {elems[s.extra]};
  std::vector<Element> chain;
  if (s.kind == MutationKind::kBridgeBicyclic) {
    std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
    for (int k = 0; k < s.extra; ++k) chain.push_back(elems[pick(rng)]);
  }
  return chain;
}

template <typename T>
const T &pick_one(const std::vector<T> &v, std::mt19937_64 &rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::vector<int> acyclic_cuts(const Molecule &mol) {
  std::vector<int> cuts;
  for (int b = 0; b < static_cast<int>(mol.bond_count()); ++b) {
    const Bond &bd = mol.bond(b);
    if (bd.order == BondOrder::kSingle && !mol.bond_in_ring(b) &&
        mol.atom(bd.begin).element != Element::H && mol.atom(bd.end).element != Element::H)
      cuts.push_back(b);
  }
  return cuts;
}

// The connected part containing `root` once `cut` is removed, plus the new
// index of `root`.
std::pair<AtomGraph, int> fragment(const Molecule &mol, int cut, int root) {
  const AtomGraph full = mol.to_graph();
  std::vector<int> remap(mol.atom_count(), -1);
  std::vector<int> stack{root};
  AtomGraph g;
  remap[root] = g.add_atom(full.atoms[root]);
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto &nb : mol.neighbors(u)) {
      if (nb.bond == cut || remap[nb.atom] >= 0) continue;
      remap[nb.atom] = g.add_atom(full.atoms[nb.atom]);
      stack.push_back(nb.atom);
    }
  }
  for (int b = 0; b < static_cast<int>(mol.bond_count()); ++b) {
    const Bond &bd = mol.bond(b);
    if (b != cut && remap[bd.begin] >= 0 && remap[bd.end] >= 0)
      g.add_bond(remap[bd.begin], remap[bd.end], bd.order);
  }
  return {std::move(g), remap[root]};
}

AtomGraph join(const std::pair<AtomGraph, int> &x, const std::pair<AtomGraph, int> &y) {
  AtomGraph g = x.first;
  const int offset = static_cast<int>(g.atoms.size());
  for (const Atom &a : y.first.atoms) g.add_atom(a);
  for (const Bond &b : y.first.bonds) g.add_bond(b.begin + offset, b.end + offset, b.order);
  g.add_bond(x.second, y.second + offset, BondOrder::kSingle);
  return g;
}

}  // namespace

std::string_view to_string(MutationKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<MutationKind> mutation_kind_from_string(std::string_view name) {
  for (int k = 0; k < kMutationKindCount; ++k)
    if (kKindNames[k] == name) return static_cast<MutationKind>(k);
  return std::nullopt;
}

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::kNone: return "none";
    case Rejection::kNoApplicableSite: return "no applicable site";
    case Rejection::kNoCutBond: return "no cut bond";
    case Rejection::kValenceViolation: return "valence violation";
    case Rejection::kNotAmine: return "not an amine";
    case Rejection::kTooLarge: return "too large";
  }
  return "?";
}

void OpStats::record(Rejection r) {
  ++attempted;
  switch (r) {
    case Rejection::kNone: ++succeeded; break;
    case Rejection::kNoApplicableSite:
    case Rejection::kNoCutBond: ++rejected_no_site; break;
    case Rejection::kValenceViolation: ++rejected_valence; break;
    case Rejection::kNotAmine: ++rejected_not_amine; break;
    case Rejection::kTooLarge: ++rejected_too_large; break;
  }
}

OpStats &OpStats::operator+=(const OpStats &o) {
  attempted += o.attempted;
  succeeded += o.succeeded;
  rejected_no_site += o.rejected_no_site;
  rejected_valence += o.rejected_valence;
  rejected_not_amine += o.rejected_not_amine;
  rejected_too_large += o.rejected_too_large;
  return *this;
}

EditResult mutate(const Molecule &mol, MutationKind kind, std::mt19937_64 &rng,
                  const MutationConfig &config) {
  const auto sites = find_sites(mol, kind, config);
  if (sites.empty()) return {std::nullopt, Rejection::kNoApplicableSite};
  const Site &s = pick_one(sites, rng);
  return finish(apply_site(mol, s, random_chain(s, rng, config)), config);
}

EditResult mutate(const Molecule &mol, std::mt19937_64 &rng, const MutationConfig &config) {
  std::array<std::vector<Site>, kMutationKindCount> sites;
  std::array<double, kMutationKindCount> weights{};
  double total = 0;
  for (int k = 0; k < kMutationKindCount; ++k) {
    if (config.weights[k] <= 0) continue;
    sites[k] = find_sites(mol, static_cast<MutationKind>(k), config);
    if (!sites[k].empty()) weights[k] = config.weights[k];
    total += weights[k];
  }
  if (total <= 0) return {std::nullopt, Rejection::kNoApplicableSite};
  std::discrete_distribution<int> pick_kind(weights.begin(), weights.end());
  const Site &s = pick_one(sites[pick_kind(rng)], rng);
  return finish(apply_site(mol, s, random_chain(s, rng, config)), config);
}

EditResult crossover(const Molecule &a, const Molecule &b, std::mt19937_64 &rng,
                     const MutationConfig &config) {
  const auto cuts_a = acyclic_cuts(a), cuts_b = acyclic_cuts(b);
  if (cuts_a.empty() || cuts_b.empty()) return {std::nullopt, Rejection::kNoCutBond};
  std::bernoulli_distribution coin(0.5);
  const Bond &ca = a.bond(pick_one(cuts_a, rng));
  const Bond &cb = b.bond(pick_one(cuts_b, rng));
  const int ia = a.bond_index(ca.begin, ca.end), ib = b.bond_index(cb.begin, cb.end);
  const int root_a = coin(rng) ? ca.begin : ca.end;
  const int root_b = coin(rng) ? cb.begin : cb.end;
  return finish(join(fragment(a, ia, root_a), fragment(b, ib, root_b)), config);
}

std::vector<std::string> enumerate_mutants(const Molecule &mol, MutationKind kind,
                                           const MutationConfig &config) {
  std::set<std::string> out;
  const auto elems = chain_elements(config);
  for (const Site &s : find_sites(mol, kind, config)) {
    std::vector<std::vector<Element>> chains;
    if (s.kind == MutationKind::kAppendAtom) {
      chains.push_back({config.alphabet[s.extra]});
    } else if (s.kind == MutationKind::kInsertAtom) {
      chains.push_back({elems[s.extra]});
    } else if (s.kind == MutationKind::kBridgeBicyclic) {
      chains.push_back({});
      for (int k = 0; k < s.extra; ++k) {
        std::vector<std::vector<Element>> grown;
        for (const auto &c : chains)
          for (Element e : elems) {
            grown.push_back(c);
            grown.back().push_back(e);
          }
        chains = std::move(grown);
      }
    } else {
      chains.push_back({});
    }
    for (const auto &chain : chains) {
      EditResult r = finish(apply_site(mol, s, chain), config);
      if (r) out.insert(canonical_smiles(*r.molecule));
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> enumerate_crossovers(const Molecule &a, const Molecule &b,
                                              const MutationConfig &config) {
  std::set<std::string> out;
  for (int ia : acyclic_cuts(a))
    for (int ib : acyclic_cuts(b))
      for (int ra : {a.bond(ia).begin, a.bond(ia).end})
        for (int rb : {b.bond(ib).begin, b.bond(ib).end}) {
          EditResult r = finish(join(fragment(a, ia, ra), fragment(b, ib, rb)), config);
          if (r) out.insert(canonical_smiles(*r.molecule));
        }
  return {out.begin(), out.end()};
}

std::vector<Molecule> diversify_batch(const std::vector<Molecule> &pool, std::size_t n,
                                      std::mt19937_64 &rng, const MutationConfig &config,
                                      OpStats *stats) {
  std::vector<Molecule> out;
  if (pool.empty()) return out;
  out.reserve(n);
  std::bernoulli_distribution use_cross(config.p_cross);
  auto record = [&](const EditResult &r) {
    if (stats) stats->record(r.rejection);
  };
  for (std::size_t k = 0; k < n; ++k) {
    bool done = false;
    for (int t = 0; t < config.retries && !done; ++t) {
      EditResult r;
      if (use_cross(rng)) {
        const Molecule &a = pick_one(pool, rng);
        const Molecule &b = pick_one(pool, rng);
        r = crossover(a, b, rng, config);
      } else {
        r = mutate(pick_one(pool, rng), rng, config);
      }
      record(r);
      if (r) {
        out.push_back(std::move(*r.molecule));
        done = true;
      }
    }
    for (int t = 0; t < config.retries && !done && config.fallback_to_mutation; ++t) {
      EditResult r = mutate(pick_one(pool, rng), rng, config);
      record(r);
      if (r) {
        out.push_back(std::move(*r.molecule));
        done = true;
      }
    }
  }
  return out;
}

std::vector<std::string> enumerate_closure(const std::vector<Molecule> &seeds,
                                           const MutationConfig &config, std::size_t limit) {
  std::set<std::string> known;
  std::vector<std::string> frontier;
  for (const Molecule &m : seeds)
    if (known.insert(canonical_smiles(m)).second) frontier.push_back(canonical_smiles(m));
  while (!frontier.empty() && (limit == 0 || known.size() < limit)) {
    std::vector<std::string> next;
    for (const auto &s : frontier) {
      const Molecule m = parse_smiles(s);
      for (int k = 0; k < kMutationKindCount; ++k) {
        if (config.weights[k] <= 0) continue;
        for (auto &c : enumerate_mutants(m, static_cast<MutationKind>(k), config))
          if (known.insert(c).second) next.push_back(std::move(c));
      }
      if (limit != 0 && known.size() >= limit) break;
    }
    frontier = std::move(next);
  }
  return {known.begin(), known.end()};
}

Molecule grow_molecule(const Molecule &seed, int heavy_atoms, std::mt19937_64 &rng,
                       const MutationConfig &config, int max_steps) {
  Molecule m = seed;
  for (int step = 0; step < max_steps && static_cast<int>(m.heavy_atom_count()) < heavy_atoms;
       ++step) {
    EditResult r = mutate(m, rng, config);
    if (r) m = std::move(*r.molecule);
  }
  return m;
}

std::vector<std::string> grow_library(const std::vector<Molecule> &seeds, std::size_t target,
                                      std::mt19937_64 &rng, const MutationConfig &config,
                                      std::size_t max_attempts) {
  std::vector<std::string> out;
  std::vector<Molecule> members;
  std::unordered_set<std::string> seen;
  for (const Molecule &m : seeds)
    if (seen.insert(canonical_smiles(m)).second) {
      out.push_back(canonical_smiles(m));
      members.push_back(m);
    }
  if (members.empty()) return out;
  if (max_attempts == 0) max_attempts = 50 * target;
  for (std::size_t t = 0; t < max_attempts && out.size() < target; ++t) {
    EditResult r = mutate(pick_one(members, rng), rng, config);
    if (!r) continue;
    std::string c = canonical_smiles(*r.molecule);
    if (!seen.insert(c).second) continue;
    out.push_back(std::move(c));
    members.push_back(std::move(*r.molecule));
  }
  return out;
}

}  // namespace sage
