//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "canon.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace sage::detail {
namespace {

// Beyond this many fully-ranked leaves, remaining tie classes are broken by
// the first member only.
constexpr int kMaxLeaves = 2048;

std::string_view bond_symbol(BondOrder o) {
  switch (o) {
  case BondOrder::kSingle:
    return "";
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return ":";
  }
  return "";
}

std::string ring_label(int digit) {
  if (digit < 10) return std::string(1, static_cast<char>('0' + digit));
  if (digit > 99) throw std::length_error("too many open ring closures");
  return "%" + std::to_string(digit);
}

int dense_ranks(std::vector<std::vector<int>> &keys, std::vector<int> &rank) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  int r = -1;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || keys[order[i]] != keys[order[i - 1]]) ++r;
    rank[order[i]] = r;
  }
  return r + 1;
}

class Ranker {
public:
  explicit Ranker(const WriterGraph &g) : g_(g), n_(static_cast<int>(g.size())) {}

  int refine(std::vector<int> &rank) const {
    std::vector<std::vector<int>> keys(n_);
    int classes = -1;
    for (;;) {
      for (int i = 0; i < n_; ++i) {
        auto &key = keys[i];
        key.clear();
        key.push_back(rank[i]);
        for (const auto &[j, order] : g_.adj[i])
          key.push_back(rank[j] * 8 + static_cast<int>(order));
        std::sort(key.begin() + 1, key.end());
      }
      const int next = dense_ranks(keys, rank);
      if (next == classes || next == n_) return next;
      classes = next;
    }
  }

  void search(std::vector<int> rank) {
    const int classes = refine(rank);
    if (classes == n_) {
      std::string s = write_dfs(g_, rank);
      if (!best_ || s < *best_) {
        best_ = std::move(s);
        best_rank_ = rank;
      }
      ++leaves_;
      return;
    }
    std::vector<int> count(classes, 0);
    for (int r : rank) ++count[r];
    const int tied = static_cast<int>(
        std::find_if(count.begin(), count.end(), [](int c) { return c > 1; }) -
        count.begin());
    bool first = true;
    for (int c = 0; c < n_; ++c) {
      if (rank[c] != tied) continue;
      if (!first && leaves_ >= kMaxLeaves) break;
      first = false;
      std::vector<int> next(rank);
      for (int i = 0; i < n_; ++i) {
        if (rank[i] > tied)
          next[i] = rank[i] + 1;
        else if (rank[i] == tied && i != c)
          next[i] = tied + 1;
      }
      search(std::move(next));
    }
  }

  std::vector<int> &best_rank() { return best_rank_; }
  std::string &best() { return *best_; }

private:
  const WriterGraph &g_;
  int n_;
  int leaves_ = 0;
  std::optional<std::string> best_;
  std::vector<int> best_rank_;
};

}  // namespace

std::string write_dfs(const WriterGraph &graph, std::span<const int> rank) {
  const int n = static_cast<int>(graph.size());
  if (n == 0) return {};

  auto nbrs = graph.adj;
  for (auto &list : nbrs)
    std::sort(list.begin(), list.end(), [&](const auto &a, const auto &b) {
      return rank[a.first] < rank[b.first];
    });

  struct RingEnd {
    int partner;
    BondOrder order;
    int id;
  };
  std::vector<int> pre(n, -1);
  std::vector<std::vector<std::pair<int, BondOrder>>> children(n);
  std::vector<std::vector<RingEnd>> rings(n);
  std::vector<std::pair<int, int>> ring_pairs;
  int counter = 0;

  std::function<void(int, int)> visit = [&](int u, int parent) {
    pre[u] = counter++;
    for (const auto &[v, order] : nbrs[u]) {
      if (v == parent) continue;
      if (pre[v] == -1) {
        children[u].emplace_back(v, order);
        visit(v, u);
        continue;
      }
      const std::pair<int, int> key{std::min(u, v), std::max(u, v)};
      if (std::find(ring_pairs.begin(), ring_pairs.end(), key) !=
          ring_pairs.end())
        continue;
      const int id = static_cast<int>(ring_pairs.size());
      ring_pairs.push_back(key);
      rings[u].push_back({v, order, id});
      rings[v].push_back({u, order, id});
    }
  };
  const int start = static_cast<int>(
      std::min_element(rank.begin(), rank.begin() + n) - rank.begin());
  visit(start, -1);

  std::string out;
  std::vector<int> digit_of(ring_pairs.size(), 0);
  std::vector<bool> in_use(100, false);

  std::function<void(int)> emit = [&](int u) {
    out += graph.atom_text[u];
    auto &ends = rings[u];
    // Closures first, then openings; each group by partner rank.
    std::sort(ends.begin(), ends.end(), [&](const RingEnd &a, const RingEnd &b) {
      const bool ao = pre[a.partner] > pre[u], bo = pre[b.partner] > pre[u];
      if (ao != bo) return !ao;
      return rank[a.partner] < rank[b.partner];
    });
    std::vector<int> released;
    for (const auto &e : ends) {
      if (pre[e.partner] < pre[u]) {
        out += ring_label(digit_of[e.id]);
        released.push_back(digit_of[e.id]);
      } else {
        int d = 1;
        while (in_use[d]) ++d;
        in_use[d] = true;
        digit_of[e.id] = d;
        out += bond_symbol(e.order);
        out += ring_label(d);
      }
    }
    for (int d : released) in_use[d] = false;
    const auto &kids = children[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch) out += '(';
      out += bond_symbol(kids[i].second);
      emit(kids[i].first);
      if (branch) out += ')';
    }
  };
  emit(start);
  return out;
}

std::vector<int> canonical_ranks(const WriterGraph &graph,
                                 std::span<const std::uint64_t> invariants,
                                 std::string *best) {
  const int n = static_cast<int>(graph.size());
  std::vector<std::vector<int>> keys(n);
  for (int i = 0; i < n; ++i)
    keys[i] = {static_cast<int>(invariants[i] >> 32),
               static_cast<int>(invariants[i] & 0xffffffffu)};
  std::vector<int> rank(n, 0);
  dense_ranks(keys, rank);

  Ranker ranker(graph);
  ranker.search(std::move(rank));
  if (best != nullptr) *best = std::move(ranker.best());
  return std::move(ranker.best_rank());
}

std::string atom_text(const Atom &atom, int bond_order_sum, int hydrogens) {
  const std::string_view sym = element_symbol(atom.element);
  if (atom.formal_charge == 0 && in_organic_subset(atom.element)) {
    auto h = default_implicit_hydrogens(atom.element, bond_order_sum);
    if (h && *h == hydrogens) return std::string(sym);
  }
  std::string out = "[";
  out += sym;
  if (hydrogens > 0) {
    out += 'H';
    if (hydrogens > 1) out += std::to_string(hydrogens);
  }
  if (atom.formal_charge != 0) {
    out += atom.formal_charge > 0 ? '+' : '-';
    const int mag = atom.formal_charge > 0 ? atom.formal_charge : -atom.formal_charge;
    if (mag > 1) out += std::to_string(mag);
  }
  out += ']';
  return out;
}

WriterGraph writer_graph(const Molecule &mol) {
  const int n = static_cast<int>(mol.atom_count());
  WriterGraph g;
  g.atom_text.resize(n);
  g.adj.resize(n);
  for (int i = 0; i < n; ++i) {
    g.atom_text[i] =
        atom_text(mol.atom(i), mol.bond_order_sum(i), mol.hydrogen_count(i));
    for (const auto &nb : mol.neighbors(i))
      g.adj[i].emplace_back(nb.atom, mol.bond(nb.bond).order);
  }
  return g;
}

std::vector<std::uint64_t> atom_invariants(const Molecule &mol) {
  const int n = static_cast<int>(mol.atom_count());
  std::vector<std::uint64_t> inv(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    inv[i] = (static_cast<std::uint64_t>(atomic_number(a.element)) << 32) |
             (static_cast<std::uint64_t>(a.formal_charge + 64) << 24) |
             (static_cast<std::uint64_t>(mol.degree(i)) << 16) |
             (static_cast<std::uint64_t>(mol.hydrogen_count(i)) << 8) |
             (a.in_ring ? 1u : 0u);
  }
  return inv;
}

}  // namespace sage::detail
