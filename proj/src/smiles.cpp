//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "canon.hpp"
#include "sage/dataset.hpp"

namespace sage {
namespace {

constexpr int kMaxRingNumber = 100;

class SmilesReader {
public:
  explicit SmilesReader(std::string_view text) : text_(text) {
    for (auto &r : rings_) r.atom = -1;
  }

  AtomGraph read() {
    if (text_.empty()) fail(ParseErrorKind::kSyntax, "empty SMILES");
    while (pos_ < text_.size()) step();
    if (pending_) fail(ParseErrorKind::kSyntax, "dangling bond symbol");
    if (!branches_.empty())
      fail(ParseErrorKind::kSyntax, "unmatched '('", branches_.back().second);
    for (const auto &r : rings_)
      if (r.atom != -1)
        fail(ParseErrorKind::kRingClosure, "unclosed ring bond", r.position);
    if (graph_.atoms.empty()) fail(ParseErrorKind::kSyntax, "no atoms");
    return std::move(graph_);
  }

private:
  struct OpenRing {
    int atom;
    std::optional<BondOrder> order;
    std::size_t position;
  };

  [[noreturn]] void fail(ParseErrorKind kind, const std::string &msg,
                         std::optional<std::size_t> at = std::nullopt) const {
    const std::size_t p = at.value_or(pos_);
    throw ParseError(kind, msg + " at position " + std::to_string(p),
                     static_cast<std::ptrdiff_t>(p));
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void step() {
    const char c = peek();
    if (c == '[' || std::isalpha(static_cast<unsigned char>(c))) {
      add_atom(c == '[' ? bracket_atom() : organic_atom());
      return;
    }
    if (after_open_ && c != '-' && c != '=' && c != '#' && c != ':' &&
        c != '/' && c != '\\')
      fail(ParseErrorKind::kSyntax, "empty branch");
    switch (c) {
    case '-':
    case '/':
    case '\\':
      set_bond(BondOrder::kSingle);
      return;
    case '=':
      set_bond(BondOrder::kDouble);
      return;
    case '#':
      set_bond(BondOrder::kTriple);
      return;
    case ':':
      set_bond(BondOrder::kAromatic);
      return;
    case '$':
      fail(ParseErrorKind::kSyntax, "quadruple bonds are not supported");
    case '(':
      if (prev_ == -1 || pending_) fail(ParseErrorKind::kSyntax, "misplaced '('");
      branches_.emplace_back(prev_, pos_);
      after_open_ = true;
      ++pos_;
      return;
    case ')':
      if (branches_.empty()) fail(ParseErrorKind::kSyntax, "unmatched ')'");
      if (pending_) fail(ParseErrorKind::kSyntax, "dangling bond symbol");
      prev_ = branches_.back().first;
      branches_.pop_back();
      ++pos_;
      return;
    case '.':
      fail(ParseErrorKind::kDisconnected,
           "multi-fragment SMILES are not supported");
    case '*':
      fail(ParseErrorKind::kUnsupportedElement, "wildcard atom");
    case '%':
      ring_bond(percent_ring_number());
      return;
    default:
      break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      ring_bond(c - '0');
      return;
    }
    fail(ParseErrorKind::kSyntax, std::string("unexpected character '") + c + "'");
  }

  void set_bond(BondOrder order) {
    if (prev_ == -1) fail(ParseErrorKind::kSyntax, "bond without a preceding atom");
    if (pending_) fail(ParseErrorKind::kSyntax, "consecutive bond symbols");
    pending_ = order;
    ++pos_;
  }

  int percent_ring_number() {
    if (!std::isdigit(static_cast<unsigned char>(peek(1))) ||
        !std::isdigit(static_cast<unsigned char>(peek(2))))
      fail(ParseErrorKind::kSyntax, "'%' must be followed by two digits");
    const int n = (peek(1) - '0') * 10 + (peek(2) - '0');
    pos_ += 3;
    return n;
  }

  void ring_bond(int number) {
    const std::size_t at = pos_ - 1;
    if (prev_ == -1) fail(ParseErrorKind::kSyntax, "ring bond without an atom", at);
    auto &slot = rings_[number];
    if (slot.atom == -1) {
      slot = {prev_, pending_, at};
      pending_.reset();
      return;
    }
    if (slot.atom == prev_)
      fail(ParseErrorKind::kRingClosure, "ring bond to the same atom", at);
    if (slot.order && pending_ && *slot.order != *pending_)
      fail(ParseErrorKind::kRingClosure, "conflicting ring bond orders", at);
    if (graph_.find_bond(slot.atom, prev_) != -1)
      fail(ParseErrorKind::kRingClosure, "duplicate ring bond", at);
    BondOrder order = slot.order ? *slot.order
                      : pending_ ? *pending_
                                 : implied_order(slot.atom, prev_);
    graph_.add_bond(slot.atom, prev_, order);
    slot.atom = -1;
    pending_.reset();
  }

  BondOrder implied_order(int a, int b) const {
    return graph_.atoms[a].aromatic && graph_.atoms[b].aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  }

  void add_atom(Atom atom) {
    const int idx = graph_.add_atom(std::move(atom));
    if (prev_ != -1) {
      const BondOrder order = pending_ ? *pending_ : implied_order(prev_, idx);
      graph_.add_bond(prev_, idx, order);
    } else if (pending_) {
      fail(ParseErrorKind::kSyntax, "bond without a preceding atom");
    }
    pending_.reset();
    after_open_ = false;
    prev_ = idx;
  }

  Atom organic_atom() {
    const char c = peek();
    Atom atom;
    if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::string_view kAromatic = "bcnops";
      if (kAromatic.find(c) == std::string_view::npos)
        fail(ParseErrorKind::kSyntax, std::string("unexpected '") + c + "'");
      atom.element = *element_from_symbol(
          std::string(1, static_cast<char>(std::toupper(c))));
      atom.aromatic = true;
      ++pos_;
      return atom;
    }
    if ((c == 'C' && peek(1) == 'l') || (c == 'B' && peek(1) == 'r')) {
      atom.element = c == 'C' ? Element::Cl : Element::Br;
      pos_ += 2;
      return atom;
    }
    auto e = element_from_symbol(std::string(1, c));
    if (!e || !in_organic_subset(*e))
      fail(ParseErrorKind::kSyntax,
           std::string("'") + c + "' is not an organic-subset atom");
    atom.element = *e;
    ++pos_;
    return atom;
  }

  Atom bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    if (std::isdigit(static_cast<unsigned char>(peek())))
      fail(ParseErrorKind::kSyntax, "isotopes are not supported");
    Atom atom;
    const char c = peek();
    if (std::islower(static_cast<unsigned char>(c))) {
      if (std::islower(static_cast<unsigned char>(peek(1))))
        fail(ParseErrorKind::kUnsupportedElement, "unsupported aromatic element");
      static constexpr std::string_view kAromatic = "bcnops";
      if (kAromatic.find(c) == std::string_view::npos)
        fail(ParseErrorKind::kSyntax, std::string("unexpected '") + c + "'");
      atom.element = *element_from_symbol(
          std::string(1, static_cast<char>(std::toupper(c))));
      atom.aromatic = true;
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      ++pos_;
      if (std::islower(static_cast<unsigned char>(peek()))) sym += peek(), ++pos_;
      auto e = element_from_symbol(sym);
      if (!e)
        fail(ParseErrorKind::kUnsupportedElement,
             "unsupported element '" + sym + "'", start);
      atom.element = *e;
    } else {
      fail(ParseErrorKind::kSyntax, "expected element symbol");
    }

    if (peek() == '@') {
      ++pos_;
      if (peek() == '@') ++pos_;
      const std::string_view cls = text_.substr(pos_, 2);
      if (cls == "TH" || cls == "AL" || cls == "SP" || cls == "TB" ||
          cls == "OH") {
        pos_ += 2;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    atom.explicit_h = 0;
    if (peek() == 'H') {
      ++pos_;
      int h = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) h = read_number();
      atom.explicit_h = h;
    }
    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      int mag = 0;
      if (std::isdigit(static_cast<unsigned char>(peek(1)))) {
        ++pos_;
        mag = read_number();
      } else {
        while (peek() == sign) ++mag, ++pos_;
      }
      atom.formal_charge = sign == '+' ? mag : -mag;
    }
    if (peek() == ':') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        fail(ParseErrorKind::kSyntax, "atom class must be numeric");
      read_number();
    }
    if (peek() != ']') fail(ParseErrorKind::kSyntax, "unterminated bracket atom");
    ++pos_;
    return atom;
  }

  int read_number() {
    int v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      ++pos_;
      if (v > 99) fail(ParseErrorKind::kSyntax, "number too large");
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  AtomGraph graph_;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  bool after_open_ = false;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::array<OpenRing, kMaxRingNumber> rings_{};
};

bool below_all_valences(Element e, int charge, int used) {
  const auto allowed = allowed_valences(e, charge);
  return allowed.empty() || used < allowed.front();
}

}  // namespace

AtomGraph read_smiles_graph(std::string_view text) {
  return SmilesReader(text).read();
}

Molecule parse_smiles(std::string_view text) {
  return Molecule::from_graph(read_smiles_graph(text));
}

bool is_radical_free(const AtomGraph &graph) {
  std::vector<int> used(graph.atoms.size(), 0);
  for (const Bond &b : graph.bonds) {
    used[b.begin] += valence_contribution(b.order);
    used[b.end] += valence_contribution(b.order);
  }
  for (std::size_t i = 0; i < graph.atoms.size(); ++i) {
    const Atom &a = graph.atoms[i];
    if (!a.explicit_h) continue;
    // An aromatic atom also carries one pi bond.
    const int total = used[i] + *a.explicit_h + (a.aromatic ? 1 : 0);
    if (below_all_valences(a.element, a.formal_charge, total)) return false;
  }
  return true;
}

bool is_radical_free(const Molecule &mol) {
  for (int i = 0; i < static_cast<int>(mol.atom_count()); ++i) {
    const Atom &a = mol.atom(i);
    if (!a.explicit_h) continue;
    if (below_all_valences(a.element, a.formal_charge,
                           mol.bond_order_sum(i) + *a.explicit_h))
      return false;
  }
  return true;
}

std::string canonical_smiles(const Molecule &mol) {
  std::string best;
  detail::canonical_ranks(detail::writer_graph(mol),
                          detail::atom_invariants(mol), &best);
  return best;
}

std::string random_smiles(const Molecule &mol, std::mt19937_64 &rng) {
  std::vector<int> rank(mol.atom_count());
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  return detail::write_dfs(detail::writer_graph(mol), rank);
}

std::string canonicalize(std::string_view smiles) {
  return canonical_smiles(parse_smiles(smiles));
}

std::vector<std::string> read_smiles_lines(std::string_view content) {
  std::vector<std::string> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first.front() == '#') continue;
    out.push_back(std::move(first));
  }
  return out;
}

std::vector<std::string> read_smiles_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_smiles_lines(buf.str());
}

}  // namespace sage
