//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sage/molecule.hpp"

namespace sage {

enum class MutationKind {
  kAppendAtom,
  kInsertAtom,
  kChangeBondOrder,
  kAddRingBond,
  kRemoveRingBond,
  kBridgeBicyclic,
};
constexpr int kMutationKindCount = 6;

std::string_view to_string(MutationKind kind);
std::optional<MutationKind> mutation_kind_from_string(std::string_view name);

enum class Rejection {
  kNone,
  kNoApplicableSite,
  kNoCutBond,
  kValenceViolation,
  kNotAmine,
  kTooLarge,
};

std::string_view to_string(Rejection r);

struct MutationConfig {
  std::array<double, kMutationKindCount> weights{1, 1, 1, 1, 1, 1};
  std::vector<Element> alphabet{Element::C, Element::N, Element::O};
  int max_heavy_atoms = 22;
  int min_ring_size = 3;
  int max_ring_size = 6;
  int max_bridge_atoms = 2;
  double p_cross = 0.5;
  int retries = 10;
  bool fallback_to_mutation = true;
  bool require_amine = false;
};

struct OpStats {
  std::uint64_t attempted = 0;
  std::uint64_t succeeded = 0;
  std::uint64_t rejected_no_site = 0;
  std::uint64_t rejected_valence = 0;
  std::uint64_t rejected_not_amine = 0;
  std::uint64_t rejected_too_large = 0;

  std::uint64_t rejected() const {
    return rejected_no_site + rejected_valence + rejected_not_amine + rejected_too_large;
  }
  void record(Rejection r);
  OpStats &operator+=(const OpStats &other);
};

struct EditResult {
  std::optional<Molecule> molecule;
  Rejection rejection = Rejection::kNone;

  explicit operator bool() const { return molecule.has_value(); }
};

/// Picks a kind by weight among kinds with at least one site, then applies a
/// uniformly chosen site.
EditResult mutate(const Molecule &mol, std::mt19937_64 &rng, const MutationConfig &config);

EditResult mutate(const Molecule &mol, MutationKind kind, std::mt19937_64 &rng,
                  const MutationConfig &config);

/// Cuts one random acyclic single bond in each parent and joins a random
/// fragment of each at the cut atoms.
EditResult crossover(const Molecule &a, const Molecule &b, std::mt19937_64 &rng,
                     const MutationConfig &config);

/// Every distinct (canonical) molecule reachable by one edit of `kind`,
/// including those rejected only by the amine requirement when it is off.
std::vector<std::string> enumerate_mutants(const Molecule &mol, MutationKind kind,
                                           const MutationConfig &config);

/// Every distinct child of crossover(a, b).
std::vector<std::string> enumerate_crossovers(const Molecule &a, const Molecule &b,
                                              const MutationConfig &config);

/// Up to n offspring from parents drawn uniformly from `pool`. Each offspring
/// gets `retries` attempts; when all fail and fallback is on, mutation gets
/// another `retries` attempts.
std::vector<Molecule> diversify_batch(const std::vector<Molecule> &pool, std::size_t n,
                                      std::mt19937_64 &rng, const MutationConfig &config,
                                      OpStats *stats = nullptr);

/// Grows a library of distinct molecules from `seeds` by repeatedly mutating
/// random members until it holds `target` entries or `max_attempts` edits
/// have been tried. Returns canonical SMILES, seeds first.
/// Every molecule reachable from `seeds` by mutations with nonzero weight
/// under `config`, as sorted canonical SMILES. Stops growing once `limit`
/// molecules are known (0 means no limit).
std::vector<std::string> enumerate_closure(const std::vector<Molecule> &seeds,
                                           const MutationConfig &config, std::size_t limit = 0);

/// Applies random edits to `seed` until it has `heavy_atoms` heavy atoms or
/// `max_steps` edits were tried. The result may be smaller than asked for.
Molecule grow_molecule(const Molecule &seed, int heavy_atoms, std::mt19937_64 &rng,
                       const MutationConfig &config, int max_steps = 500);

std::vector<std::string> grow_library(const std::vector<Molecule> &seeds, std::size_t target,
                                      std::mt19937_64 &rng, const MutationConfig &config,
                                      std::size_t max_attempts = 0);

}  // namespace sage
