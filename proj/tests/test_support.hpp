#pragma once

#include <random>
#include <string>
#include <vector>

#include "sage/genops.hpp"
#include "sage/reference.hpp"
#include "sage/smiles.hpp"

// Deterministic amine library grown from the reference amines, biased towards
// chain growth like typical amine collections.
inline std::vector<std::string> amine_corpus(std::size_t n, std::uint64_t seed,
                                             int max_heavy_atoms = 12) {
  std::vector<sage::Molecule> seeds;
  for (const auto &r : sage::reference_amines()) {
    sage::Molecule m = sage::parse_smiles(r.smiles);
    if (static_cast<int>(m.heavy_atom_count()) <= max_heavy_atoms) seeds.push_back(std::move(m));
  }
  sage::MutationConfig cfg;
  cfg.max_heavy_atoms = max_heavy_atoms;
  cfg.require_amine = true;
  cfg.weights = {4.0, 2.0, 0.3, 0.2, 0.5, 0.0};
  std::mt19937_64 rng(seed);
  return sage::grow_library(seeds, n, rng, cfg);
}
