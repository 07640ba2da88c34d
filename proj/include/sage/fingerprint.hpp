//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sage/molecule.hpp"

namespace sage {

class WidthMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class Fingerprint {
public:
  Fingerprint() = default;
  explicit Fingerprint(std::size_t width);

  std::size_t width() const { return width_; }
  int popcount() const { return popcount_; }
  bool test(std::size_t bit) const { return (words_[bit / 64] >> (bit % 64)) & 1u; }
  void set(std::size_t bit);
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const Fingerprint &) const = default;

private:
  std::size_t width_ = 0;
  int popcount_ = 0;
  std::vector<std::uint64_t> words_;
};

constexpr int kDefaultRadius = 3;
constexpr std::size_t kDefaultWidth = 1024;

/// Circular fingerprint: atom identifiers from (element, degree, H count,
/// charge, ring flag), re-hashed with sorted (bond order, neighbour id) pairs
/// for each radius up to `radius`, all folded into `width` bits.
Fingerprint ecfp(const Molecule &mol, int radius = kDefaultRadius,
                 std::size_t width = kDefaultWidth);

/// Returns 1 for two empty fingerprints. Throws WidthMismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

/// Greedy sphere exclusion over `order`: an entry becomes a centre when its
/// similarity to every existing centre is below `threshold`. Returns the
/// centre indices.
std::vector<std::size_t> sphere_exclusion_centers(std::span<const Fingerprint> fps,
                                                  double threshold,
                                                  std::span<const std::size_t> order);

/// Centres over a random subset of min(sample, n) entries scanned in random
/// order, divided by the subset size. Throws std::invalid_argument on empty
/// input.
double sphere_exclusion_diversity(std::span<const Fingerprint> fps, double threshold,
                                  std::size_t sample, std::mt19937_64 &rng);

}  // namespace sage
