//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <utility>

namespace sage {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_mix(std::uint64_t &h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
}

}  // namespace

Fingerprint::Fingerprint(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

void Fingerprint::set(std::size_t bit) {
  const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
  if (!(words_[bit / 64] & mask)) {
    words_[bit / 64] |= mask;
    ++popcount_;
  }
}

Fingerprint ecfp(const Molecule &mol, int radius, std::size_t width) {
  const int n = static_cast<int>(mol.atom_count());
  Fingerprint fp(width);
  std::vector<std::uint64_t> ids(n), next(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    std::uint64_t h = kFnvOffset;
    fnv_mix(h, atomic_number(a.element));
    fnv_mix(h, static_cast<std::uint64_t>(mol.degree(i)));
    fnv_mix(h, static_cast<std::uint64_t>(mol.hydrogen_count(i)));
    fnv_mix(h, static_cast<std::uint64_t>(a.formal_charge + 64));
    fnv_mix(h, a.in_ring ? 1 : 0);
    ids[i] = h;
    fp.set(h % width);
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      env.clear();
      for (const auto &nb : mol.neighbors(i))
        env.emplace_back(static_cast<std::uint64_t>(mol.bond(nb.bond).order), ids[nb.atom]);
      std::sort(env.begin(), env.end());
      std::uint64_t h = kFnvOffset;
      fnv_mix(h, static_cast<std::uint64_t>(r));
      fnv_mix(h, ids[i]);
      for (const auto &[order, id] : env) {
        fnv_mix(h, order);
        fnv_mix(h, id);
      }
      next[i] = h;
      fp.set(h % width);
    }
    ids.swap(next);
  }
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.width() != b.width()) throw WidthMismatch("fingerprint widths differ");
  int both = 0;
  const auto wa = a.words(), wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) both += std::popcount(wa[i] & wb[i]);
  const int either = a.popcount() + b.popcount() - both;
  return either == 0 ? 1.0 : static_cast<double>(both) / either;
}

std::vector<std::size_t> sphere_exclusion_centers(std::span<const Fingerprint> fps,
                                                  double threshold,
                                                  std::span<const std::size_t> order) {
  std::vector<std::size_t> centers;
  for (std::size_t idx : order) {
    const bool isolated = std::all_of(centers.begin(), centers.end(), [&](std::size_t c) {
      return tanimoto(fps[idx], fps[c]) < threshold;
    });
    if (isolated) centers.push_back(idx);
  }
  return centers;
}

double sphere_exclusion_diversity(std::span<const Fingerprint> fps, double threshold,
                                  std::size_t sample, std::mt19937_64 &rng) {
  if (fps.empty()) throw std::invalid_argument("sphere exclusion on empty input");
  std::vector<std::size_t> all(fps.size());
  std::iota(all.begin(), all.end(), 0);
  const std::size_t k = std::clamp<std::size_t>(sample, 1, fps.size());
  std::vector<std::size_t> order;
  std::sample(all.begin(), all.end(), std::back_inserter(order), k, rng);
  std::shuffle(order.begin(), order.end(), rng);
  return static_cast<double>(sphere_exclusion_centers(fps, threshold, order).size()) / k;
}

}  // namespace sage
