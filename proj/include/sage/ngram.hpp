//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sage/chemclass.hpp"

namespace sage {

inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kModelMagic = "SAGM1";

class TokenizeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class EmptyInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ModelFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Splits SMILES into tokens wrapped in BOS/EOS. Bracket atoms, Cl, Br and
/// %nn ring labels are single tokens.
std::vector<std::string> tokenize(std::string_view smiles);

/// Concatenates tokens, dropping BOS/EOS.
std::string detokenize(const std::vector<std::string> &tokens);

/// Order-k token n-gram model with Laplace smoothing. Predictions use the
/// longest suffix of the history that was seen in training.
class NgramModel {
public:
  struct Counts {
    double total = 0;
    std::vector<std::pair<int, double>> entries;  // sorted by token id
  };

  static constexpr int kDefaultOrder = 6;
  static constexpr double kDefaultAlpha = 0.01;
  static constexpr int kDefaultMaxLen = 80;

  /// Throws EmptyInput for an empty corpus and TokenizeError for bad entries.
  static NgramModel train(const std::vector<std::string> &corpus, int order = kDefaultOrder,
                          double alpha = kDefaultAlpha);

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::vector<std::string> &vocab() const { return vocab_; }
  int token_id(std::string_view token) const;
  std::size_t context_count() const { return counts_.size(); }

  /// Probabilities over the vocabulary (BOS always 0) given token ids so far,
  /// not including the BOS padding.
  std::vector<double> distribution(const std::vector<int> &history) const;

  /// Counts of the context actually used for `history`.
  const Counts &context_for(const std::vector<int> &history) const;

  /// With `syntax_guard`, tokens that would unbalance branches, leave ring
  /// labels open at the end or start a disconnected fragment are masked and
  /// the remaining probabilities renormalized. Falls back to the raw
  /// distribution when every allowed token has zero mass.
  std::string sample_one(std::mt19937_64 &rng, int max_len = kDefaultMaxLen,
                         bool syntax_guard = true) const;
  std::vector<std::string> sample(std::size_t n, std::mt19937_64 &rng,
                                  int max_len = kDefaultMaxLen, bool syntax_guard = true) const;

  /// Natural-log probability of the whole string including EOS. Tokens
  /// outside the vocabulary get the smoothing mass of an unseen token.
  double log_likelihood(std::string_view smiles) const;
  double perplexity(const std::vector<std::string> &smiles) const;

  /// New model with counts + lambda * counts(buffer). Throws EmptyInput.
  NgramModel fine_tune(const std::vector<std::string> &buffer, double lambda) const;
  NgramModel fine_tune(const std::vector<std::pair<std::string, double>> &buffer,
                       double lambda) const;

  /// All stored contexts as token-id lists.
  std::vector<std::vector<int>> contexts() const;

  void save(std::ostream &out) const;
  static NgramModel load(std::istream &in);
  void save_file(const std::string &path) const;
  static NgramModel load_file(const std::string &path);
  void dump_text(std::ostream &out) const;

  bool operator==(const NgramModel &other) const;

private:
  NgramModel() = default;

  int intern(const std::string &token);
  void add_string(const std::vector<std::string> &tokens, double weight);
  static std::string key(const int *ids, int len);

  int order_ = kDefaultOrder;
  double alpha_ = kDefaultAlpha;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::string, Counts> counts_;
};

struct GenMetrics {
  std::size_t samples = 0;
  double validity = 0;
  double uniqueness = 0;
  double novelty = 0;
  double sediv = 0;
  double amine_ratio = 0;
  std::map<AmineType, double> type_ratios;
};

/// Validity over all samples; uniqueness over valid ones; novelty over
/// unique ones. Amine and type ratios are over unique valid molecules, so
/// the type ratios sum to the amine ratio.
GenMetrics distribution_metrics(const std::vector<std::string> &samples,
                                const std::unordered_set<std::string> &training_canonical,
                                std::uint64_t seed = 0, double sediv_threshold = 0.65,
                                std::size_t sediv_sample = 1000);

/// Header and row in the column order Dataset, Models, Samples, Validity,
/// Uniqueness, Novelty, SEDiv, Amine, Primary, Secondary, Tertiary, Cyclic, Poly.
std::string metrics_csv_header();
std::string metrics_csv_row(std::string_view dataset, std::string_view model,
                            const GenMetrics &m);

}  // namespace sage
