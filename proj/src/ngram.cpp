//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/ngram.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "sage/fingerprint.hpp"
#include "sage/smiles.hpp"

namespace sage {
namespace {

constexpr int kBos = 0;
constexpr int kEos = 1;

bool single_char_token(char c) {
  return std::string_view("BCNOPSFIbcnops-=#$:/\\().").find(c) != std::string_view::npos ||
         std::isdigit(static_cast<unsigned char>(c));
}

enum class TokenClass { kAtom, kBond, kOpen, kClose, kRing, kDot, kEnd };

TokenClass classify_token(std::string_view t) {
  if (t == kEosToken) return TokenClass::kEnd;
  const char c = t.front();
  if (c == '(') return TokenClass::kOpen;
  if (c == ')') return TokenClass::kClose;
  if (c == '.') return TokenClass::kDot;
  if (c == '%' || std::isdigit(static_cast<unsigned char>(c))) return TokenClass::kRing;
  if (std::string_view("-=#$:/\\").find(c) != std::string_view::npos) return TokenClass::kBond;
  return TokenClass::kAtom;
}

// Tracks branch depth and open ring labels so sampling only proposes tokens
// that can still be completed into a well-formed string.
class SyntaxGuard {
public:
  bool allows(TokenClass k, std::string_view token) const {
    const bool after_atom =
        prev_ == TokenClass::kAtom || prev_ == TokenClass::kRing || prev_ == TokenClass::kClose;
    switch (k) {
    case TokenClass::kAtom:
      return true;
    case TokenClass::kBond:
      return after_atom || prev_ == TokenClass::kOpen;
    case TokenClass::kOpen:
      return after_atom;
    case TokenClass::kClose:
      return depth_ > 0 && after_atom;
    case TokenClass::kRing: {
      if (!(prev_ == TokenClass::kAtom || prev_ == TokenClass::kRing ||
            prev_ == TokenClass::kBond))
        return false;
      auto it = std::find(open_.begin(), open_.end(), token);
      if (it == open_.end()) return true;
      return opened_here_.end() ==
             std::find(opened_here_.begin(), opened_here_.end(), token);
    }
    case TokenClass::kDot:
      return false;
    case TokenClass::kEnd:
      return depth_ == 0 && open_.empty() && after_atom;
    }
    return false;
  }

  /// Tokens that move towards a state where the string may end.
  bool closes(TokenClass k, std::string_view token) const {
    if (k == TokenClass::kClose) return true;
    return k == TokenClass::kRing && std::find(open_.begin(), open_.end(), token) != open_.end();
  }

  void push(TokenClass k, std::string_view token) {
    if (k == TokenClass::kAtom) opened_here_.clear();
    if (k == TokenClass::kOpen) ++depth_;
    if (k == TokenClass::kClose) --depth_;
    if (k == TokenClass::kRing) {
      auto it = std::find(open_.begin(), open_.end(), token);
      if (it == open_.end()) {
        open_.emplace_back(token);
        opened_here_.emplace_back(token);
      } else {
        open_.erase(it);
      }
    }
    prev_ = k;
  }

private:
  int depth_ = 0;
  TokenClass prev_ = TokenClass::kOpen;  // the start behaves like an opened branch
  std::vector<std::string> open_;
  std::vector<std::string> opened_here_;
};

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out{std::string(kBosToken)};
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '[') {
      const auto close = s.find(']', i);
      if (close == std::string_view::npos)
        throw TokenizeError(fmt::format("unclosed bracket at {} in '{}'", i, s));
      out.emplace_back(s.substr(i, close - i + 1));
      i = close + 1;
    } else if (c == '%') {
      if (i + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s[i + 2])))
        throw TokenizeError(fmt::format("bad ring label at {} in '{}'", i, s));
      out.emplace_back(s.substr(i, 3));
      i += 3;
    } else if ((c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') ||
               (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r')) {
      out.emplace_back(s.substr(i, 2));
      i += 2;
    } else if (single_char_token(c)) {
      out.emplace_back(1, c);
      ++i;
    } else {
      throw TokenizeError(fmt::format("unexpected character '{}' at {} in '{}'", c, i, s));
    }
  }
  out.emplace_back(kEosToken);
  return out;
}

std::string detokenize(const std::vector<std::string> &tokens) {
  std::string out;
  for (const auto &t : tokens)
    if (t != kBosToken && t != kEosToken) out += t;
  return out;
}

std::string NgramModel::key(const int *ids, int len) {
  std::string k(static_cast<std::size_t>(len) * 4, '\0');
  for (int i = 0; i < len; ++i)
    for (int b = 0; b < 4; ++b)
      k[i * 4 + b] = static_cast<char>((static_cast<std::uint32_t>(ids[i]) >> (8 * b)) & 0xffu);
  return k;
}

int NgramModel::token_id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

int NgramModel::intern(const std::string &token) {
  auto [it, inserted] = index_.emplace(token, static_cast<int>(vocab_.size()));
  if (inserted) vocab_.push_back(token);
  return it->second;
}

void NgramModel::add_string(const std::vector<std::string> &tokens, double weight) {
  std::vector<int> history(order_, kBos);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const int id = intern(tokens[i]);
    for (int len = 0; len <= order_; ++len) {
      Counts &c = counts_[key(history.data() + history.size() - len, len)];
      auto it = std::lower_bound(c.entries.begin(), c.entries.end(), std::make_pair(id, -1.0),
                                 [](const auto &a, const auto &b) { return a.first < b.first; });
      if (it != c.entries.end() && it->first == id)
        it->second += weight;
      else
        c.entries.insert(it, {id, weight});
      c.total += weight;
    }
    history.push_back(id);
  }
}

NgramModel NgramModel::train(const std::vector<std::string> &corpus, int order, double alpha) {
  if (corpus.empty()) throw EmptyInput("training corpus is empty");
  if (order < 0) throw std::invalid_argument("n-gram order must be non-negative");
  if (alpha < 0) throw std::invalid_argument("smoothing alpha must be non-negative");
  NgramModel m;
  m.order_ = order;
  m.alpha_ = alpha;
  m.intern(std::string(kBosToken));
  m.intern(std::string(kEosToken));
  for (const auto &s : corpus) m.add_string(tokenize(s), 1.0);
  return m;
}

const NgramModel::Counts &NgramModel::context_for(const std::vector<int> &history) const {
  std::vector<int> padded(order_, kBos);
  padded.insert(padded.end(), history.end() - std::min<std::ptrdiff_t>(history.size(), order_),
                history.end());
  for (int len = order_; len > 0; --len) {
    auto it = counts_.find(key(padded.data() + padded.size() - len, len));
    if (it != counts_.end() && it->second.total > 0) return it->second;
  }
  return counts_.at(std::string());
}

std::vector<double> NgramModel::distribution(const std::vector<int> &history) const {
  const Counts &c = context_for(history);
  const double v = static_cast<double>(vocab_.size() - 1);
  const double denom = c.total + alpha_ * v;
  std::vector<double> p(vocab_.size(), alpha_ / denom);
  p[kBos] = 0.0;
  for (const auto &[id, n] : c.entries) p[id] += n / denom;
  return p;
}

std::string NgramModel::sample_one(std::mt19937_64 &rng, int max_len, bool syntax_guard) const {
  std::vector<int> history;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::string out;
  std::vector<TokenClass> classes;
  classes.reserve(vocab_.size());
  for (const auto &t : vocab_) classes.push_back(t == kBosToken ? TokenClass::kDot : classify_token(t));
  SyntaxGuard guard;
  while (static_cast<int>(history.size()) < max_len) {
    auto p = distribution(history);
    if (syntax_guard) {
      std::vector<double> masked = p;
      for (std::size_t t = 0; t < masked.size(); ++t)
        if (!guard.allows(classes[t], vocab_[t])) masked[t] = 0;
      if (masked[kEos] == 0 && p[kEos] > 0) {
        // The model wants to stop: hand that mass to branch and ring closures.
        double closing = 0;
        for (std::size_t t = 0; t < masked.size(); ++t)
          if (masked[t] > 0 && guard.closes(classes[t], vocab_[t])) closing += masked[t];
        if (closing > 0)
          for (std::size_t t = 0; t < masked.size(); ++t)
            if (masked[t] > 0 && guard.closes(classes[t], vocab_[t]))
              masked[t] += p[kEos] * masked[t] / closing;
      }
      double mass = 0;
      for (double x : masked) mass += x;
      if (mass > 0) {
        for (double &x : masked) x /= mass;
        p = std::move(masked);
      }
    }
    double u = unit(rng);
    int pick = static_cast<int>(p.size()) - 1;
    for (int t = 0; t < static_cast<int>(p.size()); ++t) {
      if (p[t] <= 0) continue;
      if (u < p[t]) {
        pick = t;
        break;
      }
      u -= p[t];
    }
    while (p[pick] <= 0) --pick;  // rounding left u past the last live token
    if (pick == kEos) break;
    guard.push(classes[pick], vocab_[pick]);
    history.push_back(pick);
    out += vocab_[pick];
  }
  return out;
}

std::vector<std::string> NgramModel::sample(std::size_t n, std::mt19937_64 &rng, int max_len,
                                            bool syntax_guard) const {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(rng, max_len, syntax_guard));
  return out;
}

double NgramModel::log_likelihood(std::string_view smiles) const {
  const auto tokens = tokenize(smiles);
  std::vector<int> history;
  double ll = 0;
  const double v = static_cast<double>(vocab_.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const int id = token_id(tokens[i]);
    double p;
    if (id < 0) {
      const Counts &c = context_for(history);
      p = alpha_ / (c.total + alpha_ * v);
    } else {
      p = distribution(history)[id];
    }
    ll += p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    history.push_back(id);  // -1 never matches a stored context
  }
  return ll;
}

double NgramModel::perplexity(const std::vector<std::string> &smiles) const {
  double ll = 0;
  std::size_t n = 0;
  for (const auto &s : smiles) {
    ll += log_likelihood(s);
    n += tokenize(s).size() - 1;
  }
  return n == 0 ? 1.0 : std::exp(-ll / static_cast<double>(n));
}

NgramModel NgramModel::fine_tune(const std::vector<std::string> &buffer, double lambda) const {
  if (buffer.empty()) throw EmptyInput("fine-tune buffer is empty");
  if (lambda < 0) throw std::invalid_argument("fine-tune weight must be non-negative");
  NgramModel m = *this;
  if (lambda == 0) return m;
  for (const auto &s : buffer) m.add_string(tokenize(s), lambda);
  return m;
}

NgramModel NgramModel::fine_tune(const std::vector<std::pair<std::string, double>> &buffer,
                                 double lambda) const {
  std::vector<std::string> smiles;
  smiles.reserve(buffer.size());
  for (const auto &entry : buffer) smiles.push_back(entry.first);
  return fine_tune(smiles, lambda);
}

std::vector<std::vector<int>> NgramModel::contexts() const {
  std::vector<std::vector<int>> out;
  for (const auto &[k, c] : counts_) {
    std::vector<int> ids(k.size() / 4);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(k[i * 4 + b])) << (8 * b);
      ids[i] = static_cast<int>(v);
    }
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void NgramModel::save(std::ostream &out) const {
  using namespace detail;
  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  put_u32(out, static_cast<std::uint32_t>(order_));
  put_f64(out, alpha_);
  put_u32(out, static_cast<std::uint32_t>(vocab_.size()));
  for (const auto &t : vocab_) put_string(out, t);
  const auto ctxs = contexts();
  put_u64(out, ctxs.size());
  for (const auto &ctx : ctxs) {
    put_u32(out, static_cast<std::uint32_t>(ctx.size()));
    for (int id : ctx) put_u32(out, static_cast<std::uint32_t>(id));
    const Counts &c = counts_.at(key(ctx.data(), static_cast<int>(ctx.size())));
    put_u32(out, static_cast<std::uint32_t>(c.entries.size()));
    for (const auto &[id, n] : c.entries) {
      put_u32(out, static_cast<std::uint32_t>(id));
      put_f64(out, n);
    }
  }
}

NgramModel NgramModel::load(std::istream &in) {
  detail::Reader<ModelFormatError> r(in);
  r.expect_magic(kModelMagic);
  NgramModel m;
  m.order_ = static_cast<int>(r.u32());
  m.alpha_ = r.f64();
  if (m.order_ > 64 || !(m.alpha_ >= 0)) throw ModelFormatError("bad model header");
  const std::uint32_t v = r.u32();
  for (std::uint32_t i = 0; i < v; ++i) {
    const std::string t = r.string(4096);
    if (m.intern(t) != static_cast<int>(i)) throw ModelFormatError("duplicate vocabulary token");
  }
  if (v < 2 || m.vocab_[kBos] != kBosToken || m.vocab_[kEos] != kEosToken)
    throw ModelFormatError("vocabulary lacks BOS/EOS");
  const std::uint64_t records = r.u64();
  for (std::uint64_t i = 0; i < records; ++i) {
    const std::uint32_t len = r.u32();
    if (len > static_cast<std::uint32_t>(m.order_)) throw ModelFormatError("context too long");
    std::vector<int> ctx(len);
    for (auto &id : ctx) {
      id = static_cast<int>(r.u32());
      if (id < 0 || id >= static_cast<int>(v)) throw ModelFormatError("token id out of range");
    }
    Counts c;
    const std::uint32_t n = r.u32();
    if (n > v) throw ModelFormatError("too many entries in context");
    for (std::uint32_t j = 0; j < n; ++j) {
      const int id = static_cast<int>(r.u32());
      const double count = r.f64();
      if (id < 0 || id >= static_cast<int>(v) || !(count >= 0))
        throw ModelFormatError("bad count entry");
      c.entries.emplace_back(id, count);
      c.total += count;
    }
    std::sort(c.entries.begin(), c.entries.end());
    m.counts_[key(ctx.data(), static_cast<int>(len))] = std::move(c);
  }
  if (!m.counts_.count(std::string())) throw ModelFormatError("model has no unigram counts");
  return m;
}

void NgramModel::save_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  save(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

NgramModel NgramModel::load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

void NgramModel::dump_text(std::ostream &out) const {
  out << "order " << order_ << " alpha " << alpha_ << " vocab " << vocab_.size()
      << " contexts " << counts_.size() << '\n';
  for (const auto &ctx : contexts()) {
    std::string line;
    for (int id : ctx) line += vocab_[id] + ' ';
    line += '|';
    const Counts &c = counts_.at(key(ctx.data(), static_cast<int>(ctx.size())));
    for (const auto &[id, n] : c.entries) line += fmt::format(" {}={:g}", vocab_[id], n);
    out << line << '\n';
  }
}

bool NgramModel::operator==(const NgramModel &o) const {
  if (order_ != o.order_ || alpha_ != o.alpha_ || vocab_ != o.vocab_ ||
      counts_.size() != o.counts_.size())
    return false;
  for (const auto &[k, c] : counts_) {
    auto it = o.counts_.find(k);
    if (it == o.counts_.end() || it->second.entries != c.entries) return false;
  }
  return true;
}

GenMetrics distribution_metrics(const std::vector<std::string> &samples,
                                const std::unordered_set<std::string> &training_canonical,
                                std::uint64_t seed, double sediv_threshold,
                                std::size_t sediv_sample) {
  GenMetrics m;
  m.samples = samples.size();
  std::size_t valid = 0;
  std::unordered_set<std::string> seen;
  std::vector<Molecule> unique;
  for (const auto &s : samples) {
    try {
      Molecule mol = parse_smiles(s);
      ++valid;
      if (seen.insert(canonical_smiles(mol)).second) unique.push_back(std::move(mol));
    } catch (const ParseError &) {
    }
  }
  if (samples.empty() || valid == 0) return m;
  m.validity = static_cast<double>(valid) / samples.size();
  m.uniqueness = static_cast<double>(unique.size()) / valid;
  std::size_t novel = 0;
  for (const auto &c : seen) novel += training_canonical.count(c) == 0;
  m.novelty = static_cast<double>(novel) / unique.size();
  std::vector<Fingerprint> fps;
  fps.reserve(unique.size());
  std::size_t amines = 0;
  for (const auto &mol : unique) {
    fps.push_back(ecfp(mol));
    const AmineType t = classify_amine(mol);
    if (t == AmineType::kNotAmine) continue;
    ++amines;
    m.type_ratios[t] += 1.0;
  }
  for (auto &[t, r] : m.type_ratios) r /= static_cast<double>(unique.size());
  m.amine_ratio = static_cast<double>(amines) / unique.size();
  std::mt19937_64 rng(seed);
  m.sediv = sphere_exclusion_diversity(fps, sediv_threshold, sediv_sample, rng);
  return m;
}

std::string metrics_csv_header() {
  return "Dataset,Models,Samples,Validity,Uniqueness,Novelty,SEDiv,Amine,Primary,Secondary,"
         "Tertiary,Cyclic,Poly";
}

std::string metrics_csv_row(std::string_view dataset, std::string_view model,
                            const GenMetrics &m) {
  auto ratio = [&](AmineType t) {
    auto it = m.type_ratios.find(t);
    return it == m.type_ratios.end() ? 0.0 : it->second;
  };
  return fmt::format("{},{},{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f}",
                     dataset, model, m.samples, m.validity, m.uniqueness, m.novelty, m.sediv,
                     m.amine_ratio, ratio(AmineType::kPrimary), ratio(AmineType::kSecondary),
                     ratio(AmineType::kTertiary), ratio(AmineType::kCyclic),
                     ratio(AmineType::kPoly));
}

}  // namespace sage
