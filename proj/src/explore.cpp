//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/explore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "sage/benchmark.hpp"
#include "sage/dataset.hpp"
#include "sage/smiles.hpp"

namespace sage {
namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::size_t kCacheLimit = 1'000'000;

enum Stream { kGeneratorStream = 0, kGaStream = 1, kPoolStream = 2 };

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view v, std::string_view key) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError(fmt::format("{}: '{}' is not a valid integer", key, v));
  return out;
}

double parse_real(std::string_view v, std::string_view key) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty() || !std::isfinite(out))
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, v));
  return out;
}

bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not true or false", key, v));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view restriction_name(Restriction r) { return to_string(r); }

void apply_key(RunConfig &c, std::string_view key, std::string_view value,
               std::set<std::string> &explicit_keys) {
  explicit_keys.emplace(key);
  if (key == "iterations") {
    c.iterations = parse_integer<int>(value, key);
  } else if (key == "batch_total") {
    const auto total = parse_integer<std::size_t>(value, key);
    c.generator_batch = total / 2;
    c.ga_batch = total - total / 2;
  } else if (key == "generator_batch") {
    c.generator_batch = parse_integer<std::size_t>(value, key);
  } else if (key == "ga_batch") {
    c.ga_batch = parse_integer<std::size_t>(value, key);
  } else if (key == "buffer_size") {
    c.buffer_size = parse_integer<std::size_t>(value, key);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(value, key);
  } else if (key == "objective") {
    c.objective = std::string(value);
  } else if (key == "restriction") {
    auto r = restriction_from_string(value);
    if (!r) throw ConfigError(fmt::format("restriction: unknown value '{}'", value));
    c.restriction = *r;
  } else if (key == "finetune_lambda") {
    c.finetune_lambda = parse_real(value, key);
  } else if (key == "model") {
    c.model = std::string(value);
  } else if (key == "corpus") {
    c.corpus = std::string(value);
  } else if (key == "initial_pool") {
    c.initial_pool = parse_integer<std::size_t>(value, key);
  } else if (key.substr(0, 10) == "predictor.") {
    auto p = property_from_string(key.substr(10));
    if (!p) throw ConfigError(fmt::format("unknown property in key '{}'", key));
    c.predictors[*p] = std::string(value);
  } else if (key.substr(0, 7) == "scaler.") {
    auto p = property_from_string(key.substr(7));
    if (!p) throw ConfigError(fmt::format("unknown property in key '{}'", key));
    try {
      c.scalers[*p] = parse_scaler(value);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
  } else if (key == "mpo.include_absorption") {
    c.include_absorption = parse_bool(value, key);
  } else if (key.substr(0, 10) == "ga.weight.") {
    auto k = mutation_kind_from_string(key.substr(10));
    if (!k) throw ConfigError(fmt::format("unknown mutation kind in key '{}'", key));
    c.ga.weights[static_cast<int>(*k)] = parse_real(value, key);
  } else if (key == "ga.alphabet") {
    c.ga.alphabet.clear();
    for (auto sym : split(value, ',')) {
      auto e = element_from_symbol(sym);
      if (!e || *e == Element::H)
        throw ConfigError(fmt::format("ga.alphabet: unsupported element '{}'", sym));
      c.ga.alphabet.push_back(*e);
    }
  } else if (key == "ga.max_heavy_atoms") {
    c.ga.max_heavy_atoms = parse_integer<int>(value, key);
  } else if (key == "ga.min_ring_size") {
    c.ga.min_ring_size = parse_integer<int>(value, key);
  } else if (key == "ga.max_ring_size") {
    c.ga.max_ring_size = parse_integer<int>(value, key);
  } else if (key == "ga.max_bridge_atoms") {
    c.ga.max_bridge_atoms = parse_integer<int>(value, key);
  } else if (key == "ga.p_cross") {
    c.ga.p_cross = parse_real(value, key);
  } else if (key == "ga.retries") {
    c.ga.retries = parse_integer<int>(value, key);
  } else if (key == "ga.fallback_to_mutation") {
    c.ga.fallback_to_mutation = parse_bool(value, key);
  } else if (key == "ga.require_amine") {
    c.ga.require_amine = parse_bool(value, key);
  } else if (key == "ngram.order") {
    c.ngram_order = parse_integer<int>(value, key);
  } else if (key == "ngram.alpha") {
    c.ngram_alpha = parse_real(value, key);
  } else if (key == "ngram.max_len") {
    c.max_len = parse_integer<int>(value, key);
  } else if (key == "threads") {
    c.threads = parse_integer<int>(value, key);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

std::string format_real(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.6f}", v);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

bool same_real(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool better(const Scored &a, const Scored &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.smiles < b.smiles;
}

// Objectives ---------------------------------------------------------------

class PropertyObjective final : public Objective {
public:
  PropertyObjective(std::optional<SpoObjective> spo, Restriction restriction, PredictorSet preds,
                    ScalerMap scalers, bool include_absorption)
      : spo_(spo), restriction_(restriction), preds_(std::move(preds)),
        scalers_(std::move(scalers)), include_absorption_(include_absorption) {
    if (spo_) {
      props_ = {objective_property(*spo_)};
    } else {
      props_.assign(kMpoProperties.begin(), kMpoProperties.end());
      if (include_absorption_) props_.push_back(Property::kCo2Absorption);
    }
  }

  std::vector<std::string> component_names() const override {
    std::vector<std::string> names;
    for (Property p : props_) {
      names.emplace_back(to_string(p));
      names.push_back(fmt::format("{}_score", to_string(p)));
    }
    return names;
  }

  Scored score(const Molecule &mol) const override {
    const ScoreResult r = spo_ ? spo_score(mol, *spo_, restriction_, preds_, scalers_)
                               : mpo_score(mol, restriction_, preds_, scalers_, include_absorption_);
    Scored s;
    s.score = r.score;
    s.type = r.type;
    for (Property p : props_) {
      s.components.push_back(r.raw.at(p));
      s.components.push_back(r.scaled.at(p));
    }
    return s;
  }

private:
  std::optional<SpoObjective> spo_;
  Restriction restriction_;
  PredictorSet preds_;
  ScalerMap scalers_;
  bool include_absorption_;
  std::vector<Property> props_;
};

class TaskObjective final : public Objective {
public:
  TaskObjective(BenchmarkTask task, Restriction restriction)
      : task_(std::move(task)), restriction_(restriction) {}

  std::vector<std::string> component_names() const override { return {"task_score"}; }

  Scored score(const Molecule &mol) const override {
    const auto sites = find_amine_sites(mol);
    if (sites.empty()) throw NotAmine("molecule has no amine nitrogen");
    Scored s;
    s.type = classify_amine(sites);
    const double v = molecule_task_score(task_, mol);
    s.components = {v};
    s.score = combine_components({v}, !matches_restriction(s.type, restriction_));
    return s;
  }

private:
  BenchmarkTask task_;
  Restriction restriction_;
};

struct ObjectiveSpec {
  std::string kind;  // spo, mpo, rediscovery, similarity, median, isomer
  std::string arg;
};

ObjectiveSpec split_objective(std::string_view text) {
  const auto colon = text.find(':');
  ObjectiveSpec s{std::string(text.substr(0, colon)),
                  colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1))};
  static const std::set<std::string> kinds{"spo",        "mpo",    "rediscovery",
                                           "similarity", "median", "isomer"};
  if (!kinds.count(s.kind))
    throw ConfigError(fmt::format("objective: unknown kind '{}'", s.kind));
  if (s.kind == "mpo" ? !s.arg.empty() : s.arg.empty())
    throw ConfigError(fmt::format("objective: malformed '{}'", text));
  if (s.kind == "spo" && !spo_objective_from_string(s.arg))
    throw ConfigError(fmt::format("objective: unknown SPO target '{}'", s.arg));
  return s;
}

std::vector<Property> needed_properties(const RunConfig &c, const ObjectiveSpec &spec) {
  if (spec.kind == "spo") {
    auto o = spo_objective_from_string(spec.arg);
    if (!o) throw ConfigError(fmt::format("objective: unknown SPO target '{}'", spec.arg));
    return {objective_property(*o)};
  }
  if (spec.kind == "mpo") {
    std::vector<Property> props(kMpoProperties.begin(), kMpoProperties.end());
    if (c.include_absorption) props.push_back(Property::kCo2Absorption);
    return props;
  }
  return {};
}

std::shared_ptr<const Objective> build_objective(const RunConfig &c, PredictorSet preds) {
  const ObjectiveSpec spec = split_objective(c.objective);
  for (Property p : needed_properties(c, spec))
    if (!preds.predictors.count(p) && !(p == Property::kPka && preds.pka_sites))
      throw ConfigError(
          fmt::format("objective {} needs predictor.{}", c.objective, to_string(p)));
  if (spec.kind == "spo")
    return std::make_shared<PropertyObjective>(spo_objective_from_string(spec.arg),
                                               c.restriction, std::move(preds),
                                               c.effective_scalers(), false);
  if (spec.kind == "mpo")
    return std::make_shared<PropertyObjective>(std::nullopt, c.restriction, std::move(preds),
                                               c.effective_scalers(), c.include_absorption);
  BenchmarkTask task;
  try {
    if (spec.kind == "rediscovery") {
      task = rediscovery_task(spec.arg);
    } else if (spec.kind == "similarity") {
      task = similarity_task(spec.arg);
    } else if (spec.kind == "isomer") {
      task = isomer_task(spec.arg);
    } else {
      const auto parts = split(spec.arg, ',');
      if (parts.size() != 2) throw ConfigError("objective: median needs two targets");
      task = median_task(parts[0], parts[1]);
    }
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(fmt::format("objective {}: {}", c.objective, e.what()));
  }
  return std::make_shared<TaskObjective>(std::move(task), c.restriction);
}

// Gate chain ----------------------------------------------------------------

struct GateCounts {
  std::size_t generated = 0, valid = 0, amine = 0, restriction_pass = 0;
};

// Passes `text` through read -> radical-free -> valence -> amine. Returns the
// canonical SMILES and molecule of amines.
std::optional<std::pair<std::string, Molecule>> gate(std::string_view text, Restriction r,
                                                     GateCounts &counts) {
  ++counts.generated;
  AtomGraph graph;
  try {
    graph = read_smiles_graph(text);
  } catch (const ParseError &) {
    return std::nullopt;
  }
  if (!is_radical_free(graph)) return std::nullopt;
  std::optional<Molecule> mol;
  try {
    mol = Molecule::from_graph(std::move(graph));
  } catch (const ParseError &) {
    return std::nullopt;
  }
  ++counts.valid;
  const auto sites = find_amine_sites(*mol);
  if (sites.empty()) return std::nullopt;
  ++counts.amine;
  if (matches_restriction(classify_amine(sites), r)) ++counts.restriction_pass;
  std::string canonical = canonical_smiles(*mol);
  return std::make_pair(std::move(canonical), std::move(*mol));
}

// Checkpoint encoding -------------------------------------------------------

void put_stats(std::ostream &out, const IterationStats &s) {
  using namespace detail;
  put_u32(out, static_cast<std::uint32_t>(s.iteration));
  for (std::size_t v : {s.generated, s.valid, s.amine, s.restriction_pass, s.scored, s.failed})
    put_u64(out, v);
  for (double v : {s.min, s.q1, s.median, s.q3, s.max, s.buffer_best}) put_f64(out, v);
  put_u64(out, s.buffer_size);
  for (std::uint64_t v : {s.ga.attempted, s.ga.succeeded, s.ga.rejected_no_site,
                          s.ga.rejected_valence, s.ga.rejected_not_amine, s.ga.rejected_too_large})
    put_u64(out, v);
}

IterationStats get_stats(detail::Reader<CorruptCheckpoint> &r) {
  IterationStats s;
  s.iteration = static_cast<int>(r.u32());
  for (std::size_t *v : {&s.generated, &s.valid, &s.amine, &s.restriction_pass, &s.scored,
                         &s.failed})
    *v = r.u64();
  for (double *v : {&s.min, &s.q1, &s.median, &s.q3, &s.max, &s.buffer_best}) *v = r.f64();
  s.buffer_size = r.u64();
  for (std::uint64_t *v : {&s.ga.attempted, &s.ga.succeeded, &s.ga.rejected_no_site,
                           &s.ga.rejected_valence, &s.ga.rejected_not_amine,
                           &s.ga.rejected_too_large})
    *v = r.u64();
  return s;
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

// RunConfig -----------------------------------------------------------------

ScalerMap RunConfig::effective_scalers() const {
  ScalerMap s = default_scalers();
  for (const auto &[p, spec] : scalers) s[p] = spec;
  return s;
}

std::string RunConfig::resolve(const std::string &path) const {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string RunConfig::to_text() const {
  std::map<std::string, std::string> kv;
  kv["profile"] = profile;
  kv["iterations"] = std::to_string(iterations);
  kv["batch_total"] = std::to_string(batch_total());
  kv["generator_batch"] = std::to_string(generator_batch);
  kv["ga_batch"] = std::to_string(ga_batch);
  kv["buffer_size"] = std::to_string(buffer_size);
  kv["seed"] = std::to_string(seed);
  kv["objective"] = objective;
  kv["restriction"] = std::string(restriction_name(restriction));
  kv["finetune_lambda"] = fmt::format("{}", finetune_lambda);
  kv["model"] = model;
  kv["corpus"] = corpus;
  kv["initial_pool"] = std::to_string(initial_pool);
  for (const auto &[p, spec] : predictors) kv[fmt::format("predictor.{}", to_string(p))] = spec;
  for (const auto &[p, spec] : scalers)
    kv[fmt::format("scaler.{}", to_string(p))] =
        fmt::format("{}:{}:{}", spec.lo, spec.hi, spec.increasing ? "inc" : "dec");
  kv["mpo.include_absorption"] = include_absorption ? "true" : "false";
  for (int k = 0; k < kMutationKindCount; ++k)
    kv[fmt::format("ga.weight.{}", to_string(static_cast<MutationKind>(k)))] =
        fmt::format("{}", ga.weights[k]);
  std::string alphabet;
  for (Element e : ga.alphabet) {
    if (!alphabet.empty()) alphabet += ',';
    alphabet += element_symbol(e);
  }
  kv["ga.alphabet"] = alphabet;
  kv["ga.max_heavy_atoms"] = std::to_string(ga.max_heavy_atoms);
  kv["ga.min_ring_size"] = std::to_string(ga.min_ring_size);
  kv["ga.max_ring_size"] = std::to_string(ga.max_ring_size);
  kv["ga.max_bridge_atoms"] = std::to_string(ga.max_bridge_atoms);
  kv["ga.p_cross"] = fmt::format("{}", ga.p_cross);
  kv["ga.retries"] = std::to_string(ga.retries);
  kv["ga.fallback_to_mutation"] = ga.fallback_to_mutation ? "true" : "false";
  kv["ga.require_amine"] = ga.require_amine ? "true" : "false";
  kv["ngram.order"] = std::to_string(ngram_order);
  kv["ngram.alpha"] = fmt::format("{}", ngram_alpha);
  kv["ngram.max_len"] = std::to_string(max_len);
  kv["threads"] = std::to_string(threads);
  std::string out;
  for (const auto &[k, v] : kv) out += fmt::format("{}={}\n", k, v);
  return out;
}

RunConfig paper_profile() { return RunConfig{}; }

RunConfig desk_profile() {
  RunConfig c;
  c.profile = "desk";
  c.iterations = 30;
  c.generator_batch = 1024;
  c.ga_batch = 1024;
  c.buffer_size = 256;
  return c;
}

RunConfig parse_run_config(std::string_view text, const std::string &base_dir) {
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected key=value", line_no));
    Entry e{line_no, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))};
    if (e.key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    if (!seen.insert(e.key).second)
      throw ConfigError(fmt::format("line {}: key '{}' repeated", line_no, e.key));
    entries.push_back(std::move(e));
  }
  RunConfig c = paper_profile();
  for (const auto &e : entries) {
    if (e.key != "profile") continue;
    if (e.value == "paper")
      c = paper_profile();
    else if (e.value == "desk")
      c = desk_profile();
    else
      throw ConfigError(fmt::format("line {}: profile must be paper or desk", e.line));
  }
  std::set<std::string> explicit_keys;
  for (const auto &e : entries) {
    if (e.key == "profile") continue;
    try {
      apply_key(c, e.key, e.value, explicit_keys);
    } catch (const ConfigError &err) {
      throw ConfigError(fmt::format("line {}: {}", e.line, err.what()));
    }
  }
  if (explicit_keys.count("batch_total") &&
      (explicit_keys.count("generator_batch") || explicit_keys.count("ga_batch"))) {
    std::size_t total = 0;
    for (const auto &e : entries)
      if (e.key == "batch_total") total = parse_integer<std::size_t>(e.value, e.key);
    if (explicit_keys.count("generator_batch") && !explicit_keys.count("ga_batch"))
      c.ga_batch = total >= c.generator_batch ? total - c.generator_batch : 0;
    if (explicit_keys.count("ga_batch") && !explicit_keys.count("generator_batch"))
      c.generator_batch = total >= c.ga_batch ? total - c.ga_batch : 0;
    if (c.generator_batch + c.ga_batch != total)
      throw ConfigError(fmt::format("generator_batch + ga_batch = {} but batch_total = {}",
                                    c.generator_batch + c.ga_batch, total));
  }
  c.base_dir = base_dir;
  split_objective(c.objective);
  return c;
}

RunConfig load_run_config(const std::string &path) {
  const std::string text = read_file(path);
  fs::path dir = fs::absolute(fs::path(path)).parent_path();
  return parse_run_config(text, dir.lexically_normal().string());
}

void validate(const RunConfig &c) {
  auto fail = [](const std::string &msg) { throw ConfigError(msg); };
  if (c.iterations < 0) fail("iterations must be non-negative");
  if (c.buffer_size == 0) fail("buffer_size must be positive");
  if (c.iterations > 0 && c.batch_total() == 0) fail("batch_total must be positive");
  if (c.buffer_size > c.batch_total() * static_cast<std::size_t>(std::max(c.iterations, 1)))
    fail("buffer_size exceeds the number of molecules the run can generate");
  if (c.generator_batch > 0 && c.model.empty() && c.corpus.empty())
    fail("generator_batch > 0 needs a model or a corpus to train one");
  if (c.ga_batch > 0 && c.generator_batch == 0 && c.corpus.empty())
    fail("a GA-only run needs a corpus for its initial pool");
  if (!(c.finetune_lambda >= 0)) fail("finetune_lambda must be non-negative");
  if (c.threads < 1) fail("threads must be at least 1");
  if (c.ngram_order < 1) fail("ngram.order must be at least 1");
  if (!(c.ngram_alpha >= 0)) fail("ngram.alpha must be non-negative");
  if (c.max_len < 1) fail("ngram.max_len must be positive");
  if (c.ga.p_cross < 0 || c.ga.p_cross > 1) fail("ga.p_cross must lie in [0, 1]");
  if (c.ga.min_ring_size < 3 || c.ga.max_ring_size < c.ga.min_ring_size)
    fail("ring sizes need 3 <= ga.min_ring_size <= ga.max_ring_size");
  if (c.ga.max_heavy_atoms < 1) fail("ga.max_heavy_atoms must be positive");
  if (c.ga.retries < 1) fail("ga.retries must be positive");
  if (c.ga.alphabet.empty()) fail("ga.alphabet is empty");
  double weight = 0;
  for (double w : c.ga.weights) {
    if (w < 0) fail("ga weights must be non-negative");
    weight += w;
  }
  if (c.ga_batch > 0 && weight == 0) fail("all ga weights are zero");
  if (c.initial_pool == 0 && c.ga_batch > 0 && c.generator_batch == 0)
    fail("initial_pool must be positive for a GA-only run");
  split_objective(c.objective);
}

std::shared_ptr<const Objective> make_objective(const RunConfig &config) {
  PredictorSet preds;
  const ObjectiveSpec spec = split_objective(config.objective);
  for (Property p : needed_properties(config, spec)) {
    auto it = config.predictors.find(p);
    if (it == config.predictors.end())
      throw ConfigError(
          fmt::format("objective {} needs predictor.{}", config.objective, to_string(p)));
    preds.predictors[p] = make_predictor(it->second, config.base_dir);
  }
  return build_objective(config, std::move(preds));
}

std::shared_ptr<const Objective> make_objective(const RunConfig &config, PredictorSet predictors) {
  return build_objective(config, std::move(predictors));
}

// Statistics ----------------------------------------------------------------

bool IterationStats::operator==(const IterationStats &o) const {
  return iteration == o.iteration && generated == o.generated && valid == o.valid &&
         amine == o.amine && restriction_pass == o.restriction_pass && scored == o.scored &&
         failed == o.failed && same_real(min, o.min) && same_real(q1, o.q1) &&
         same_real(median, o.median) && same_real(q3, o.q3) && same_real(max, o.max) &&
         buffer_best == o.buffer_best && buffer_size == o.buffer_size &&
         ga.attempted == o.ga.attempted && ga.succeeded == o.ga.succeeded &&
         ga.rejected() == o.ga.rejected();
}

std::array<double, 5> five_number_summary(std::vector<double> v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty()) return {nan, nan, nan, nan, nan};
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

std::uint64_t stream_seed(std::uint64_t seed, int iteration, int stream) {
  return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(iteration)) ^
               static_cast<std::uint64_t>(stream));
}

std::string stats_csv_header() {
  return "iteration,generated,valid,amine,restriction_pass,scored,failed,min,q1,median,q3,max,"
         "buffer_best,buffer_size,ga_attempted,ga_succeeded,ga_rejected";
}

// Explorer ------------------------------------------------------------------

Explorer::Explorer(RunConfig config) : Explorer(config, make_objective(config), RunState{}) {}

Explorer::Explorer(RunConfig config, std::shared_ptr<const Objective> objective)
    : Explorer(std::move(config), std::move(objective), RunState{}) {}

Explorer::Explorer(RunConfig config, std::shared_ptr<const Objective> objective, RunState state)
    : config_(std::move(config)), objective_(std::move(objective)), state_(std::move(state)) {
  validate(config_);
  if (!objective_) throw ConfigError("no objective");
  if (!config_.corpus.empty()) {
    try {
      corpus_ = read_smiles_file(config_.resolve(config_.corpus));
    } catch (const std::exception &e) {
      throw ConfigError(fmt::format("corpus: {}", e.what()));
    }
  }
  if (config_.generator_batch > 0 && !state_.model) {
    if (!config_.model.empty()) {
      try {
        state_.model = NgramModel::load_file(config_.resolve(config_.model));
      } catch (const std::exception &e) {
        throw ConfigError(fmt::format("model: {}", e.what()));
      }
    } else {
      try {
        state_.model = NgramModel::train(corpus_, config_.ngram_order, config_.ngram_alpha);
      } catch (const std::exception &e) {
        throw ConfigError(fmt::format("training on corpus: {}", e.what()));
      }
    }
  }
}

std::vector<Molecule> Explorer::initial_pool(std::mt19937_64 &rng) const {
  std::vector<std::size_t> order(corpus_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Molecule> pool;
  for (std::size_t i : order) {
    if (pool.size() >= config_.initial_pool) break;
    try {
      Molecule m = parse_smiles(corpus_[i]);
      if (is_amine(m)) pool.push_back(std::move(m));
    } catch (const ParseError &) {
    }
  }
  return pool;
}

std::vector<std::optional<Scored>> Explorer::score_all(
    const std::vector<const Molecule *> &mols) const {
  std::vector<std::optional<Scored>> out(mols.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = objective_->score(*mols[i]);
      } catch (const std::exception &) {
        out[i] = std::nullopt;
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config_.threads), mols.size());
  if (threads <= 1) {
    work(0, mols.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (mols.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk, end = std::min(mols.size(), begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (auto &th : pool) th.join();
  return out;
}

const IterationStats &Explorer::step() {
  const int it = state_.iteration;
  IterationStats st;
  st.iteration = it + 1;
  GateCounts counts;

  // Amines of this iteration in first-seen order, keyed by canonical SMILES.
  std::vector<std::pair<std::string, Molecule>> amines;
  std::unordered_set<std::string> seen;
  auto admit = [&](std::string_view text) {
    auto g = gate(text, config_.restriction, counts);
    if (g && seen.insert(g->first).second) amines.push_back(std::move(*g));
  };

  if (state_.model && config_.generator_batch > 0) {
    std::mt19937_64 rng(stream_seed(config_.seed, it, kGeneratorStream));
    for (const auto &s : state_.model->sample(config_.generator_batch, rng, config_.max_len))
      admit(s);
  }

  if (config_.ga_batch > 0) {
    std::vector<Molecule> pool;
    std::unordered_set<std::string> in_pool;
    for (const auto &entry : state_.buffer)
      if (in_pool.insert(entry.smiles).second) pool.push_back(parse_smiles(entry.smiles));
    for (const auto &[smiles, mol] : amines)
      if (in_pool.insert(smiles).second) pool.push_back(mol);
    if (pool.empty()) {
      std::mt19937_64 rng(stream_seed(config_.seed, it, kPoolStream));
      pool = initial_pool(rng);
    }
    if (!pool.empty()) {
      std::mt19937_64 rng(stream_seed(config_.seed, it, kGaStream));
      const auto kids = diversify_batch(pool, config_.ga_batch, rng, config_.ga, &st.ga);
      for (const auto &kid : kids) admit(canonical_smiles(kid));
      // Requested offspring that could not be produced still count as generated.
      counts.generated += config_.ga_batch - std::min(config_.ga_batch, kids.size());
    }
  }

  std::vector<const Molecule *> pending;
  std::vector<std::size_t> pending_index;
  for (std::size_t i = 0; i < amines.size(); ++i) {
    if (cache_.count(amines[i].first)) continue;
    pending.push_back(&amines[i].second);
    pending_index.push_back(i);
  }
  if (cache_.size() + pending.size() > kCacheLimit) cache_.clear();
  auto results = score_all(pending);
  for (std::size_t j = 0; j < pending.size(); ++j) {
    if (results[j]) results[j]->smiles = amines[pending_index[j]].first;
    cache_[amines[pending_index[j]].first] = std::move(results[j]);
  }

  std::vector<double> scores;
  std::vector<Scored> fresh;
  std::unordered_set<std::string> in_buffer;
  for (const auto &entry : state_.buffer) in_buffer.insert(entry.smiles);
  for (const auto &[smiles, mol] : amines) {
    auto it_cache = cache_.find(smiles);
    std::optional<Scored> s;
    if (it_cache != cache_.end()) {
      s = it_cache->second;
    } else {
      try {
        s = objective_->score(mol);
        s->smiles = smiles;
      } catch (const std::exception &) {
      }
    }
    if (!s) {
      ++st.failed;
      continue;
    }
    ++st.scored;
    scores.push_back(s->score);
    if (!in_buffer.count(smiles)) fresh.push_back(std::move(*s));
  }

  std::vector<Scored> merged = state_.buffer;
  merged.insert(merged.end(), std::make_move_iterator(fresh.begin()),
                std::make_move_iterator(fresh.end()));
  std::sort(merged.begin(), merged.end(), better);
  if (merged.size() > config_.buffer_size) merged.resize(config_.buffer_size);
  state_.buffer = std::move(merged);

  if (state_.model && config_.finetune_lambda > 0 && !state_.buffer.empty()) {
    std::vector<std::string> smiles;
    smiles.reserve(state_.buffer.size());
    for (const auto &entry : state_.buffer) smiles.push_back(entry.smiles);
    state_.model = state_.model->fine_tune(smiles, config_.finetune_lambda);
  }

  st.generated = counts.generated;
  st.valid = counts.valid;
  st.amine = counts.amine;
  st.restriction_pass = counts.restriction_pass;
  const auto q = five_number_summary(std::move(scores));
  st.min = q[0];
  st.q1 = q[1];
  st.median = q[2];
  st.q3 = q[3];
  st.max = q[4];
  st.buffer_best = state_.best();
  st.buffer_size = state_.buffer.size();
  state_.stats.push_back(st);
  ++state_.iteration;
  return state_.stats.back();
}

void Explorer::run(const std::function<void(const IterationStats &)> &on_iteration) {
  while (!finished()) {
    const auto &st = step();
    if (on_iteration) on_iteration(st);
  }
}

void Explorer::save_checkpoint(const std::string &path) const {
  using namespace detail;
  std::ostringstream out(std::ios::binary);
  out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
  put_u32(out, kCheckpointVersion);
  put_string(out, config_.to_text());
  put_string(out, config_.base_dir);
  put_u32(out, static_cast<std::uint32_t>(state_.iteration));
  put_u32(out, static_cast<std::uint32_t>(state_.buffer.size()));
  for (const auto &e : state_.buffer) {
    put_string(out, e.smiles);
    put_f64(out, e.score);
    put_u32(out, static_cast<std::uint32_t>(e.type));
    put_u32(out, static_cast<std::uint32_t>(e.components.size()));
    for (double v : e.components) put_f64(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(state_.stats.size()));
  for (const auto &s : state_.stats) put_stats(out, s);
  put_u32(out, state_.model ? 1 : 0);
  if (state_.model) {
    std::ostringstream model(std::ios::binary);
    state_.model->save(model);
    put_u64(out, model.str().size());
    out << model.str();
  }
  std::string bytes = out.str();
  std::ostringstream tail(std::ios::binary);
  put_u64(tail, fnv1a64(bytes));
  bytes += tail.str();

  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  write_text(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError(fmt::format("cannot move checkpoint into {}: {}", path, ec.message()));
}

Explorer Explorer::from_checkpoint(const std::string &path, std::optional<int> iterations,
                                   std::shared_ptr<const Objective> objective) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const IoError &e) {
    throw CorruptCheckpoint(e.what());
  }
  if (bytes.size() < kCheckpointMagic.size() + 8)
    throw CorruptCheckpoint(fmt::format("{} is truncated", path));
  const std::string_view body(bytes.data(), bytes.size() - 8);
  std::uint64_t stored = 0;
  for (int b = 0; b < 8; ++b)
    stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[body.size() + b]))
              << (8 * b);
  if (body.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    throw CorruptCheckpoint(fmt::format("{} is not a checkpoint", path));
  if (fnv1a64(body) != stored)
    throw CorruptCheckpoint(fmt::format("{} fails its checksum", path));

  std::istringstream in(std::string(body), std::ios::binary);
  detail::Reader<CorruptCheckpoint> r(in);
  r.expect_magic(kCheckpointMagic);
  if (r.u32() != kCheckpointVersion) throw CorruptCheckpoint("unsupported checkpoint version");
  const std::string text = r.string();
  const std::string base_dir = r.string();
  RunConfig config;
  try {
    config = parse_run_config(text, base_dir);
  } catch (const ConfigError &e) {
    throw CorruptCheckpoint(fmt::format("stored config: {}", e.what()));
  }
  RunState state;
  state.iteration = static_cast<int>(r.u32());
  const std::uint32_t buffer_size = r.u32();
  for (std::uint32_t i = 0; i < buffer_size; ++i) {
    Scored e;
    e.smiles = r.string();
    e.score = r.f64();
    e.type = static_cast<AmineType>(r.u32());
    const std::uint32_t n = r.u32();
    if (n > 1024) throw CorruptCheckpoint("component count out of range");
    for (std::uint32_t k = 0; k < n; ++k) e.components.push_back(r.f64());
    state.buffer.push_back(std::move(e));
  }
  const std::uint32_t stats = r.u32();
  for (std::uint32_t i = 0; i < stats; ++i) state.stats.push_back(get_stats(r));
  if (r.u32() == 1) {
    const std::uint64_t n = r.u64();
    if (n > body.size()) throw CorruptCheckpoint("model size out of range");
    std::string model(n, '\0');
    in.read(model.data(), static_cast<std::streamsize>(n));
    if (!in) throw CorruptCheckpoint("unexpected end of file");
    std::istringstream model_in(model, std::ios::binary);
    try {
      state.model = NgramModel::load(model_in);
    } catch (const ModelFormatError &e) {
      throw CorruptCheckpoint(fmt::format("stored model: {}", e.what()));
    }
  }
  if (iterations) config.iterations = *iterations;
  if (!objective) objective = make_objective(config);
  return Explorer(std::move(config), std::move(objective), std::move(state));
}

std::string Explorer::stats_csv() const {
  std::string out = stats_csv_header() + "\n";
  for (const auto &s : state_.stats)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.iteration,
                       s.generated, s.valid, s.amine, s.restriction_pass, s.scored, s.failed,
                       format_real(s.min), format_real(s.q1), format_real(s.median),
                       format_real(s.q3), format_real(s.max), format_real(s.buffer_best),
                       s.buffer_size, s.ga.attempted, s.ga.succeeded, s.ga.rejected());
  return out;
}

std::string Explorer::buffer_csv() const {
  std::string out = "rank,smiles,score,type";
  for (const auto &name : objective_->component_names()) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < state_.buffer.size(); ++i) {
    const auto &e = state_.buffer[i];
    out += fmt::format("{},{},{},{}", i + 1, e.smiles, format_real(e.score), to_string(e.type));
    for (double v : e.components) out += "," + format_real(v);
    out += "\n";
  }
  return out;
}

std::string Explorer::manifest() const {
  std::string body;
  body += fmt::format("format.model={}\nformat.predictor={}\nformat.checkpoint={}\n", kModelMagic,
                      kPredictorMagic, kCheckpointMagic);
  std::istringstream cfg(config_.to_text());
  for (std::string line; std::getline(cfg, line);) body += "config." + line + "\n";
  body +=
      "finetune.mapping=lambda stands in for the neural fine-tune learning rate (0.001) and "
      "epoch count (8); every buffer molecule adds lambda to its n-gram counts each iteration\n";
  auto hash_line = [&](const std::string &role, const std::string &path) {
    std::string digest = "missing";
    try {
      digest = fmt::format("{:016x}", file_hash(path));
    } catch (const std::exception &) {
    }
    return fmt::format("file.{}={} fnv1a64={}\n", role, fs::path(path).filename().string(),
                       digest);
  };
  if (!config_.model.empty()) body += hash_line("model", config_.resolve(config_.model));
  if (!config_.corpus.empty()) body += hash_line("corpus", config_.resolve(config_.corpus));
  for (const auto &[p, spec] : config_.predictors)
    body += hash_line(fmt::format("predictor.{}", to_string(p)),
                      predictor_spec_path(spec, config_.base_dir));
  return body + fmt::format("manifest_hash={:016x}\n", fnv1a64(body));
}

void Explorer::write_reports(const std::string &out_dir) const {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir, ec.message()));
  write_text(fs::path(out_dir) / "stats.csv", stats_csv());
  write_text(fs::path(out_dir) / "buffer.csv", buffer_csv());
  write_text(fs::path(out_dir) / "manifest.txt", manifest());
}

RunState run_experiment(const RunConfig &config, const std::string &out_dir,
                        const std::function<void(const IterationStats &)> &on_iteration) {
  Explorer ex(config);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir, ec.message()));
  const std::string checkpoint = (fs::path(out_dir) / kCheckpointFile).string();
  ex.save_checkpoint(checkpoint);
  while (!ex.finished()) {
    const auto &st = ex.step();
    ex.save_checkpoint(checkpoint);
    if (on_iteration) on_iteration(st);
  }
  ex.write_reports(out_dir);
  return ex.state();
}

std::optional<RunState> resume_experiment(
    const std::string &out_dir, std::optional<int> iterations,
    const std::function<void(const IterationStats &)> &on_iteration) {
  const std::string checkpoint = (fs::path(out_dir) / kCheckpointFile).string();
  Explorer ex = Explorer::from_checkpoint(checkpoint, iterations);
  if (ex.finished()) {
    ex.write_reports(out_dir);
    return std::nullopt;
  }
  while (!ex.finished()) {
    const auto &st = ex.step();
    ex.save_checkpoint(checkpoint);
    if (on_iteration) on_iteration(st);
  }
  ex.write_reports(out_dir);
  return ex.state();
}

}  // namespace sage
