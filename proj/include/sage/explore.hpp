//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sage/chemclass.hpp"
#include "sage/genops.hpp"
#include "sage/ngram.hpp"
#include "sage/scoring.hpp"

namespace sage {

inline constexpr std::string_view kCheckpointMagic = "SAGC1";
inline constexpr std::string_view kCheckpointFile = "checkpoint.sagc";

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class CorruptCheckpoint : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Loop settings. Relative paths resolve against `base_dir`, which is the
/// directory of the config file and is not itself a config key.
struct RunConfig {
  std::string profile = "paper";
  int iterations = 100;
  std::size_t generator_batch = 8192;
  std::size_t ga_batch = 8192;
  std::size_t buffer_size = 1024;
  std::uint64_t seed = 0;
  std::string objective = "mpo";
  Restriction restriction = Restriction::kNone;
  double finetune_lambda = 1.0;
  std::string model;
  std::string corpus;
  std::size_t initial_pool = 16384;
  std::map<Property, std::string> predictors;
  std::map<Property, ScalerSpec> scalers;  // overrides on top of default_scalers()
  bool include_absorption = false;
  MutationConfig ga;
  int ngram_order = NgramModel::kDefaultOrder;
  double ngram_alpha = NgramModel::kDefaultAlpha;
  int max_len = NgramModel::kDefaultMaxLen;
  int threads = 1;
  std::string base_dir = ".";

  std::size_t batch_total() const { return generator_batch + ga_batch; }
  ScalerMap effective_scalers() const;
  std::string resolve(const std::string &path) const;

  /// Every key with its effective value, one `key=value` per line, sorted.
  /// Parsing this text gives back an equal configuration.
  std::string to_text() const;
};

RunConfig paper_profile();
RunConfig desk_profile();

/// Flat `key=value` text; `#` starts a comment. The profile is applied first
/// wherever it appears, then the other keys in order. Unknown keys and bad
/// values throw ConfigError naming the line.
RunConfig parse_run_config(std::string_view text, const std::string &base_dir = ".");
RunConfig load_run_config(const std::string &path);

/// Throws ConfigError when the settings cannot produce a run.
void validate(const RunConfig &config);

/// A scored molecule as kept in the buffer.
struct Scored {
  std::string smiles;  // canonical
  double score = 0;
  AmineType type = AmineType::kNotAmine;
  std::vector<double> components;  // matches Objective::component_names()

  bool operator==(const Scored &) const = default;
};

class Objective {
public:
  virtual ~Objective() = default;
  virtual std::vector<std::string> component_names() const = 0;
  /// Throws on per-molecule failure (missing lookup key, NotAmine, ...).
  virtual Scored score(const Molecule &mol) const = 0;
};

/// Builds the objective named by `config.objective`:
/// spo:max_pka | spo:min_viscosity | spo:min_vapor_pressure | mpo |
/// rediscovery:T | similarity:T | median:T1,T2 | isomer:FORMULA.
/// Loads the predictors it needs; throws ConfigError or PredictorLoadError.
std::shared_ptr<const Objective> make_objective(const RunConfig &config);

/// Wraps a fixed predictor set, for callers that build predictors in memory.
std::shared_ptr<const Objective> make_objective(const RunConfig &config, PredictorSet predictors);

struct IterationStats {
  int iteration = 0;
  std::size_t generated = 0;
  std::size_t valid = 0;
  std::size_t amine = 0;
  std::size_t restriction_pass = 0;
  std::size_t scored = 0;  // distinct molecules with a score this iteration
  std::size_t failed = 0;  // distinct amines the objective could not score
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;  // NaN when nothing scored
  double buffer_best = 0;
  std::size_t buffer_size = 0;
  OpStats ga;

  bool operator==(const IterationStats &other) const;
};

struct RunState {
  int iteration = 0;
  std::vector<Scored> buffer;  // score descending, then canonical SMILES
  std::optional<NgramModel> model;
  std::vector<IterationStats> stats;

  double best() const { return buffer.empty() ? 0.0 : buffer.front().score; }
};

/// Type-7 quartiles (linear interpolation) of `values`; all NaN when empty.
std::array<double, 5> five_number_summary(std::vector<double> values);

/// Seed for an independent random stream of one iteration.
std::uint64_t stream_seed(std::uint64_t seed, int iteration, int stream);

class Explorer {
public:
  explicit Explorer(RunConfig config);
  Explorer(RunConfig config, std::shared_ptr<const Objective> objective);

  /// Restores a checkpoint. `iterations` replaces the stored target, which
  /// is how a finished run is extended. `objective` overrides the one the
  /// stored config would build.
  static Explorer from_checkpoint(const std::string &path, std::optional<int> iterations = {},
                                  std::shared_ptr<const Objective> objective = nullptr);

  const RunConfig &config() const { return config_; }
  const RunState &state() const { return state_; }
  const Objective &objective() const { return *objective_; }
  bool finished() const { return state_.iteration >= config_.iterations; }

  const IterationStats &step();
  void run(const std::function<void(const IterationStats &)> &on_iteration = {});

  /// Written to a sibling temporary file first, then renamed into place.
  void save_checkpoint(const std::string &path) const;

  /// stats.csv, buffer.csv and manifest.txt. Throws IoError.
  void write_reports(const std::string &out_dir) const;

  std::string stats_csv() const;
  std::string buffer_csv() const;
  std::string manifest() const;

private:
  Explorer(RunConfig config, std::shared_ptr<const Objective> objective, RunState state);

  std::vector<Molecule> initial_pool(std::mt19937_64 &rng) const;
  std::vector<std::optional<Scored>> score_all(const std::vector<const Molecule *> &mols) const;

  RunConfig config_;
  std::shared_ptr<const Objective> objective_;
  RunState state_;
  std::vector<std::string> corpus_;
  std::unordered_map<std::string, std::optional<Scored>> cache_;
};

/// Runs `config` to completion in `out_dir`, checkpointing after every
/// iteration and writing the reports at the end.
RunState run_experiment(const RunConfig &config, const std::string &out_dir,
                        const std::function<void(const IterationStats &)> &on_iteration = {});

/// Continues the run checkpointed in `out_dir`. Returns std::nullopt, after
/// rewriting the reports, when it was already finished.
std::optional<RunState> resume_experiment(
    const std::string &out_dir, std::optional<int> iterations = {},
    const std::function<void(const IterationStats &)> &on_iteration = {});

std::string stats_csv_header();

}  // namespace sage
