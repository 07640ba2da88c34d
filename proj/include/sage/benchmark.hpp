//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sage/chemclass.hpp"
#include "sage/fingerprint.hpp"
#include "sage/formula.hpp"

namespace sage {

enum class TaskKind { kRediscovery, kSimilarity, kMedianSimilarity, kIsomer };

std::string_view to_string(TaskKind kind);

struct BenchmarkTask {
  TaskKind kind = TaskKind::kRediscovery;
  std::string name;                  // display name, e.g. "MEA" or "C4H11NO"
  std::vector<std::string> targets;  // canonical SMILES
  std::optional<MolecularFormula> formula;
  std::optional<AmineType> target_type;
  std::size_t top_n = 100;
  double threshold = 0.7;  // similarity must exceed this to contribute
};

inline constexpr double kSimilarityThreshold = 0.7;
// The averaged two-target similarity of real amines rarely exceeds ~0.5, so
// median tasks keep every candidate unless a threshold is given.
inline constexpr double kMedianThreshold = 0.0;

struct TaskScore {
  double value = 0;
  std::vector<std::pair<std::string, double>> contributors;
};

/// Distinct, valid candidates with their fingerprints and formulas.
struct CandidateSet {
  std::vector<std::string> smiles;  // canonical, sorted
  std::vector<Fingerprint> fps;
  std::vector<MolecularFormula> formulas;

  std::size_t size() const { return smiles.size(); }
};

/// Parses, deduplicates by canonical SMILES and, when `amines_only`, drops
/// molecules without an amine nitrogen. Invalid strings are skipped.
CandidateSet prepare_candidates(const std::vector<std::string> &smiles, bool amines_only = true);

TaskScore score_rediscovery(const BenchmarkTask &task, const CandidateSet &c);
TaskScore score_similarity(const BenchmarkTask &task, const CandidateSet &c);
TaskScore score_median_similarity(const BenchmarkTask &task, const CandidateSet &c);
TaskScore score_isomer(const BenchmarkTask &task, const CandidateSet &c);
TaskScore score_task(const BenchmarkTask &task, const CandidateSet &c);

/// Per-molecule score the task aggregates (Tanimoto, mean Tanimoto or
/// formula match).
double molecule_task_score(const BenchmarkTask &task, const Molecule &mol);

BenchmarkTask rediscovery_task(std::string_view target);
BenchmarkTask similarity_task(std::string_view target);
BenchmarkTask median_task(std::string_view first, std::string_view second);
BenchmarkTask isomer_task(std::string_view formula);

/// Parses one "kind;targets;params" line. Targets are reference-amine names
/// or SMILES separated by ','; params are key=value pairs (top_n,
/// threshold) separated by ','. Throws std::invalid_argument.
BenchmarkTask parse_task(std::string_view line);
std::vector<BenchmarkTask> parse_task_file(std::string_view content);
std::vector<BenchmarkTask> load_task_file(const std::string &path);

/// The 27 standard tasks: 10 rediscovery, 10 similarity, 3 median, 4 isomer.
std::vector<BenchmarkTask> default_tasks();

/// Produces candidate SMILES for a task; `index` is the task's position in
/// the suite, for seeding.
using CandidateSource =
    std::function<std::vector<std::string>(const BenchmarkTask &, std::size_t index, std::size_t budget)>;

/// Returns the same molecules for every task.
CandidateSource replay_source(std::vector<std::string> smiles);

struct SuiteResult {
  std::vector<std::pair<BenchmarkTask, TaskScore>> tasks;
  double total() const;
  double subtotal(TaskKind kind) const;
};

SuiteResult run_suite(const std::vector<BenchmarkTask> &tasks, const CandidateSource &source,
                      std::size_t budget);

/// CSV with columns Task,Name,AmineType,Score and a final Total row.
std::string suite_report_csv(const SuiteResult &result);

}  // namespace sage
