//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/benchmark.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "sage/dataset.hpp"
#include "sage/reference.hpp"
#include "sage/smiles.hpp"

namespace sage {
namespace {

struct Target {
  std::string display;
  std::string canonical;
  std::optional<AmineType> type;
};

Target resolve_target(std::string_view text) {
  if (auto ref = find_reference_amine(text))
    return {std::string(ref->name), canonicalize(ref->smiles), ref->type};
  try {
    const Molecule m = parse_smiles(text);
    return {std::string(text), canonical_smiles(m), classify_amine(m)};
  } catch (const ParseError &e) {
    throw std::invalid_argument(fmt::format("target '{}' is neither a known amine nor SMILES: {}",
                                            text, e.what()));
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto part = s.substr(start, pos - start);
    while (!part.empty() && (part.front() == ' ' || part.front() == '\t')) part.remove_prefix(1);
    while (!part.empty() && (part.back() == ' ' || part.back() == '\t' || part.back() == '\r'))
      part.remove_suffix(1);
    out.push_back(part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Highest first, then canonical SMILES, keeping those above the threshold.
TaskScore top_mean(const BenchmarkTask &task, const CandidateSet &c, std::vector<double> scores) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (scores[i] > task.threshold) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  if (idx.size() > task.top_n) idx.resize(task.top_n);
  TaskScore s;
  double sum = 0;
  for (std::size_t i : idx) {
    s.contributors.emplace_back(c.smiles[i], scores[i]);
    sum += scores[i];
  }
  s.value = idx.empty() ? 0.0 : sum / static_cast<double>(idx.size());
  return s;
}

std::vector<Fingerprint> target_fps(const BenchmarkTask &task) {
  std::vector<Fingerprint> out;
  for (const auto &t : task.targets) out.push_back(ecfp(parse_smiles(t)));
  return out;
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kRediscovery: return "Rediscovery";
    case TaskKind::kSimilarity: return "Similarity";
    case TaskKind::kMedianSimilarity: return "Median Similarity";
    case TaskKind::kIsomer: return "Isomers";
  }
  return "?";
}

CandidateSet prepare_candidates(const std::vector<std::string> &smiles, bool amines_only) {
  std::map<std::string, Molecule> unique;
  for (const auto &s : smiles) {
    try {
      Molecule m = parse_smiles(s);
      if (amines_only && !is_amine(m)) continue;
      std::string c = canonical_smiles(m);
      unique.emplace(std::move(c), std::move(m));
    } catch (const ParseError &) {
    }
  }
  CandidateSet set;
  for (const auto &[c, m] : unique) {
    set.smiles.push_back(c);
    set.fps.push_back(ecfp(m));
    set.formulas.push_back(molecular_formula(m));
  }
  return set;
}

TaskScore score_rediscovery(const BenchmarkTask &task, const CandidateSet &c) {
  TaskScore s;
  if (c.size() == 0) return s;
  const Fingerprint target = ecfp(parse_smiles(task.targets.at(0)));
  std::size_t best = 0;
  double best_sim = -1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double sim = c.smiles[i] == task.targets[0] ? 1.0 : tanimoto(c.fps[i], target);
    if (sim > best_sim) {
      best_sim = sim;
      best = i;
    }
  }
  s.value = best_sim;
  s.contributors.emplace_back(c.smiles[best], best_sim);
  return s;
}

TaskScore score_similarity(const BenchmarkTask &task, const CandidateSet &c) {
  const Fingerprint target = ecfp(parse_smiles(task.targets.at(0)));
  std::vector<double> scores(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) scores[i] = tanimoto(c.fps[i], target);
  return top_mean(task, c, std::move(scores));
}

TaskScore score_median_similarity(const BenchmarkTask &task, const CandidateSet &c) {
  const auto fps = target_fps(task);
  std::vector<double> scores(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    scores[i] = (tanimoto(c.fps[i], fps.at(0)) + tanimoto(c.fps[i], fps.at(1))) / 2.0;
  return top_mean(task, c, std::move(scores));
}

TaskScore score_isomer(const BenchmarkTask &task, const CandidateSet &c) {
  TaskScore s;
  if (c.size() == 0) return s;
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto hit = [&](std::size_t i) { return c.formulas[i] == *task.formula ? 1.0 : 0.0; };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return hit(a) > hit(b); });
  if (idx.size() > task.top_n) idx.resize(task.top_n);
  double sum = 0;
  for (std::size_t i : idx) {
    s.contributors.emplace_back(c.smiles[i], hit(i));
    sum += hit(i);
  }
  s.value = sum / static_cast<double>(idx.size());
  return s;
}

TaskScore score_task(const BenchmarkTask &task, const CandidateSet &c) {
  switch (task.kind) {
    case TaskKind::kRediscovery: return score_rediscovery(task, c);
    case TaskKind::kSimilarity: return score_similarity(task, c);
    case TaskKind::kMedianSimilarity: return score_median_similarity(task, c);
    case TaskKind::kIsomer: return score_isomer(task, c);
  }
  return {};
}

double molecule_task_score(const BenchmarkTask &task, const Molecule &mol) {
  switch (task.kind) {
    case TaskKind::kIsomer: return molecular_formula(mol) == *task.formula ? 1.0 : 0.0;
    case TaskKind::kRediscovery:
      if (canonical_smiles(mol) == task.targets.at(0)) return 1.0;
      [[fallthrough]];
    case TaskKind::kSimilarity: return tanimoto(ecfp(mol), ecfp(parse_smiles(task.targets.at(0))));
    case TaskKind::kMedianSimilarity: {
      const Fingerprint fp = ecfp(mol);
      return (tanimoto(fp, ecfp(parse_smiles(task.targets.at(0)))) +
              tanimoto(fp, ecfp(parse_smiles(task.targets.at(1))))) /
             2.0;
    }
  }
  return 0;
}

BenchmarkTask rediscovery_task(std::string_view target) {
  const Target t = resolve_target(target);
  BenchmarkTask task;
  task.kind = TaskKind::kRediscovery;
  task.name = t.display;
  task.targets = {t.canonical};
  task.target_type = t.type;
  task.top_n = 1;
  return task;
}

BenchmarkTask similarity_task(std::string_view target) {
  BenchmarkTask task = rediscovery_task(target);
  task.kind = TaskKind::kSimilarity;
  task.top_n = 100;
  task.threshold = kSimilarityThreshold;
  return task;
}

BenchmarkTask median_task(std::string_view first, std::string_view second) {
  const Target a = resolve_target(first), b = resolve_target(second);
  BenchmarkTask task;
  task.kind = TaskKind::kMedianSimilarity;
  task.name = a.display + " and " + b.display;
  task.targets = {a.canonical, b.canonical};
  task.threshold = kMedianThreshold;
  return task;
}

BenchmarkTask isomer_task(std::string_view formula) {
  BenchmarkTask task;
  task.kind = TaskKind::kIsomer;
  task.formula = parse_formula(formula);
  task.name = to_string(*task.formula);
  return task;
}

BenchmarkTask parse_task(std::string_view line) {
  const auto fields = split(line, ';');
  if (fields.size() < 2 || fields.size() > 3)
    throw std::invalid_argument(fmt::format("task line '{}' is not kind;targets;params", line));
  const auto targets = split(fields[1], ',');
  auto need = [&](std::size_t n) {
    if (targets.size() != n || targets[0].empty())
      throw std::invalid_argument(fmt::format("task '{}' needs {} target(s)", line, n));
  };
  BenchmarkTask task;
  const std::string_view kind = fields[0];
  if (kind == "rediscovery") {
    need(1);
    task = rediscovery_task(targets[0]);
  } else if (kind == "similarity") {
    need(1);
    task = similarity_task(targets[0]);
  } else if (kind == "median") {
    need(2);
    task = median_task(targets[0], targets[1]);
  } else if (kind == "isomer") {
    need(1);
    task = isomer_task(targets[0]);
  } else {
    throw std::invalid_argument(fmt::format("unknown task kind '{}'", kind));
  }
  if (fields.size() == 3 && !fields[2].empty()) {
    for (auto kv : split(fields[2], ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument(fmt::format("bad task parameter '{}'", kv));
      const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
      double v;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc() || p != val.data() + val.size())
        throw std::invalid_argument(fmt::format("bad value in task parameter '{}'", kv));
      if (key == "top_n" && v >= 1)
        task.top_n = static_cast<std::size_t>(v);
      else if (key == "threshold")
        task.threshold = v;
      else
        throw std::invalid_argument(fmt::format("unknown task parameter '{}'", kv));
    }
  }
  return task;
}

std::vector<BenchmarkTask> parse_task_file(std::string_view content) {
  std::vector<BenchmarkTask> tasks;
  std::istringstream in{std::string(content)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    try {
      tasks.push_back(parse_task(line));
    } catch (const std::invalid_argument &e) {
      throw std::invalid_argument(fmt::format("line {}: {}", n, e.what()));
    }
  }
  return tasks;
}

std::vector<BenchmarkTask> load_task_file(const std::string &path) {
  return parse_task_file(read_file(path));
}

std::vector<BenchmarkTask> default_tasks() {
  std::vector<BenchmarkTask> tasks;
  for (const char *name : {"MEA", "AHMPD", "DEA", "DA", "DEEA", "MDEA", "2-MPZ", "2-PPE",
                           "HomoPZ", "DETA"})
    tasks.push_back(rediscovery_task(name));
  for (const char *name : {"AMP", "IPA", "IPAP", "4DMA1B", "1DMA2P", "1-MPZ", "EPZ", "PZ", "AEP",
                           "TETA"})
    tasks.push_back(similarity_task(name));
  tasks.push_back(median_task("DEAE-EO", "1M-2PPE"));
  tasks.push_back(median_task("DEAE-EO", "1-(2HE)PP"));
  tasks.push_back(median_task("1M-2PPE", "1-(2HE)PP"));
  for (const char *f : {"C4H11NO", "C4H11NO2", "C5H12N2", "C6H15NO"})
    tasks.push_back(isomer_task(f));
  return tasks;
}

CandidateSource replay_source(std::vector<std::string> smiles) {
  return [smiles = std::move(smiles)](const BenchmarkTask &, std::size_t, std::size_t) {
    return smiles;
  };
}

double SuiteResult::total() const {
  double t = 0;
  for (const auto &[task, score] : tasks) t += score.value;
  return t;
}

double SuiteResult::subtotal(TaskKind kind) const {
  double t = 0;
  for (const auto &[task, score] : tasks)
    if (task.kind == kind) t += score.value;
  return t;
}

SuiteResult run_suite(const std::vector<BenchmarkTask> &tasks, const CandidateSource &source,
                      std::size_t budget) {
  SuiteResult result;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const CandidateSet c = prepare_candidates(source(tasks[i], i, budget));
    result.tasks.emplace_back(tasks[i], score_task(tasks[i], c));
  }
  return result;
}

std::string suite_report_csv(const SuiteResult &result) {
  std::string out = "Task,Name,AmineType,Score\n";
  for (const auto &[task, score] : result.tasks) {
    std::string type;
    if (task.target_type && (task.kind == TaskKind::kRediscovery || task.kind == TaskKind::kSimilarity)) {
      type = std::string(to_string(*task.target_type));
      type[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(type[0])));
    }
    out += fmt::format("{},{},{},{:.3f}\n", to_string(task.kind), task.name, type, score.value);
  }
  out += fmt::format("Total,,,{:.3f}\n", result.total());
  return out;
}

}  // namespace sage
