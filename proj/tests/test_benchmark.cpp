#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "sage/benchmark.hpp"
#include "sage/genops.hpp"
#include "sage/reference.hpp"
#include "sage/smiles.hpp"
#include "test_support.hpp"

using namespace sage;

namespace {

const std::string kData = SAGE_DATA_DIR;

std::vector<std::string> rediscovery_targets() {
  std::vector<std::string> out;
  for (const auto &t : default_tasks())
    if (t.kind == TaskKind::kRediscovery) out.push_back(t.targets.front());
  return out;
}

// Saturated CNO closure up to six heavy atoms; contains every C4H11NO isomer.
const std::vector<std::string> &small_universe() {
  static const std::vector<std::string> u = [] {
    MutationConfig cfg;
    cfg.max_heavy_atoms = 6;
    cfg.weights = {1, 1, 0, 1, 1, 1};
    return enumerate_closure({parse_smiles("C"), parse_smiles("N"), parse_smiles("O")}, cfg);
  }();
  return u;
}

std::vector<std::string> c4h11no_amines() {
  std::vector<std::string> out;
  const auto target = parse_formula("C4H11NO");
  for (const auto &s : small_universe()) {
    const Molecule m = parse_smiles(s);
    if (molecular_formula(m) == target && is_amine(m)) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Rediscovery, Examples) {
  auto task = rediscovery_task("MEA");
  EXPECT_EQ(task.targets.front(), canonicalize("NCCO"));
  EXPECT_EQ(score_task(task, prepare_candidates({"CCN", "OCCN"})).value, 1.0);
  EXPECT_EQ(score_task(task, prepare_candidates({})).value, 0.0);
  EXPECT_EQ(score_task(task, prepare_candidates({"C(O)CN"})).value, 1.0);
  const double partial = score_task(task, prepare_candidates({"CCN", "NCCCO"})).value;
  EXPECT_GT(partial, 0.0);
  EXPECT_LT(partial, 1.0);
}

TEST(Rediscovery, MonotoneAsCandidatesAppend) {
  auto task = rediscovery_task("DEEA");
  auto lib = amine_corpus(200, 2);
  double prev = 0;
  std::vector<std::string> cands;
  for (const auto &s : lib) {
    cands.push_back(s);
    const double v = score_task(task, prepare_candidates(cands)).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Similarity, Examples) {
  auto task = similarity_task("AMP");
  std::vector<std::string> copies(100, "CC(C)(N)CO");
  EXPECT_EQ(score_task(task, prepare_candidates(copies)).value, 1.0);
  EXPECT_EQ(score_task(task, prepare_candidates({"CCCCCCCCN", "N"})).value, 0.0);
}

TEST(Similarity, MeanOverAvailableContributors) {
  auto task = similarity_task("MEA");
  task.threshold = 0.0;
  const auto c = prepare_candidates({"NCCO", "NCCCO", "CCN"});
  const auto fp = ecfp(parse_smiles("NCCO"));
  double sum = 0;
  for (const char *s : {"NCCO", "NCCCO", "CCN"}) sum += tanimoto(fp, ecfp(parse_smiles(s)));
  EXPECT_NEAR(score_task(task, c).value, sum / 3.0, 1e-12);
  EXPECT_EQ(score_task(task, c).contributors.size(), 3u);
}

TEST(Similarity, DuplicatesDoNotInflate) {
  auto task = similarity_task("MEA");
  task.threshold = 0.0;
  const double once = score_task(task, prepare_candidates({"NCCO", "CCCCN"})).value;
  const double many =
      score_task(task, prepare_candidates({"NCCO", "OCCN", "C(N)CO", "CCCCN"})).value;
  EXPECT_EQ(once, many);
}

TEST(Median, CandidateEqualToOneTarget) {
  auto task = median_task("DEAE-EO", "1M-2PPE");
  const Molecule a = parse_smiles(task.targets[0]), b = parse_smiles(task.targets[1]);
  const double t = tanimoto(ecfp(a), ecfp(b));
  EXPECT_NEAR(molecule_task_score(task, a), (1 + t) / 2, 1e-12);
  auto swapped = median_task("1M-2PPE", "DEAE-EO");
  for (const auto &s : amine_corpus(50, 3)) {
    const Molecule m = parse_smiles(s);
    EXPECT_DOUBLE_EQ(molecule_task_score(task, m), molecule_task_score(swapped, m));
  }
}

TEST(Median, BestSmallAmineNearTableCeiling) {
  auto task = median_task("DEAE-EO", "1M-2PPE");
  double best = 0;
  for (const auto &s : amine_corpus(20000, 3, 8)) {
    if (s == task.targets[0] || s == task.targets[1]) continue;
    best = std::max(best, molecule_task_score(task, parse_smiles(s)));
  }
  EXPECT_GT(best, 0.3);
  EXPECT_LT(best, 0.5);
}

TEST(Isomer, Examples) {
  auto task = isomer_task("C4H11NO");
  EXPECT_EQ(molecule_task_score(task, parse_smiles("CC(C)(N)CO")), 1.0);
  EXPECT_EQ(molecule_task_score(task, parse_smiles("NCCO")), 0.0);
  auto s = score_task(task, prepare_candidates({"CC(C)(N)CO", "NCCO"}));
  EXPECT_EQ(s.value, 0.5);
}

TEST(Isomer, ExactlyFiftySixAmines) {
  const auto isomers = c4h11no_amines();
  EXPECT_EQ(isomers.size(), 56u);
  EXPECT_NE(std::find(isomers.begin(), isomers.end(), canonicalize("CC(C)(N)CO")), isomers.end());
  auto task = isomer_task("C4H11NO");
  auto score = score_task(task, prepare_candidates(isomers));
  EXPECT_EQ(score.value, 1.0);
  EXPECT_EQ(score.contributors.size(), 56u);
}

TEST(Isomer, TopHundredRanking) {
  auto task = isomer_task("C4H11NO");
  std::vector<std::string> cands = c4h11no_amines();
  for (const auto &s : amine_corpus(300, 5)) cands.push_back(s);
  auto score = score_task(task, prepare_candidates(cands));
  // 56 hits rank first, the remaining 44 slots are misses.
  EXPECT_DOUBLE_EQ(score.value, 56.0 / 100.0);
}

TEST(Suite, ReplayingRediscoveryTargets) {
  auto tasks = default_tasks();
  EXPECT_EQ(tasks.size(), 27u);
  auto result = run_suite(tasks, replay_source(rediscovery_targets()), 1000);
  EXPECT_EQ(result.subtotal(TaskKind::kRediscovery), 10.0);
  double sum = 0;
  for (const auto &[task, score] : result.tasks) {
    EXPECT_GE(score.value, 0.0);
    EXPECT_LE(score.value, 1.0);
    sum += score.value;
  }
  EXPECT_DOUBLE_EQ(result.total(), sum);
}

TEST(Suite, EmptyGeneratorScoresZero) {
  auto result = run_suite(default_tasks(), replay_source({}), 100);
  EXPECT_EQ(result.total(), 0.0);
}

TEST(Suite, DeterministicReport) {
  auto lib = amine_corpus(500, 12);
  auto a = suite_report_csv(run_suite(default_tasks(), replay_source(lib), 500));
  auto b = suite_report_csv(run_suite(default_tasks(), replay_source(lib), 500));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "Task,Name,AmineType,Score");
  EXPECT_NE(a.find("Total"), std::string::npos);
}

TEST(TaskFile, ParsesLines) {
  auto tasks = parse_task_file(
      "# comment\n"
      "rediscovery;MEA\n"
      "similarity;CC(C)(N)CO;top_n=10,threshold=0.5\n"
      "median;DEAE-EO,1M-2PPE\n"
      "isomer;C4H11NO\n");
  ASSERT_EQ(tasks.size(), 4u);
  EXPECT_EQ(tasks[1].top_n, 10u);
  EXPECT_EQ(tasks[1].threshold, 0.5);
  EXPECT_EQ(tasks[2].targets.size(), 2u);
  EXPECT_EQ(tasks[3].kind, TaskKind::kIsomer);
  EXPECT_THROW(parse_task("cluster;MEA"), std::invalid_argument);
  EXPECT_THROW(parse_task("median;MEA"), std::invalid_argument);
  EXPECT_THROW(parse_task("similarity;MEA;top_n=x"), std::invalid_argument);
}

TEST(TaskFile, ShippedFileMatchesDefaults) {
  auto shipped = load_task_file(kData + "/benchmark_tasks.txt");
  auto defaults = default_tasks();
  ASSERT_EQ(shipped.size(), defaults.size());
  for (std::size_t i = 0; i < shipped.size(); ++i) {
    EXPECT_EQ(shipped[i].kind, defaults[i].kind);
    EXPECT_EQ(shipped[i].targets, defaults[i].targets);
    EXPECT_EQ(shipped[i].name, defaults[i].name);
  }
}

TEST(ReferenceFile, MatchesBuiltInTable) {
  std::ifstream in(kData + "/reference_properties.csv");
  ASSERT_TRUE(in);
  std::string line;
  std::getline(in, line);
  int n = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string name, smiles, type, mw;
    std::getline(ss, name, ',');
    std::getline(ss, smiles, ',');
    std::getline(ss, type, ',');
    std::getline(ss, mw, ',');
    const auto ref = find_reference_amine(name);
    ASSERT_TRUE(ref.has_value()) << name;
    EXPECT_EQ(canonicalize(smiles), canonicalize(ref->smiles));
    EXPECT_EQ(amine_type_from_string(type), ref->type);
    EXPECT_NEAR(molecular_weight(parse_smiles(smiles)), std::stod(mw), 2e-3) << name;
    ++n;
  }
  EXPECT_EQ(n, 23);
}
