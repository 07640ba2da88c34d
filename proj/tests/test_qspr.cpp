#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "sage/benchmark.hpp"
#include "sage/formula.hpp"
#include "sage/qspr.hpp"
#include "sage/smiles.hpp"
#include "test_support.hpp"

using namespace sage;

namespace {

class ConstantPredictor final : public Predictor {
public:
  explicit ConstantPredictor(double v) : v_(v) {}
  PredictorKind kind() const override { return PredictorKind::kLookupTable; }
  double predict(const Molecule &, double) const override { return v_; }
  void save(std::ostream &) const override {}

private:
  double v_;
};

PropertyDataset synthetic(std::size_t n, std::uint64_t seed) {
  PropertyDataset ds;
  ds.property = "synthetic";
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (const auto &s : amine_corpus(n, seed)) {
    const Molecule m = parse_smiles(s);
    ds.rows.push_back({s, 0.3 * static_cast<double>(m.heavy_atom_count()) + noise(rng), {}});
  }
  return ds;
}

}  // namespace

TEST(RegressionMetrics, HandComputedThreePoints) {
  auto m = regression_metrics({1, 2, 3}, {1, 2, 4});
  EXPECT_EQ(m.r2, 0.5);
  EXPECT_EQ(m.mae, 1.0 / 3.0);
}

TEST(RegressionMetrics, PerfectAndMeanPredictions) {
  std::vector<double> y{3, 1, 4, 1, 5, 9, 2, 6};
  auto perfect = regression_metrics(y, y);
  EXPECT_EQ(perfect.r2, 1.0);
  EXPECT_EQ(perfect.mae, 0.0);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double mad = 0;
  for (double v : y) mad += std::abs(v - mean);
  auto flat = regression_metrics(y, std::vector<double>(y.size(), mean));
  EXPECT_NEAR(flat.r2, 0.0, 1e-15);
  EXPECT_NEAR(flat.mae, mad / y.size(), 1e-15);
}

TEST(RegressionMetrics, Errors) {
  EXPECT_THROW(regression_metrics({1, 2}, {1}), LengthMismatch);
  EXPECT_THROW(regression_metrics({}, {}), LengthMismatch);
  EXPECT_THROW(regression_metrics({2, 2, 2}, {1, 2, 3}), ZeroVariance);
}

TEST(Folds, UniformHundred) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 0.0);
  std::shuffle(v.begin(), v.end(), std::mt19937_64(3));
  auto a = quintile_stratified_folds(v, 5, 42);
  std::map<int, int> per_fold;
  std::map<std::pair<int, int>, int> per_cell;
  for (std::size_t i = 0; i < v.size(); ++i) {
    ++per_fold[a[i]];
    ++per_cell[{a[i], static_cast<int>(v[i]) / 20}];
  }
  for (int f = 0; f < 5; ++f) {
    EXPECT_EQ(per_fold[f], 20);
    for (int q = 0; q < 5; ++q) EXPECT_EQ((per_cell[{f, q}]), 4);
  }
  EXPECT_EQ(a, quintile_stratified_folds(v, 5, 42));
  EXPECT_NE(a, quintile_stratified_folds(v, 5, 43));
}

TEST(Folds, FoldMeansTrackGlobalMean) {
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> dist(1.0, 0.6);
  std::vector<double> v(1000);
  for (double &x : v) x = dist(rng);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  auto a = quintile_stratified_folds(v, 5, 7);
  for (int f = 0; f < 5; ++f) {
    double s = 0;
    int n = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (a[i] == f) s += v[i], ++n;
    EXPECT_NEAR(s / n, mean, 0.1 * mean);
  }
}

TEST(Folds, PartitionProperty) {
  std::vector<double> v(37);
  std::mt19937_64 rng(1);
  for (double &x : v) x = std::uniform_real_distribution<double>(0, 1)(rng);
  auto a = quintile_stratified_folds(v, 5, 0);
  ASSERT_EQ(a.size(), v.size());
  for (int f : a) {
    EXPECT_GE(f, 0);
    EXPECT_LT(f, 5);
  }
  EXPECT_THROW(quintile_stratified_folds(std::vector<double>(3, 1.0), 5, 0), TooFewRows);
}

TEST(CrossValidate, PerfectLookup) {
  const auto ds = synthetic(200, 1);
  Trainer oracle = [&](const PropertyDataset &) { return std::make_unique<LookupTable>(ds); };
  auto report = cross_validate(ds, oracle, 5, 3);
  ASSERT_EQ(report.folds.size(), 5u);
  for (const auto &f : report.folds) {
    EXPECT_EQ(f.test.r2, 1.0);
    EXPECT_EQ(f.test.mae, 0.0);
  }
  std::set<int> folds(report.assignment.begin(), report.assignment.end());
  EXPECT_EQ(folds.size(), 5u);
}

TEST(CrossValidate, TrainingMeanBaseline) {
  const auto ds = synthetic(200, 2);
  Trainer mean = [](const PropertyDataset &train) {
    const auto v = train.values();
    return std::make_unique<ConstantPredictor>(std::accumulate(v.begin(), v.end(), 0.0) /
                                               static_cast<double>(v.size()));
  };
  auto report = cross_validate(ds, mean, 5, 1);
  for (const auto &f : report.folds) {
    EXPECT_LE(f.test.r2, 0.0);
    EXPECT_NEAR(f.train.r2, 0.0, 1e-12);
  }
}

TEST(CrossValidate, KnnRecoversDuplicatesAcrossFolds) {
  auto ds = synthetic(120, 3);
  const std::size_t original = ds.rows.size();
  for (std::size_t i = 0; i < original; ++i) ds.rows.push_back(ds.rows[i]);
  const auto folds = quintile_stratified_folds(ds.values(), 5, 9);
  for (int f = 0; f < 5; ++f) {
    PropertyDataset train;
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
      if (folds[i] != f) train.rows.push_back(ds.rows[i]);
    KnnPredictor knn(train, 1);
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      const std::size_t twin = i < original ? i + original : i - original;
      if (folds[i] != f || folds[twin] == f) continue;
      EXPECT_EQ(knn.predict(parse_smiles(ds.rows[i].smiles), kStandardTemperature),
                ds.rows[i].value);
    }
  }
}

TEST(CrossValidate, RidgeLearnsSizeSignal) {
  PropertyDataset ds;
  MutationConfig cfg;
  cfg.max_heavy_atoms = 40;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> size(2, 40);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::set<std::string> seen;
  while (ds.rows.size() < 400) {
    const Molecule m = grow_molecule(parse_smiles("N"), size(rng), rng, cfg);
    const std::string c = canonical_smiles(m);
    if (!seen.insert(c).second) continue;
    ds.rows.push_back({c, 0.3 * static_cast<double>(m.heavy_atom_count()) + noise(rng), {}});
  }
  auto report = cross_validate(ds, make_trainer("ridge", 10.0), 5, 0);
  EXPECT_GT(report.mean().test.r2, 0.8);
  EXPECT_GE(report.sd().test.r2, 0.0);
}

TEST(GridSearch, ParsesAndPicksBest) {
  EXPECT_EQ(parse_grid("1,3,5"), (std::vector<double>{1, 3, 5}));
  EXPECT_EQ(parse_grid("1:3:1"), (std::vector<double>{1, 2, 3}));
  EXPECT_THROW(parse_grid("1:3"), std::invalid_argument);
  const auto ds = synthetic(150, 6);
  auto grid = grid_search(ds, "knn", {1, 5}, 5, 0);
  ASSERT_EQ(grid.size(), 2u);
  const auto best = best_grid_point(grid);
  for (const auto &g : grid) EXPECT_LE(g.report.mean().test.r2, grid[best].report.mean().test.r2);
  EXPECT_THROW(make_trainer("forest", 1), std::invalid_argument);
  const auto csv = cv_report_csv(grid[best].report, "synthetic", "knn");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 5 + 2);
}

TEST(FilterCorpus, TargetsExcludedAndSmallMoleculesKept) {
  std::vector<Molecule> targets;
  for (const auto &t : default_tasks())
    for (const auto &s : t.targets) targets.push_back(parse_smiles(s));
  std::vector<Molecule> mols{parse_smiles("C"), parse_smiles("NCCO"), parse_smiles("CN(CCO)CCO")};
  auto kept = filter_corpus(mols, 250, targets);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(canonical_smiles(kept[0]), "C");
  for (const auto &t : targets)
    EXPECT_LE(tanimoto(ecfp(parse_smiles("C")), ecfp(t)), kCorpusSimilarityCutoff);
}

TEST(FilterCorpus, MolecularWeightCap) {
  // C21H43N: 309.6 g/mol; C19H41N... pick an exact pair around 300
  const Molecule heavy = parse_smiles("CCCCCCCCCCCCCCCCCCCCCN");
  const Molecule light = parse_smiles("CCCCCCCCCCCCCCCCCCN");
  ASSERT_GT(molecular_weight(heavy), 300);
  ASSERT_LT(molecular_weight(light), 300);
  auto kept = filter_corpus({heavy, light}, 300, {}, kCorpusSimilarityCutoff);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(canonical_smiles(kept[0]), canonical_smiles(light));
}

TEST(FilterCorpus, OrderIndependent) {
  auto corpus = amine_corpus(400, 8);
  std::vector<Molecule> mols;
  for (const auto &s : corpus) mols.push_back(parse_smiles(s));
  const std::vector<Molecule> targets{parse_smiles("NCCO"), parse_smiles("C1CNCCN1")};
  auto as_set = [](const std::vector<Molecule> &v) {
    std::set<std::string> s;
    for (const auto &m : v) s.insert(canonical_smiles(m));
    return s;
  };
  const auto base = as_set(filter_corpus(mols, 300, targets));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(mols.begin(), mols.end(), rng);
    EXPECT_EQ(as_set(filter_corpus(mols, 300, targets)), base);
  }
}

TEST(MolecularWeight, StandardMasses) {
  EXPECT_NEAR(molecular_weight(parse_smiles("NCCO")), 61.084, 1e-3);
  EXPECT_NEAR(molecular_weight(parse_smiles("CN(CCO)CCO")), 119.164, 1e-3);
  EXPECT_NEAR(molecular_weight(parse_smiles("C1CNCCN1")), 86.138, 1e-3);
}
