//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/qspr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "sage/formula.hpp"
#include "sage/smiles.hpp"

namespace sage {

std::vector<Molecule> filter_corpus(const std::vector<Molecule> &mols, double max_mw,
                                    const std::vector<Molecule> &targets, double sim_cutoff) {
  std::vector<Fingerprint> target_fps;
  for (const auto &t : targets) target_fps.push_back(ecfp(t));
  std::vector<Molecule> kept;
  for (const auto &m : mols) {
    if (molecular_weight(m) > max_mw) continue;
    const Fingerprint fp = ecfp(m);
    const bool close = std::any_of(target_fps.begin(), target_fps.end(),
                                   [&](const Fingerprint &t) { return tanimoto(fp, t) > sim_cutoff; });
    if (!close) kept.push_back(m);
  }
  return kept;
}

RegressionMetrics regression_metrics(const std::vector<double> &y_true,
                                     const std::vector<double> &y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw LengthMismatch(fmt::format("{} targets vs {} predictions", y_true.size(), y_pred.size()));
  const double n = static_cast<double>(y_true.size());
  const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / n;
  double ss_res = 0, ss_tot = 0, abs_err = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
    abs_err += std::abs(y_true[i] - y_pred[i]);
  }
  if (ss_tot == 0) throw ZeroVariance("targets have zero variance");
  return {1.0 - ss_res / ss_tot, abs_err / n};
}

std::vector<int> quintile_stratified_folds(const std::vector<double> &values, int k,
                                           std::uint64_t seed, int bins) {
  if (k < 2) throw std::invalid_argument("need at least two folds");
  if (static_cast<int>(values.size()) < k)
    throw TooFewRows(fmt::format("{} rows for {} folds", values.size(), k));
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::mt19937_64 rng(seed);
  std::vector<int> fold(n, -1);
  std::size_t counter = 0;
  for (int b = 0; b < bins; ++b) {
    const std::size_t lo = n * b / bins, hi = n * (b + 1) / bins;
    std::shuffle(order.begin() + lo, order.begin() + hi, rng);
    for (std::size_t i = lo; i < hi; ++i) fold[order[i]] = static_cast<int>(counter++ % k);
  }
  return fold;
}

Trainer make_trainer(std::string_view model, double param, std::size_t width) {
  if (model == "knn")
    return [param, width](const PropertyDataset &train) -> std::unique_ptr<Predictor> {
      return std::make_unique<KnnPredictor>(train, static_cast<int>(param), width);
    };
  if (model == "ridge")
    return [param, width](const PropertyDataset &train) -> std::unique_ptr<Predictor> {
      return std::make_unique<RidgePredictor>(train, param, width);
    };
  throw std::invalid_argument(fmt::format("unknown model '{}' (knn or ridge)", model));
}

namespace {

RegressionMetrics evaluate(const Predictor &p, const PropertyDataset &ds,
                           const std::vector<Molecule> &mols, const std::vector<std::size_t> &rows) {
  std::vector<double> y, yhat;
  for (std::size_t i : rows) {
    y.push_back(ds.rows[i].value);
    yhat.push_back(p.predict(mols[i], ds.rows[i].temperature.value_or(kStandardTemperature)));
  }
  return regression_metrics(y, yhat);
}

}  // namespace

FoldResult CvReport::mean() const {
  FoldResult m;
  for (const auto &f : folds) {
    m.train.r2 += f.train.r2;
    m.train.mae += f.train.mae;
    m.test.r2 += f.test.r2;
    m.test.mae += f.test.mae;
  }
  const double n = static_cast<double>(folds.size());
  m.train.r2 /= n;
  m.train.mae /= n;
  m.test.r2 /= n;
  m.test.mae /= n;
  return m;
}

FoldResult CvReport::sd() const {
  const FoldResult m = mean();
  FoldResult s;
  for (const auto &f : folds) {
    s.train.r2 += std::pow(f.train.r2 - m.train.r2, 2);
    s.train.mae += std::pow(f.train.mae - m.train.mae, 2);
    s.test.r2 += std::pow(f.test.r2 - m.test.r2, 2);
    s.test.mae += std::pow(f.test.mae - m.test.mae, 2);
  }
  const double d = folds.size() > 1 ? static_cast<double>(folds.size() - 1) : 1.0;
  s.train.r2 = std::sqrt(s.train.r2 / d);
  s.train.mae = std::sqrt(s.train.mae / d);
  s.test.r2 = std::sqrt(s.test.r2 / d);
  s.test.mae = std::sqrt(s.test.mae / d);
  return s;
}

CvReport cross_validate(const PropertyDataset &ds, const Trainer &trainer, int k,
                        std::uint64_t seed) {
  CvReport report;
  report.assignment = quintile_stratified_folds(ds.values(), k, seed);
  std::vector<Molecule> mols;
  mols.reserve(ds.rows.size());
  for (const auto &row : ds.rows) mols.push_back(parse_smiles(row.smiles));
  for (int f = 0; f < k; ++f) {
    PropertyDataset train;
    train.property = ds.property;
    train.unit = ds.unit;
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      if (report.assignment[i] == f) {
        test_rows.push_back(i);
      } else {
        train_rows.push_back(i);
        train.rows.push_back(ds.rows[i]);
      }
    }
    const auto model = trainer(train);
    FoldResult r;
    try {
      r.test = evaluate(*model, ds, mols, test_rows);
    } catch (const ZeroVariance &) {
      throw DegenerateFold(fmt::format("fold {} has constant targets", f));
    }
    r.train = evaluate(*model, ds, mols, train_rows);
    report.folds.push_back(r);
  }
  return report;
}

std::vector<GridPoint> grid_search(const PropertyDataset &ds, std::string_view model,
                                   const std::vector<double> &params, int k, std::uint64_t seed,
                                   std::size_t width) {
  std::vector<GridPoint> out;
  for (double p : params) out.push_back({p, cross_validate(ds, make_trainer(model, p, width), k, seed)});
  return out;
}

std::size_t best_grid_point(const std::vector<GridPoint> &grid) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i].report.mean().test.r2 > grid[best].report.mean().test.r2) best = i;
  return best;
}

std::vector<double> parse_grid(std::string_view spec) {
  auto number = [&](std::string_view s) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      throw std::invalid_argument(fmt::format("bad grid value '{}' in '{}'", s, spec));
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string_view::npos) {
    const auto a = spec.find(':'), b = spec.find(':', a + 1);
    if (b == std::string_view::npos) throw std::invalid_argument("grid range needs lo:hi:step");
    const double lo = number(spec.substr(0, a)), hi = number(spec.substr(a + 1, b - a - 1)),
                 step = number(spec.substr(b + 1));
    if (!(step > 0) || hi < lo) throw std::invalid_argument("grid range needs lo <= hi, step > 0");
    for (int i = 0; lo + i * step <= hi + 1e-9 * step; ++i) out.push_back(lo + i * step);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(',', start);
    out.push_back(number(spec.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string cv_report_csv(const CvReport &report, std::string_view task, std::string_view model,
                          bool header) {
  std::string out;
  if (header) out += "Task,Model,Fold,Train R-squared,Train MAE,Test R-squared,Test MAE\n";
  auto row = [&](std::string_view fold, const FoldResult &f) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n", task, model, fold, f.train.r2,
                       f.train.mae, f.test.r2, f.test.mae);
  };
  for (std::size_t i = 0; i < report.folds.size(); ++i) row(std::to_string(i + 1), report.folds[i]);
  row("mean", report.mean());
  row("sd", report.sd());
  return out;
}

}  // namespace sage
