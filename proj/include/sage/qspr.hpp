//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sage/dataset.hpp"
#include "sage/predictor.hpp"

namespace sage {

class LengthMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ZeroVariance : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class TooFewRows : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateFold : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

inline constexpr double kCorpusSimilarityCutoff = 0.323;

/// Keeps molecules with weight <= max_mw whose highest Tanimoto similarity
/// to any target is <= sim_cutoff. Input order is preserved.
std::vector<Molecule> filter_corpus(const std::vector<Molecule> &mols, double max_mw,
                                    const std::vector<Molecule> &targets,
                                    double sim_cutoff = kCorpusSimilarityCutoff);

struct RegressionMetrics {
  double r2 = 0;
  double mae = 0;
};

/// R^2 = 1 - SS_res/SS_tot and mean absolute error. Throws LengthMismatch
/// and ZeroVariance.
RegressionMetrics regression_metrics(const std::vector<double> &y_true,
                                     const std::vector<double> &y_pred);

/// Fold index per row: values are split into `bins` quantile bins, each bin
/// is shuffled and dealt round-robin to the folds with one running counter.
/// Throws TooFewRows when there are fewer rows than folds.
std::vector<int> quintile_stratified_folds(const std::vector<double> &values, int k,
                                           std::uint64_t seed, int bins = 5);

using Trainer = std::function<std::unique_ptr<Predictor>(const PropertyDataset &train)>;

/// Trainer for the shipped learners: "knn" (param = k) or "ridge" (param =
/// lambda), on ECFP bits of the given width.
Trainer make_trainer(std::string_view model, double param, std::size_t width = kDefaultWidth);

struct FoldResult {
  RegressionMetrics train;
  RegressionMetrics test;
};

struct CvReport {
  std::vector<FoldResult> folds;
  std::vector<int> assignment;

  FoldResult mean() const;
  FoldResult sd() const;
};

/// Trains on k-1 folds and evaluates on the held-out one. Throws
/// DegenerateFold when a held-out fold has constant targets.
CvReport cross_validate(const PropertyDataset &ds, const Trainer &trainer, int k = 5,
                        std::uint64_t seed = 0);

struct GridPoint {
  double param = 0;
  CvReport report;
};

/// Cross-validates each parameter value; the best point has the highest
/// mean test R^2 (first wins ties).
std::vector<GridPoint> grid_search(const PropertyDataset &ds, std::string_view model,
                                   const std::vector<double> &params, int k = 5,
                                   std::uint64_t seed = 0, std::size_t width = kDefaultWidth);
std::size_t best_grid_point(const std::vector<GridPoint> &grid);

/// Parses "1,3,5" or "lo:hi:step" into parameter values.
std::vector<double> parse_grid(std::string_view spec);

/// Rows Task,Model,Fold,Train R-squared,Train MAE,Test R-squared,Test MAE
/// for each fold, then "mean" and "sd".
std::string cv_report_csv(const CvReport &report, std::string_view task, std::string_view model,
                          bool header = true);

}  // namespace sage
