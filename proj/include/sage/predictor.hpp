//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sage/dataset.hpp"
#include "sage/fingerprint.hpp"

namespace sage {

inline constexpr std::string_view kPredictorMagic = "SAGP1";

class MissingKey : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

class PredictorLoadError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class PredictorKind { kLookupTable, kKnnFingerprint, kRidgeFingerprint };

std::string_view to_string(PredictorKind kind);

/// Maps a molecule (and, for temperature-dependent properties, a
/// temperature in kelvin) to a property value.
class Predictor {
public:
  virtual ~Predictor() = default;
  virtual PredictorKind kind() const = 0;
  virtual double predict(const Molecule &mol,
                         double temperature = kStandardTemperature) const = 0;
  virtual void save(std::ostream &out) const = 0;

  void save_file(const std::string &path) const;
};

/// Exact lookup by canonical SMILES. With temperatures, the row nearest the
/// query temperature is used.
class LookupTable final : public Predictor {
public:
  explicit LookupTable(const PropertyDataset &ds);

  PredictorKind kind() const override { return PredictorKind::kLookupTable; }
  double predict(const Molecule &mol, double temperature) const override;
  double predict(std::string_view canonical, double temperature = kStandardTemperature) const;
  void save(std::ostream &out) const override;
  static std::unique_ptr<LookupTable> load_body(std::istream &in);

  std::size_t size() const { return rows_.size(); }

private:
  LookupTable() = default;
  std::multimap<std::string, std::pair<double, double>, std::less<>> rows_;  // T (or -1), y
};

/// Tanimoto k-nearest neighbours. Distance is 1 - Tanimoto plus |dT|/100
/// when temperatures are present; the result is the similarity-weighted
/// mean of the k nearest values (plain mean if all similarities are 0).
class KnnPredictor final : public Predictor {
public:
  KnnPredictor(const PropertyDataset &ds, int k, std::size_t width = kDefaultWidth);

  PredictorKind kind() const override { return PredictorKind::kKnnFingerprint; }
  double predict(const Molecule &mol, double temperature) const override;
  double predict(const Fingerprint &fp, std::optional<double> temperature) const;
  void save(std::ostream &out) const override;
  static std::unique_ptr<KnnPredictor> load_body(std::istream &in);

  int k() const { return k_; }

private:
  KnnPredictor() = default;
  int k_ = 5;
  std::size_t width_ = kDefaultWidth;
  std::vector<Fingerprint> fps_;
  std::vector<double> temps_;  // NaN when absent
  std::vector<double> values_;
};

/// Ridge regression on fingerprint bits, plus (T - 298.15)/100 as an extra
/// feature when the training data carries temperatures.
class RidgePredictor final : public Predictor {
public:
  RidgePredictor(const PropertyDataset &ds, double lambda, std::size_t width = kDefaultWidth);
  RidgePredictor(std::vector<double> weights, double bias, bool uses_temperature,
                 std::size_t width = kDefaultWidth);

  PredictorKind kind() const override { return PredictorKind::kRidgeFingerprint; }
  double predict(const Molecule &mol, double temperature) const override;
  double predict(const Fingerprint &fp, std::optional<double> temperature) const;
  void save(std::ostream &out) const override;
  static std::unique_ptr<RidgePredictor> load_body(std::istream &in);

  const std::vector<double> &weights() const { return weights_; }
  double bias() const { return bias_; }

private:
  RidgePredictor() = default;
  std::size_t width_ = kDefaultWidth;
  bool uses_temperature_ = false;
  std::vector<double> weights_;
  double bias_ = 0;
};

std::unique_ptr<Predictor> load_predictor(std::istream &in);
std::unique_ptr<Predictor> load_predictor_file(const std::string &path);

/// Builds a predictor from a spec string: lookup:FILE.csv,
/// knn:FILE.csv[:k=N], ridge:FILE.csv[:lambda=X] or model:FILE.bin. Relative
/// paths resolve against `base_dir`.
std::unique_ptr<Predictor> make_predictor(std::string_view spec,
                                          const std::string &base_dir = ".");

/// The data file named by a predictor spec, resolved against `base_dir`.
std::string predictor_spec_path(std::string_view spec, const std::string &base_dir = ".");

}  // namespace sage
