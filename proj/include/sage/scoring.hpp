//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sage/chemclass.hpp"
#include "sage/predictor.hpp"

namespace sage {

enum class Property {
  kPka,
  kViscosity,
  kVaporPressure,
  kBoilingPoint,
  kMeltingPoint,
  kLogS,
  kRaScore,
  kPrice,
  kCo2Absorption,
};

/// The eight properties averaged by the multi-property score.
inline constexpr std::array<Property, 8> kMpoProperties{
    Property::kPka,          Property::kViscosity, Property::kVaporPressure,
    Property::kBoilingPoint, Property::kMeltingPoint, Property::kLogS,
    Property::kRaScore,      Property::kPrice};

std::string_view to_string(Property p);
std::optional<Property> property_from_string(std::string_view name);

class NotAmine : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct ScalerSpec {
  double lo = 0;
  double hi = 1;
  bool increasing = true;
};

/// Clamped linear ramp from lo to hi; reversed for decreasing specs.
double scale(double x, const ScalerSpec &spec);

/// Parses "lo:hi:inc" or "lo:hi:dec". Throws std::invalid_argument.
ScalerSpec parse_scaler(std::string_view text);

using ScalerMap = std::map<Property, ScalerSpec>;

/// The paper's eight breakpoint rules.
ScalerMap default_scalers();

inline constexpr double kRestrictionPenalty = 0.1;

/// Predictors keyed by property. The pKa site hook, when set, returns one
/// value per amine site; otherwise the molecule-level prediction is used for
/// every site.
struct PredictorSet {
  std::map<Property, std::shared_ptr<const Predictor>> predictors;
  std::function<std::vector<double>(const Molecule &, const std::vector<AmineSite> &)> pka_sites;

  /// Raw value for `p`; pKa is the mean over amine sites. Viscosity and
  /// vapour pressure are queried at 298.15 K. Throws std::out_of_range when
  /// no predictor is registered.
  double raw(Property p, const Molecule &mol, const std::vector<AmineSite> &sites) const;
};

enum class SpoObjective { kMaxPka, kMinViscosity, kMinVaporPressure };

std::string_view to_string(SpoObjective o);
std::optional<SpoObjective> spo_objective_from_string(std::string_view name);
Property objective_property(SpoObjective o);

struct ScoreResult {
  double score = 0;
  std::map<Property, double> raw;
  std::map<Property, double> scaled;
  AmineType type = AmineType::kNotAmine;
  bool penalized = false;
};

/// Scaled single property, times 0.1 when the amine type fails the
/// restriction. Throws NotAmine.
ScoreResult spo_score(const Molecule &mol, SpoObjective objective, Restriction restriction,
                      const PredictorSet &predictors, const ScalerMap &scalers = default_scalers());

/// Mean of the scaled components (eight, or nine with CO2 absorption), then
/// times 0.1 when the restriction fails. Throws NotAmine.
ScoreResult mpo_score(const Molecule &mol, Restriction restriction, const PredictorSet &predictors,
                      const ScalerMap &scalers = default_scalers(),
                      bool include_absorption = false);

/// Mean of already-scaled components with the restriction penalty.
double combine_components(const std::vector<double> &scaled, bool penalized);

}  // namespace sage
