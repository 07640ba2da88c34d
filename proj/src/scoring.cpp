//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <fmt/format.h>

namespace sage {
namespace {

constexpr std::array<std::pair<Property, std::string_view>, 9> kPropertyNames{{
    {Property::kPka, "pka"},
    {Property::kViscosity, "viscosity"},
    {Property::kVaporPressure, "vapor_pressure"},
    {Property::kBoilingPoint, "boiling_point"},
    {Property::kMeltingPoint, "melting_point"},
    {Property::kLogS, "log_s"},
    {Property::kRaScore, "ra_score"},
    {Property::kPrice, "price"},
    {Property::kCo2Absorption, "co2_absorption"},
}};

constexpr std::array<std::pair<SpoObjective, std::string_view>, 3> kObjectiveNames{{
    {SpoObjective::kMaxPka, "max_pka"},
    {SpoObjective::kMinViscosity, "min_viscosity"},
    {SpoObjective::kMinVaporPressure, "min_vapor_pressure"},
}};

double parse_number(std::string_view s) {
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument(fmt::format("bad number '{}'", s));
  return v;
}

std::vector<AmineSite> require_sites(const Molecule &mol) {
  auto sites = find_amine_sites(mol);
  if (sites.empty()) throw NotAmine("molecule has no amine nitrogen");
  return sites;
}

}  // namespace

std::string_view to_string(Property p) {
  for (const auto &[q, name] : kPropertyNames)
    if (q == p) return name;
  return "?";
}

std::optional<Property> property_from_string(std::string_view name) {
  for (const auto &[q, n] : kPropertyNames)
    if (n == name) return q;
  return std::nullopt;
}

double scale(double x, const ScalerSpec &spec) {
  const double t = std::clamp((x - spec.lo) / (spec.hi - spec.lo), 0.0, 1.0);
  return spec.increasing ? t : 1.0 - t;
}

ScalerSpec parse_scaler(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos)
    throw std::invalid_argument(fmt::format("scaler '{}' is not lo:hi:inc|dec", text));
  ScalerSpec s;
  s.lo = parse_number(text.substr(0, a));
  s.hi = parse_number(text.substr(a + 1, b - a - 1));
  const auto dir = text.substr(b + 1);
  if (dir != "inc" && dir != "dec")
    throw std::invalid_argument(fmt::format("scaler direction '{}' is not inc or dec", dir));
  s.increasing = dir == "inc";
  if (!(s.lo < s.hi)) throw std::invalid_argument(fmt::format("scaler '{}' needs lo < hi", text));
  return s;
}

ScalerMap default_scalers() {
  return {
      {Property::kPka, {7, 14, true}},
      {Property::kViscosity, {-1, 2, false}},
      {Property::kVaporPressure, {-3, 3, false}},
      {Property::kBoilingPoint, {80, 250, true}},
      {Property::kMeltingPoint, {40, 80, false}},
      {Property::kLogS, {-4, 2, true}},
      {Property::kRaScore, {0, 1, true}},
      {Property::kPrice, {0, 10, false}},
  };
}

double PredictorSet::raw(Property p, const Molecule &mol,
                         const std::vector<AmineSite> &sites) const {
  if (p == Property::kPka && pka_sites) {
    const auto v = pka_sites(mol, sites);
    if (v.empty()) throw std::out_of_range("pKa site hook returned no values");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  }
  auto it = predictors.find(p);
  if (it == predictors.end())
    throw std::out_of_range(fmt::format("no predictor for {}", to_string(p)));
  // A molecule-level pKa applies to each site alike, so its site mean is itself.
  return it->second->predict(mol, kStandardTemperature);
}

std::string_view to_string(SpoObjective o) {
  for (const auto &[q, name] : kObjectiveNames)
    if (q == o) return name;
  return "?";
}

std::optional<SpoObjective> spo_objective_from_string(std::string_view name) {
  for (const auto &[q, n] : kObjectiveNames)
    if (n == name) return q;
  return std::nullopt;
}

Property objective_property(SpoObjective o) {
  switch (o) {
    case SpoObjective::kMaxPka: return Property::kPka;
    case SpoObjective::kMinViscosity: return Property::kViscosity;
    case SpoObjective::kMinVaporPressure: return Property::kVaporPressure;
  }
  return Property::kPka;
}

double combine_components(const std::vector<double> &scaled, bool penalized) {
  if (scaled.empty()) return 0.0;
  const double mean = std::accumulate(scaled.begin(), scaled.end(), 0.0) /
                      static_cast<double>(scaled.size());
  return penalized ? mean * kRestrictionPenalty : mean;
}

ScoreResult spo_score(const Molecule &mol, SpoObjective objective, Restriction restriction,
                      const PredictorSet &predictors, const ScalerMap &scalers) {
  const auto sites = require_sites(mol);
  ScoreResult r;
  r.type = classify_amine(sites);
  r.penalized = !matches_restriction(r.type, restriction);
  const Property p = objective_property(objective);
  const double x = predictors.raw(p, mol, sites);
  r.raw[p] = x;
  r.scaled[p] = scale(x, scalers.at(p));
  r.score = combine_components({r.scaled[p]}, r.penalized);
  return r;
}

ScoreResult mpo_score(const Molecule &mol, Restriction restriction, const PredictorSet &predictors,
                      const ScalerMap &scalers, bool include_absorption) {
  const auto sites = require_sites(mol);
  ScoreResult r;
  r.type = classify_amine(sites);
  r.penalized = !matches_restriction(r.type, restriction);
  std::vector<Property> props(kMpoProperties.begin(), kMpoProperties.end());
  if (include_absorption) props.push_back(Property::kCo2Absorption);
  std::vector<double> scaled;
  for (Property p : props) {
    const double x = predictors.raw(p, mol, sites);
    r.raw[p] = x;
    auto it = scalers.find(p);
    r.scaled[p] = it == scalers.end() ? std::clamp(x, 0.0, 1.0) : scale(x, it->second);
    scaled.push_back(r.scaled[p]);
  }
  r.score = combine_components(scaled, r.penalized);
  return r;
}

}  // namespace sage
