//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "binary_io.hpp"
#include "sage/smiles.hpp"

namespace sage {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double temperature_feature(double t) { return (t - kStandardTemperature) / 100.0; }

using Reader = detail::Reader<PredictorLoadError>;

void put_fingerprint(std::ostream &out, const Fingerprint &fp) {
  for (auto w : fp.words()) detail::put_u64(out, w);
}

Fingerprint read_fingerprint(Reader &r, std::size_t width) {
  Fingerprint fp(width);
  for (std::size_t w = 0; w < (width + 63) / 64; ++w) {
    const std::uint64_t word = r.u64();
    for (int b = 0; b < 64; ++b)
      if ((word >> b) & 1u) {
        if (w * 64 + b >= width) throw PredictorLoadError("fingerprint bit beyond width");
        fp.set(w * 64 + b);
      }
  }
  return fp;
}

std::size_t read_width(Reader &r) {
  const std::uint32_t width = r.u32();
  if (width == 0 || width > (1u << 20)) throw PredictorLoadError("bad fingerprint width");
  return width;
}

}  // namespace

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kLookupTable: return "lookup";
    case PredictorKind::kKnnFingerprint: return "knn";
    case PredictorKind::kRidgeFingerprint: return "ridge";
  }
  return "?";
}

void Predictor::save_file(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  save(out);
  if (!out) throw IoError("failed writing " + path);
}

LookupTable::LookupTable(const PropertyDataset &ds) {
  for (const auto &row : ds.rows)
    rows_.emplace(row.smiles, std::make_pair(row.temperature.value_or(kNaN), row.value));
}

double LookupTable::predict(const Molecule &mol, double temperature) const {
  return predict(canonical_smiles(mol), temperature);
}

double LookupTable::predict(std::string_view canonical, double temperature) const {
  auto [lo, hi] = rows_.equal_range(canonical);
  if (lo == hi) throw MissingKey(fmt::format("no lookup entry for {}", canonical));
  double best = std::numeric_limits<double>::infinity(), value = lo->second.second;
  for (auto it = lo; it != hi; ++it) {
    const double t = it->second.first;
    const double d = std::isnan(t) ? 0.0 : std::abs(t - temperature);
    if (d < best) {
      best = d;
      value = it->second.second;
    }
  }
  return value;
}

void LookupTable::save(std::ostream &out) const {
  out.write(kPredictorMagic.data(), static_cast<std::streamsize>(kPredictorMagic.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(kind()));
  detail::put_u64(out, rows_.size());
  for (const auto &[smiles, tv] : rows_) {
    detail::put_string(out, smiles);
    detail::put_f64(out, tv.first);
    detail::put_f64(out, tv.second);
  }
}

std::unique_ptr<LookupTable> LookupTable::load_body(std::istream &in) {
  Reader r(in);
  std::unique_ptr<LookupTable> p(new LookupTable);
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string smiles = r.string(4096);
    const double t = r.f64();
    const double y = r.f64();
    p->rows_.emplace(std::move(smiles), std::make_pair(t, y));
  }
  return p;
}

KnnPredictor::KnnPredictor(const PropertyDataset &ds, int k, std::size_t width)
    : k_(k), width_(width) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (ds.rows.empty()) throw std::invalid_argument("k-NN needs training rows");
  for (const auto &row : ds.rows) {
    fps_.push_back(ecfp(parse_smiles(row.smiles), kDefaultRadius, width));
    temps_.push_back(row.temperature.value_or(kNaN));
    values_.push_back(row.value);
  }
}

double KnnPredictor::predict(const Molecule &mol, double temperature) const {
  return predict(ecfp(mol, kDefaultRadius, width_), temperature);
}

double KnnPredictor::predict(const Fingerprint &fp, std::optional<double> temperature) const {
  const std::size_t n = fps_.size();
  std::vector<double> sim(n), dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    sim[i] = tanimoto(fp, fps_[i]);
    dist[i] = 1.0 - sim[i];
    if (temperature && !std::isnan(temps_[i])) dist[i] += std::abs(*temperature - temps_[i]) / 100.0;
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t k = std::min<std::size_t>(k_, n);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });
  double wsum = 0, ysum = 0, plain = 0;
  for (std::size_t j = 0; j < k; ++j) {
    wsum += sim[idx[j]];
    ysum += sim[idx[j]] * values_[idx[j]];
    plain += values_[idx[j]];
  }
  return wsum > 0 ? ysum / wsum : plain / static_cast<double>(k);
}

void KnnPredictor::save(std::ostream &out) const {
  out.write(kPredictorMagic.data(), static_cast<std::streamsize>(kPredictorMagic.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(kind()));
  detail::put_u32(out, static_cast<std::uint32_t>(k_));
  detail::put_u32(out, static_cast<std::uint32_t>(width_));
  detail::put_u64(out, fps_.size());
  for (std::size_t i = 0; i < fps_.size(); ++i) {
    put_fingerprint(out, fps_[i]);
    detail::put_f64(out, temps_[i]);
    detail::put_f64(out, values_[i]);
  }
}

std::unique_ptr<KnnPredictor> KnnPredictor::load_body(std::istream &in) {
  Reader r(in);
  std::unique_ptr<KnnPredictor> p(new KnnPredictor);
  p->k_ = static_cast<int>(r.u32());
  if (p->k_ < 1) throw PredictorLoadError("bad k");
  p->width_ = read_width(r);
  const std::uint64_t n = r.u64();
  if (n == 0) throw PredictorLoadError("k-NN model has no rows");
  for (std::uint64_t i = 0; i < n; ++i) {
    p->fps_.push_back(read_fingerprint(r, p->width_));
    p->temps_.push_back(r.f64());
    p->values_.push_back(r.f64());
  }
  return p;
}

RidgePredictor::RidgePredictor(const PropertyDataset &ds, double lambda, std::size_t width)
    : width_(width), uses_temperature_(ds.has_temperature()) {
  if (ds.rows.empty()) throw std::invalid_argument("ridge needs training rows");
  if (!(lambda > 0)) throw std::invalid_argument("ridge lambda must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(ds.rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(width) + (uses_temperature_ ? 1 : 0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = ds.rows[i];
    const Fingerprint fp = ecfp(parse_smiles(row.smiles), kDefaultRadius, width);
    for (std::size_t b = 0; b < width; ++b)
      if (fp.test(b)) x(i, static_cast<Eigen::Index>(b)) = 1.0;
    if (uses_temperature_)
      x(i, p - 1) = temperature_feature(row.temperature.value_or(kStandardTemperature));
    y(i) = row.value;
  }
  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const double mean_y = y.mean();
  x.rowwise() -= mean_x;
  y.array() -= mean_y;
  Eigen::VectorXd w;
  if (n < p) {
    Eigen::MatrixXd gram = x * x.transpose();
    gram.diagonal().array() += lambda;
    w = x.transpose() * gram.ldlt().solve(y);
  } else {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    w = gram.ldlt().solve(x.transpose() * y);
  }
  weights_.assign(w.data(), w.data() + w.size());
  bias_ = mean_y - mean_x.dot(w);
}

RidgePredictor::RidgePredictor(std::vector<double> weights, double bias, bool uses_temperature,
                               std::size_t width)
    : width_(width), uses_temperature_(uses_temperature), weights_(std::move(weights)),
      bias_(bias) {
  if (weights_.size() != width_ + (uses_temperature_ ? 1 : 0))
    throw std::invalid_argument("ridge weight count does not match width");
}

double RidgePredictor::predict(const Molecule &mol, double temperature) const {
  return predict(ecfp(mol, kDefaultRadius, width_), temperature);
}

double RidgePredictor::predict(const Fingerprint &fp, std::optional<double> temperature) const {
  double y = bias_;
  for (std::size_t b = 0; b < width_; ++b)
    if (fp.test(b)) y += weights_[b];
  if (uses_temperature_)
    y += weights_.back() * temperature_feature(temperature.value_or(kStandardTemperature));
  return y;
}

void RidgePredictor::save(std::ostream &out) const {
  out.write(kPredictorMagic.data(), static_cast<std::streamsize>(kPredictorMagic.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(kind()));
  detail::put_u32(out, static_cast<std::uint32_t>(width_));
  detail::put_u32(out, uses_temperature_ ? 1 : 0);
  detail::put_f64(out, bias_);
  detail::put_u32(out, static_cast<std::uint32_t>(weights_.size()));
  for (double w : weights_) detail::put_f64(out, w);
}

std::unique_ptr<RidgePredictor> RidgePredictor::load_body(std::istream &in) {
  Reader r(in);
  std::unique_ptr<RidgePredictor> p(new RidgePredictor);
  p->width_ = read_width(r);
  p->uses_temperature_ = r.u32() != 0;
  p->bias_ = r.f64();
  const std::uint32_t n = r.u32();
  if (n != p->width_ + (p->uses_temperature_ ? 1 : 0))
    throw PredictorLoadError("ridge weight count does not match width");
  p->weights_.resize(n);
  for (auto &w : p->weights_) w = r.f64();
  return p;
}

std::unique_ptr<Predictor> load_predictor(std::istream &in) {
  Reader r(in);
  r.expect_magic(kPredictorMagic);
  switch (static_cast<PredictorKind>(r.u32())) {
    case PredictorKind::kLookupTable: return LookupTable::load_body(in);
    case PredictorKind::kKnnFingerprint: return KnnPredictor::load_body(in);
    case PredictorKind::kRidgeFingerprint: return RidgePredictor::load_body(in);
  }
  throw PredictorLoadError("unknown predictor kind");
}

std::unique_ptr<Predictor> load_predictor_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PredictorLoadError("cannot open " + path);
  return load_predictor(in);
}

namespace {

struct ParsedSpec {
  std::string kind;
  std::string path;
  std::map<std::string, std::string> options;
};

ParsedSpec parse_spec(std::string_view spec, const std::string &base_dir) {
  ParsedSpec out;
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.emplace_back(spec.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() < 2 || parts[1].empty())
    throw PredictorLoadError(fmt::format("bad predictor spec '{}'", spec));
  out.kind = parts[0];
  std::filesystem::path p(parts[1]);
  out.path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  for (std::size_t i = 2; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos)
      throw PredictorLoadError(fmt::format("bad predictor option '{}'", parts[i]));
    out.options[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  return out;
}

}  // namespace

std::string predictor_spec_path(std::string_view spec, const std::string &base_dir) {
  return parse_spec(spec, base_dir).path;
}

std::unique_ptr<Predictor> make_predictor(std::string_view spec, const std::string &base_dir) {
  const ParsedSpec s = parse_spec(spec, base_dir);
  auto option = [&](const std::string &key, double fallback) {
    auto it = s.options.find(key);
    if (it == s.options.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception &) {
      throw PredictorLoadError(fmt::format("bad value for {} in '{}'", key, spec));
    }
  };
  for (const auto &[k, v] : s.options)
    if (!((s.kind == "knn" && k == "k") || (s.kind == "ridge" && k == "lambda")))
      throw PredictorLoadError(fmt::format("unknown option '{}' in '{}'", k, spec));
  try {
    if (s.kind == "model") return load_predictor_file(s.path);
    const PropertyDataset ds = load_dataset(s.path);
    if (s.kind == "lookup") return std::make_unique<LookupTable>(ds);
    if (s.kind == "knn") return std::make_unique<KnnPredictor>(ds, static_cast<int>(option("k", 5)));
    if (s.kind == "ridge") return std::make_unique<RidgePredictor>(ds, option("lambda", 1.0));
  } catch (const PredictorLoadError &) {
    throw;
  } catch (const std::exception &e) {
    throw PredictorLoadError(fmt::format("{}: {}", spec, e.what()));
  }
  throw PredictorLoadError(fmt::format("unknown predictor kind '{}'", s.kind));
}

}  // namespace sage
