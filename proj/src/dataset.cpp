//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sage/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "sage/smiles.hpp"

namespace sage {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void parse_metadata(std::string_view comment, PropertyDataset &ds) {
  for (auto part : split(comment, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string k = lower(trim(part.substr(0, colon)));
    const std::string v(trim(part.substr(colon + 1)));
    if (k == "property") ds.property = v;
    if (k == "unit") ds.unit = v;
  }
}

}  // namespace

bool PropertyDataset::has_temperature() const {
  return std::any_of(rows.begin(), rows.end(), [](const auto &r) { return r.temperature; });
}

std::vector<double> PropertyDataset::values() const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto &r : rows) v.push_back(r.value);
  return v;
}

PropertyDataset parse_dataset(std::string_view text) {
  PropertyDataset ds;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  int smiles_col = -1, value_col = -1, temp_col = -1;
  std::size_t columns = 0;
  std::set<std::pair<std::string, double>> keys;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      parse_metadata(line.substr(1), ds);
      continue;
    }
    const auto fields = split(line, ',');
    if (smiles_col < 0) {
      columns = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = lower(fields[i]);
        if (name == "smiles") smiles_col = static_cast<int>(i);
        if (name == "value") value_col = static_cast<int>(i);
        if (name == "temperature") temp_col = static_cast<int>(i);
      }
      if (smiles_col < 0 || value_col < 0)
        throw SchemaError(fmt::format("line {}: header must name smiles and value columns", line_no));
      continue;
    }
    if (fields.size() != columns) {
      ds.warnings.push_back({line_no, fmt::format("expected {} fields, got {}", columns, fields.size())});
      continue;
    }
    PropertyRow row;
    try {
      row.smiles = canonical_smiles(parse_smiles(fields[smiles_col]));
    } catch (const ParseError &e) {
      ds.warnings.push_back({line_no, fmt::format("invalid SMILES '{}': {}", fields[smiles_col], e.what())});
      continue;
    }
    const auto value = to_double(fields[value_col]);
    if (!value) {
      ds.warnings.push_back({line_no, fmt::format("invalid value '{}'", fields[value_col])});
      continue;
    }
    row.value = *value;
    if (temp_col >= 0 && !fields[temp_col].empty()) {
      const auto t = to_double(fields[temp_col]);
      if (!t) {
        ds.warnings.push_back({line_no, fmt::format("invalid temperature '{}'", fields[temp_col])});
        continue;
      }
      row.temperature = *t;
    }
    const double tkey = row.temperature.value_or(-1.0);
    if (!keys.emplace(row.smiles, tkey).second)
      throw DuplicateKey(fmt::format("line {}: duplicate entry for {}", line_no, row.smiles), line_no);
    ds.rows.push_back(std::move(row));
  }
  if (smiles_col < 0) throw SchemaError("missing header line");
  return ds;
}

PropertyDataset load_dataset(const std::string &path) { return parse_dataset(read_file(path)); }

void write_dataset(const PropertyDataset &ds, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  if (!ds.property.empty() || !ds.unit.empty())
    out << "# property: " << ds.property << "; unit: " << ds.unit << '\n';
  const bool temp = ds.has_temperature();
  out << (temp ? "smiles,value,temperature\n" : "smiles,value\n");
  for (const auto &r : ds.rows) {
    out << r.smiles << ',' << fmt::format("{:.17g}", r.value);
    if (temp) out << ',' << (r.temperature ? fmt::format("{:.17g}", *r.temperature) : "");
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t file_hash(const std::string &path) { return fnv1a64(read_file(path)); }

}  // namespace sage
