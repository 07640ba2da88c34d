//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/molecule.hpp"

namespace sage {

inline constexpr double kStandardTemperature = 298.15;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DuplicateKey : public std::runtime_error {
public:
  DuplicateKey(const std::string &what, int line) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

struct PropertyRow {
  std::string smiles;  // canonical
  double value = 0;
  std::optional<double> temperature;  // kelvin
};

struct DatasetWarning {
  int line = 0;
  std::string message;
};

struct PropertyDataset {
  std::string property;
  std::string unit;
  std::vector<PropertyRow> rows;
  std::vector<DatasetWarning> warnings;

  std::size_t size() const { return rows.size(); }
  bool has_temperature() const;
  std::vector<double> values() const;
};

/// Reads CSV text with a header naming smiles,value[,temperature]. Comment
/// lines start with '#'; "# property: NAME; unit: UNIT" sets the metadata.
/// Unparseable rows become warnings; a repeated (smiles, temperature) key
/// throws DuplicateKey.
PropertyDataset parse_dataset(std::string_view text);
PropertyDataset load_dataset(const std::string &path);

void write_dataset(const PropertyDataset &ds, const std::string &path);

/// Reads a whole file; throws IoError.
std::string read_file(const std::string &path);

/// 64-bit FNV-1a of a byte string, and of a file's contents.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t file_hash(const std::string &path);

}  // namespace sage
