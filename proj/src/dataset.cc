/*
 * Copyright 2026 The anovadistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "anovadistill/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "anovadistill/error.h"
#include "anovadistill/rng.h"

namespace anovadistill {
namespace {

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(Trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(Trim(cell));
  return cells;
}

std::string CellLocation(const std::string& source, int line, int column,
                         const std::string& name) {
  return source + ": row " + std::to_string(line) + ", column " +
         std::to_string(column + 1) + " (" + name + ")";
}

}  // namespace

const char* FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kBinary ? "binary" : "continuous";
}

FeatureKind ParseFeatureKind(const std::string& name) {
  if (name == "continuous") return FeatureKind::kContinuous;
  if (name == "binary") return FeatureKind::kBinary;
  throw InvalidArgumentError("unknown feature kind \"" + name +
                             "\" (expected \"continuous\" or \"binary\")");
}

double FeatureSpec::Scale(double raw) const {
  if (kind == FeatureKind::kBinary) return raw;
  return (raw - raw_min) / (raw_max - raw_min);
}

double FeatureSpec::Unscale(double scaled) const {
  if (kind == FeatureKind::kBinary) return scaled;
  return raw_min + scaled * (raw_max - raw_min);
}

Dataset::Dataset(std::vector<FeatureSpec> specs, RowMatrix values)
    : specs_(std::move(specs)), values_(std::move(values)) {
  if (values_.cols() < 1) {
    throw InvalidArgumentError("dataset needs at least one feature");
  }
  if (values_.rows() < 2) {
    throw InvalidArgumentError("dataset needs at least two rows");
  }
  if (static_cast<Eigen::Index>(specs_.size()) != values_.cols()) {
    throw InvalidArgumentError("feature spec count does not match columns");
  }
  for (int j = 0; j < p(); ++j) {
    const FeatureSpec& spec = specs_[j];
    if (spec.kind == FeatureKind::kContinuous &&
        !(spec.raw_min < spec.raw_max)) {
      throw InvalidArgumentError("constant feature \"" + spec.name +
                                 "\": raw_min must be below raw_max");
    }
    for (int i = 0; i < n(); ++i) {
      const double v = values_(i, j);
      const bool ok = spec.kind == FeatureKind::kBinary
                          ? (v == 0.0 || v == 1.0)
                          : (v >= 0.0 && v <= 1.0);
      if (!ok) {
        throw InvalidArgumentError(
            "scaled value out of domain at row " + std::to_string(i) +
            ", feature \"" + spec.name + "\"");
      }
    }
  }
}

std::vector<FeatureKind> Dataset::kinds() const {
  std::vector<FeatureKind> out;
  out.reserve(specs_.size());
  for (const auto& s : specs_) out.push_back(s.kind);
  return out;
}

Dataset Dataset::Rows(std::span<const int> rows) const {
  RowMatrix sub(rows.size(), p());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    sub.row(r) = values_.row(rows[r]);
  }
  return Dataset(specs_, std::move(sub));
}

SchemaHints LoadSchemaHints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("schema file not found: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError("schema file " + path + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw InvalidArgumentError("schema file " + path +
                               " must hold a JSON object");
  }
  SchemaHints hints;
  for (const auto& [name, kind] : doc.items()) {
    if (!kind.is_string()) {
      throw InvalidArgumentError("schema entry for \"" + name +
                                 "\" must be a string");
    }
    hints[name] = ParseFeatureKind(kind.get<std::string>());
  }
  return hints;
}

Dataset ParseCsv(const std::string& text, const SchemaHints& hints,
                 const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!Trim(line).empty()) {
      header = SplitCsvLine(line);
      break;
    }
  }
  if (header.empty()) throw InvalidArgumentError(source + ": missing header");
  const int p = static_cast<int>(header.size());

  std::vector<double> cells;
  int n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto row = SplitCsvLine(line);
    if (static_cast<int>(row.size()) != p) {
      throw InvalidArgumentError(source + ": row " + std::to_string(line_no) +
                                 " has " + std::to_string(row.size()) +
                                 " cells, header has " + std::to_string(p));
    }
    for (int j = 0; j < p; ++j) {
      double value = 0.0;
      const std::string& cell = row[j];
      const char* first = cell.data();
      const char* last = first + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (cell.empty() || ec != std::errc() || ptr != last ||
          !std::isfinite(value)) {
        throw InvalidArgumentError("parse failure at " +
                                   CellLocation(source, line_no, j, header[j]) +
                                   ": \"" + cell + "\"");
      }
      cells.push_back(value);
    }
    ++n;
  }

  RowMatrix raw(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) raw(i, j) = cells[i * p + j];
  }

  for (const auto& [name, kind] : hints) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw InvalidArgumentError(source + ": schema names unknown column \"" +
                                 name + "\"");
    }
  }

  std::vector<FeatureSpec> specs(p);
  for (int j = 0; j < p; ++j) {
    FeatureSpec& spec = specs[j];
    spec.name = header[j];
    const auto hint = hints.find(header[j]);
    spec.kind = hint == hints.end() ? FeatureKind::kContinuous : hint->second;
    if (spec.kind == FeatureKind::kBinary) {
      for (int i = 0; i < n; ++i) {
        if (raw(i, j) != 0.0 && raw(i, j) != 1.0) {
          throw InvalidArgumentError(
              "binary column holds a value other than 0/1 at " +
              CellLocation(source, i + 2, j, header[j]));
        }
      }
      spec.raw_min = 0.0;
      spec.raw_max = 1.0;
    } else if (n > 0) {
      spec.raw_min = raw.col(j).minCoeff();
      spec.raw_max = raw.col(j).maxCoeff();
      if (spec.raw_min == spec.raw_max) {
        throw InvalidArgumentError(source + ": constant feature \"" +
                                   header[j] + "\"");
      }
    }
  }
  return DatasetFromRaw(std::move(specs), raw);
}

Dataset LoadCsv(const std::string& path, const SchemaHints& hints) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError("data file not found: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), hints, path);
}

Dataset DatasetFromRaw(std::vector<FeatureSpec> specs, const RowMatrix& raw) {
  if (static_cast<Eigen::Index>(specs.size()) != raw.cols()) {
    throw InvalidArgumentError("feature spec count does not match columns");
  }
  RowMatrix scaled(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      // Exact endpoints keep min-max scaling inside [0, 1] despite rounding.
      const FeatureSpec& spec = specs[j];
      double v = spec.Scale(raw(i, j));
      if (spec.kind == FeatureKind::kContinuous) v = std::clamp(v, 0.0, 1.0);
      scaled(i, j) = v;
    }
  }
  return Dataset(std::move(specs), std::move(scaled));
}

Dataset GenerateUniform(std::vector<FeatureSpec> specs, int n, uint64_t seed) {
  const int p = static_cast<int>(specs.size());
  Rng rng(DeriveSeed(seed, "uniform-data"));
  RowMatrix values(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      const double u = UniformUnit(rng);
      values(i, j) =
          specs[j].kind == FeatureKind::kBinary ? (u < 0.5 ? 0.0 : 1.0) : u;
    }
  }
  return Dataset(std::move(specs), std::move(values));
}

ScaledPoint ScalePoint(std::span<const double> raw,
                       std::span<const FeatureSpec> specs) {
  if (raw.size() != specs.size()) {
    throw InvalidArgumentError("dimension mismatch: point has " +
                               std::to_string(raw.size()) +
                               " coordinates, expected " +
                               std::to_string(specs.size()));
  }
  ScaledPoint out;
  out.values.resize(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t j = 0; j < raw.size(); ++j) {
    double v = specs[j].Scale(raw[j]);
    if (specs[j].kind == FeatureKind::kBinary) {
      v = v >= 0.5 ? 1.0 : 0.0;
      if (raw[j] != 0.0 && raw[j] != 1.0) out.clamped = true;
    } else if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      out.clamped = true;
    }
    out.values[static_cast<Eigen::Index>(j)] = v;
  }
  return out;
}

Eigen::VectorXd UnscalePoint(std::span<const double> scaled,
                             std::span<const FeatureSpec> specs) {
  if (scaled.size() != specs.size()) {
    throw InvalidArgumentError("dimension mismatch: point has " +
                               std::to_string(scaled.size()) +
                               " coordinates, expected " +
                               std::to_string(specs.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(scaled.size()));
  for (std::size_t j = 0; j < scaled.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = specs[j].Unscale(scaled[j]);
  }
  return out;
}

}  // namespace anovadistill
