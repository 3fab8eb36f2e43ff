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

#ifndef ANOVADISTILL_DATASET_H_
#define ANOVADISTILL_DATASET_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace anovadistill {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class FeatureKind { kContinuous, kBinary };

const char* FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(const std::string& name);

// Per-column min-max scaler. Binary features are stored with the range [0, 1]
// and pass through unchanged.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  double raw_min = 0.0;
  double raw_max = 1.0;

  double Scale(double raw) const;
  double Unscale(double scaled) const;
};

// Scaled tabular data. Every continuous value lies in [0, 1] and every binary
// value is exactly 0 or 1. Immutable after construction.
class Dataset {
 public:
  // Validates the invariants (n >= 2, p >= 1, ranges, binary values).
  Dataset(std::vector<FeatureSpec> specs, RowMatrix values);

  int n() const { return static_cast<int>(values_.rows()); }
  int p() const { return static_cast<int>(values_.cols()); }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  const RowMatrix& values() const { return values_; }
  double operator()(int row, int col) const { return values_(row, col); }
  std::span<const double> row(int i) const {
    return {values_.data() + static_cast<std::ptrdiff_t>(i) * p(),
            static_cast<std::size_t>(p())};
  }
  std::vector<FeatureKind> kinds() const;
  bool is_binary(int feature) const {
    return specs_[feature].kind == FeatureKind::kBinary;
  }

  // Rows selected by index, keeping the scaler metadata.
  Dataset Rows(std::span<const int> rows) const;

 private:
  std::vector<FeatureSpec> specs_;
  RowMatrix values_;
};

// Column name -> kind, read from a JSON object such as
// {"age": "continuous", "smoker": "binary"}.
using SchemaHints = std::map<std::string, FeatureKind>;
SchemaHints LoadSchemaHints(const std::string& path);

// Reads a header-first, comma-separated file of decimal numbers and min-max
// scales every continuous column. Columns without a hint are continuous.
Dataset LoadCsv(const std::string& path, const SchemaHints& hints = {});

// Same, from in-memory text; `source` names the input in error messages.
Dataset ParseCsv(const std::string& text, const SchemaHints& hints = {},
                 const std::string& source = "<memory>");

// Builds a dataset from raw (unscaled) values and the scaler to apply.
Dataset DatasetFromRaw(std::vector<FeatureSpec> specs, const RowMatrix& raw);

// n iid rows, uniform on [0,1] for continuous features and fair coin flips for
// binary ones.
Dataset GenerateUniform(std::vector<FeatureSpec> specs, int n, uint64_t seed);

struct ScaledPoint {
  Eigen::VectorXd values;
  // Set when at least one coordinate fell outside its recorded range and was
  // clamped to [0, 1].
  bool clamped = false;
};

ScaledPoint ScalePoint(std::span<const double> raw,
                       std::span<const FeatureSpec> specs);
Eigen::VectorXd UnscalePoint(std::span<const double> scaled,
                             std::span<const FeatureSpec> specs);

}  // namespace anovadistill

#endif  // ANOVADISTILL_DATASET_H_
