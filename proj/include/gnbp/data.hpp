#pragma once

// Dataset ingestion and preparation: CSV loading, min-max scaling, one-hot
// targets, stratified splitting and the argmax classifier.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnbp/network.hpp"

namespace gnbp {

struct RawRow {
  Vector features;
  std::string label;
};

struct RawTable {
  std::vector<RawRow> rows;

  std::size_t feature_count() const { return rows.empty() ? 0 : rows.front().features.size(); }
};

/// Column holding the class name. Negative positions count from the end,
/// so -1 is the last column.
struct LabelColumn {
  int position = -1;

  static LabelColumn last() { return {-1}; }
  static LabelColumn first() { return {0}; }
};

/// Comma-separated values, blank lines ignored. The first row is taken as a
/// header when any of its feature fields is non-numeric. Throws FileNotFound
/// or ParseError (1-based row and column).
RawTable load_csv(const std::filesystem::path& path, LabelColumn label_column = {});
RawTable parse_csv(const std::string& text, LabelColumn label_column = {});

/// Per-feature affine map onto [0, 1] fitted on one set of patterns.
class MinMaxTransform {
 public:
  MinMaxTransform() = default;
  explicit MinMaxTransform(std::vector<std::pair<double, double>> ranges)
      : ranges_(std::move(ranges)) {}

  static MinMaxTransform fit(std::span<const Vector> patterns);

  /// Constant features (max == min) map to 0.
  Vector apply(std::span<const double> features) const;
  void apply_in_place(RawTable& table) const;
  void apply_in_place(Dataset& data) const;

  const std::vector<std::pair<double, double>>& ranges() const noexcept { return ranges_; }

 private:
  std::vector<std::pair<double, double>> ranges_;
};

std::pair<RawTable, MinMaxTransform> normalize_minmax(const RawTable& table);

struct EncodedDataset {
  Dataset data;
  std::vector<std::string> class_names;  // index i is class i
};

/// One-hot targets, classes numbered in order of first appearance.
/// Throws std::invalid_argument when fewer than two classes are present.
EncodedDataset encode_targets(const RawTable& table);

struct SplitSpec {
  double test_fraction = 0.3;
  std::uint64_t seed = 1;
  bool stratified = true;
};

/// Deterministic for a fixed seed. Each side keeps the original pattern
/// order. Stratified splits put round(test_fraction * class size) patterns of
/// every class in the test side. Throws EmptySplit when a side ends up empty.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Index of the largest component, lowest index on ties.
std::size_t classify(std::span<const double> output);

}  // namespace gnbp
