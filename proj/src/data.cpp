#include "gnbp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "gnbp/errors.hpp"
#include "gnbp/rng.hpp"

namespace gnbp {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

RawTable parse_csv(const std::string& text, LabelColumn label_column) {
  RawTable table;
  std::size_t width = 0;
  std::size_t label_at = 0;
  bool first_row = true;

  std::istringstream in(text);
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);

    if (first_row) {
      width = fields.size();
      if (width < 2) throw ParseError(row_no, 1, "need at least one feature and a label");
      const int pos = label_column.position < 0
                          ? static_cast<int>(width) + label_column.position
                          : label_column.position;
      if (pos < 0 || pos >= static_cast<int>(width))
        throw ParseError(row_no, 1, "label column out of range");
      label_at = static_cast<std::size_t>(pos);
    } else if (fields.size() != width) {
      throw ParseError(row_no, std::min(fields.size(), width) + 1,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()));
    }

    RawRow row;
    row.features.reserve(width - 1);
    bool header = false;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_at) {
        row.label = std::string(fields[c]);
        continue;
      }
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        if (first_row) {
          header = true;
          break;
        }
        throw ParseError(row_no, c + 1, "non-numeric feature '" + std::string(fields[c]) + "'");
      }
      row.features.push_back(v);
    }
    first_row = false;
    if (header) continue;
    if (row.label.empty()) throw ParseError(row_no, label_at + 1, "empty class label");
    table.rows.push_back(std::move(row));
  }
  return table;
}

RawTable load_csv(const std::filesystem::path& path, LabelColumn label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), label_column);
}

MinMaxTransform MinMaxTransform::fit(std::span<const Vector> patterns) {
  if (patterns.empty()) return MinMaxTransform{};
  std::vector<std::pair<double, double>> ranges;
  for (double v : patterns.front()) ranges.emplace_back(v, v);
  for (const auto& p : patterns) {
    if (p.size() != ranges.size()) throw DimensionMismatch("ragged patterns in min-max fit");
    for (std::size_t i = 0; i < p.size(); ++i) {
      ranges[i].first = std::min(ranges[i].first, p[i]);
      ranges[i].second = std::max(ranges[i].second, p[i]);
    }
  }
  return MinMaxTransform(std::move(ranges));
}

Vector MinMaxTransform::apply(std::span<const double> features) const {
  if (features.size() != ranges_.size())
    throw DimensionMismatch("min-max transform fitted on a different feature count");
  Vector out(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto [lo, hi] = ranges_[i];
    out[i] = hi > lo ? (features[i] - lo) / (hi - lo) : 0.0;
  }
  return out;
}

void MinMaxTransform::apply_in_place(RawTable& table) const {
  for (auto& row : table.rows) row.features = apply(row.features);
}

void MinMaxTransform::apply_in_place(Dataset& data) const {
  for (auto& p : data.patterns) p = apply(p);
}

std::pair<RawTable, MinMaxTransform> normalize_minmax(const RawTable& table) {
  std::vector<Vector> patterns;
  patterns.reserve(table.rows.size());
  for (const auto& row : table.rows) patterns.push_back(row.features);
  MinMaxTransform t = MinMaxTransform::fit(patterns);
  RawTable out = table;
  t.apply_in_place(out);
  return {std::move(out), std::move(t)};
}

EncodedDataset encode_targets(const RawTable& table) {
  EncodedDataset enc;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    if (index.emplace(row.label, enc.class_names.size()).second)
      enc.class_names.push_back(row.label);
  }
  if (enc.class_names.size() < 2)
    throw std::invalid_argument("need at least two classes to encode targets");

  const std::size_t k = enc.class_names.size();
  for (const auto& row : table.rows) {
    const std::size_t c = index.at(row.label);
    Vector t(k, 0.0);
    t[c] = 1.0;
    enc.data.patterns.push_back(row.features);
    enc.data.targets.push_back(std::move(t));
    enc.data.labels.push_back(c);
  }
  return enc;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  data.validate();
  if (spec.stratified && !data.has_labels())
    throw MissingLabels("stratified split needs class labels");

  Rng rng(spec.seed);
  std::vector<bool> in_test(data.size(), false);

  // Groups are visited in ascending label order so the draw sequence is fixed.
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t j = 0; j < data.size(); ++j)
    groups[spec.stratified ? data.labels[j] : 0].push_back(j);
  for (auto& [label, members] : groups) {
    rng.shuffle(members.begin(), members.end());
    const auto take = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < take && i < members.size(); ++i) in_test[members[i]] = true;
  }

  Dataset train, test;
  for (std::size_t j = 0; j < data.size(); ++j) {
    Dataset& dst = in_test[j] ? test : train;
    dst.patterns.push_back(data.patterns[j]);
    dst.targets.push_back(data.targets[j]);
    if (data.has_labels()) dst.labels.push_back(data.labels[j]);
  }
  if (train.size() == 0 || test.size() == 0)
    throw EmptySplit("split leaves the " + std::string(train.size() == 0 ? "training" : "test") +
                     " side empty");
  return {std::move(train), std::move(test)};
}

std::size_t classify(std::span<const double> output) {
  if (output.empty()) throw DimensionMismatch("cannot classify an empty output");
  std::size_t best = 0;
  for (std::size_t i = 1; i < output.size(); ++i)
    if (output[i] > output[best]) best = i;
  return best;
}

}  // namespace gnbp
