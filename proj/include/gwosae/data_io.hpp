#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gwosae/matrix.hpp"

namespace gwosae {

using Labels = std::vector<std::size_t>;

struct Dataset {
  Matrix features;                     // N x F
  Labels labels;                       // indices into label_map
  std::vector<std::string> label_map;  // distinct class names, first-appearance order
  std::string name;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t feature_count() const noexcept { return features.cols(); }
  std::size_t class_count() const noexcept { return label_map.size(); }
  std::vector<std::size_t> class_counts() const;
  Dataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct SplitDataset {
  Dataset train;
  Dataset test;
  double train_fraction = 0.7;
  std::vector<std::size_t> train_rows;  // row indices into the parent
  std::vector<std::size_t> test_rows;
};

/// Column holding the class label: an index, a header name, or the last column.
struct LabelColumn {
  std::variant<std::monostate, std::size_t, std::string> which;

  static LabelColumn last() { return {}; }
  static LabelColumn index(std::size_t i) { return {i}; }
  static LabelColumn named(std::string n) { return {std::move(n)}; }
};

/// Reads a delimited file of numeric features plus one label column.
/// The delimiter is whichever of ',', ';', '\t' occurs most often on the
/// first line; ties resolve in that order.
Dataset load_csv(const std::filesystem::path& path, LabelColumn label = LabelColumn::last(),
                 bool has_header = true);

/// Comma-separated, header "f0,...,f{F-1},label", values printed with 17
/// significant digits so load_csv reproduces them exactly.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// Expected (features, instances, classes), e.g. Colon = 2000, 62, 2.
struct ExpectedShape {
  std::size_t features = 0;
  std::size_t instances = 0;
  std::size_t classes = 0;
};

/// Parses "F,N,C". Throws ArgumentError on malformed text.
ExpectedShape parse_expected_shape(const std::string& text);
/// Empty when the dataset matches, otherwise a description of every mismatch.
std::optional<std::string> shape_mismatch(const Dataset& ds, const ExpectedShape& expected);

/// Stratified split. Each class contributes floor(fraction * count) rows to
/// train; the rows still needed to reach round(fraction * N) overall are
/// handed to the classes with the largest fractional remainders (ties to the
/// lower class index). Rows are chosen by a seeded shuffle within each class
/// and kept in their original order.
SplitDataset split(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// Gaussian blobs with unit within-class spread. Class means are drawn
/// uniformly and rescaled about their centroid so the closest pair sits
/// exactly `separation` apart. Sample i belongs to class i mod n_classes.
Dataset make_synthetic(std::size_t n_samples, std::size_t n_features, std::size_t n_classes,
                       double separation, std::uint64_t seed);

}  // namespace gwosae
