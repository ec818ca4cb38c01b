#include "gwosae/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gwosae/errors.hpp"
#include "gwosae/rng.hpp"

namespace gwosae {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

char detect_delimiter(const std::string& line) {
  char best = ',';
  std::ptrdiff_t best_count = -1;
  for (char d : {',', ';', '\t'}) {
    const auto c = std::count(line.begin(), line.end(), d);
    if (c > best_count) {
      best = d;
      best_count = c;
    }
  }
  return best;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delim)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

std::string where(std::size_t line, std::size_t col) {
  return "row " + std::to_string(line) + ", column " + std::to_string(col + 1);
}

double parse_number(const std::string& cell, std::size_t line, std::size_t col) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "?") {
    throw ParseError("missing value at " + where(line, col));
  }
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric feature '" + cell + "' at " + where(line, col));
  }
  if (!std::isfinite(v)) throw ParseError("non-finite feature at " + where(line, col));
  return v;
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(label_map.size(), 0);
  for (auto y : labels) ++counts.at(y);
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels[r]);
  out.label_map = label_map;
  out.name = name;
  return out;
}

Dataset load_csv(const std::filesystem::path& path, LabelColumn label, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("'" + path.string() + "' is empty");
  if (has_header && lines.size() < 2) throw ParseError("'" + path.string() + "' has no data rows");

  const char delim = detect_delimiter(lines.front());
  const auto first = split_line(lines.front(), delim);
  const std::size_t ncols = first.size();
  if (ncols < 2) throw ParseError("expected at least one feature column and one label column");

  std::size_t label_col = ncols - 1;
  if (const auto* idx = std::get_if<std::size_t>(&label.which)) {
    if (*idx >= ncols) {
      throw ArgumentError("label column " + std::to_string(*idx) + " out of range (file has " +
                          std::to_string(ncols) + " columns)");
    }
    label_col = *idx;
  } else if (const auto* name = std::get_if<std::string>(&label.which)) {
    if (!has_header) throw ArgumentError("a named label column needs a header row");
    const auto it = std::find(first.begin(), first.end(), *name);
    if (it == first.end()) throw ArgumentError("no column named '" + *name + "'");
    label_col = static_cast<std::size_t>(it - first.begin());
  }

  Dataset ds;
  ds.name = path.stem().string();
  std::map<std::string, std::size_t> index_of;
  std::vector<double> values;
  const std::size_t start = has_header ? 1 : 0;
  for (std::size_t li = start; li < lines.size(); ++li) {
    const auto cells = split_line(lines[li], delim);
    const std::size_t line_no = li + 1;
    if (cells.size() != ncols) {
      throw ParseError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(ncols));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == label_col) continue;
      values.push_back(parse_number(cells[c], line_no, c));
    }
    const std::string& name = cells[label_col];
    if (name.empty()) throw ParseError("missing label at " + where(line_no, label_col));
    auto [it, inserted] = index_of.emplace(name, ds.label_map.size());
    if (inserted) ds.label_map.push_back(name);
    ds.labels.push_back(it->second);
  }
  ds.features = Matrix(ds.labels.size(), ncols - 1, std::move(values));
  return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (std::size_t j = 0; j < ds.feature_count(); ++j) out << 'f' << j << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << ds.label_map.at(ds.labels[i]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ExpectedShape parse_expected_shape(const std::string& text) {
  std::vector<std::size_t> parts;
  std::istringstream is(text);
  for (std::string tok; std::getline(is, tok, ',');) {
    tok = trim(tok);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ArgumentError("expected shape must be F,N,C with positive integers, got '" + text +
                          "'");
    }
    parts.push_back(v);
  }
  if (parts.size() != 3) {
    throw ArgumentError("expected shape must have 3 elements F,N,C, got '" + text + "'");
  }
  return {parts[0], parts[1], parts[2]};
}

std::optional<std::string> shape_mismatch(const Dataset& ds, const ExpectedShape& e) {
  std::string msg;
  auto check = [&](const char* what, std::size_t got, std::size_t want) {
    if (got != want) {
      if (!msg.empty()) msg += "; ";
      msg += std::string(what) + " " + std::to_string(got) + " != expected " + std::to_string(want);
    }
  };
  check("features", ds.feature_count(), e.features);
  check("instances", ds.size(), e.instances);
  check("classes", ds.class_count(), e.classes);
  if (msg.empty()) return std::nullopt;
  return msg;
}

SplitDataset split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n_classes = ds.class_count();
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) by_class.at(ds.labels[i]).push_back(i);

  std::vector<std::size_t> quota(n_classes);
  std::vector<double> remainder(n_classes);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double exact = train_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  const auto target =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ds.size()) + 0.5));
  std::vector<std::size_t> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < target && k < n_classes; ++k) {
    const std::size_t c = order[k];
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  SplitDataset out;
  out.train_fraction = train_fraction;
  Rng rng(seed);
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (quota[c] == 0) {
      throw ArgumentError("stratification leaves class '" + ds.label_map[c] +
                          "' with no training rows (" + std::to_string(rows.size()) +
                          " samples)");
    }
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.below(i)]);
    }
    out.train_rows.insert(out.train_rows.end(), rows.begin(), rows.begin() + quota[c]);
    out.test_rows.insert(out.test_rows.end(), rows.begin() + quota[c], rows.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = ds.subset(out.train_rows);
  out.test = ds.subset(out.test_rows);
  return out;
}

Dataset make_synthetic(std::size_t n_samples, std::size_t n_features, std::size_t n_classes,
                       double separation, std::uint64_t seed) {
  if (n_classes < 1 || n_features < 1) throw ArgumentError("synthetic data needs F, C >= 1");
  if (n_samples < n_classes) throw ArgumentError("synthetic data needs N >= number of classes");
  if (!(separation >= 0.0)) throw ArgumentError("separation must be >= 0");

  Rng rng(seed);
  std::vector<std::vector<double>> means(n_classes);
  for (auto& m : means) m = uniform_in(rng, -1.0, 1.0, n_features);

  std::vector<double> centroid(n_features, 0.0);
  for (const auto& m : means) {
    for (std::size_t j = 0; j < n_features; ++j) centroid[j] += m[j] / static_cast<double>(n_classes);
  }
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n_classes; ++a) {
    for (std::size_t b = a + 1; b < n_classes; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < n_features; ++j) {
        const double d = means[a][j] - means[b][j];
        d2 += d * d;
      }
      closest = std::min(closest, std::sqrt(d2));
    }
  }
  const double scale = (n_classes > 1 && closest > 0.0) ? separation / closest : 0.0;
  for (auto& m : means) {
    for (std::size_t j = 0; j < n_features; ++j) m[j] = (m[j] - centroid[j]) * scale;
  }

  Dataset ds;
  ds.name = "synthetic";
  for (std::size_t c = 0; c < n_classes; ++c) ds.label_map.push_back("class" + std::to_string(c));
  ds.features = Matrix(n_samples, n_features);
  ds.labels.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::size_t c = i % n_classes;
    ds.labels[i] = c;
    auto row = ds.features.row(i);
    for (std::size_t j = 0; j < n_features; ++j) row[j] = means[c][j] + rng.normal();
  }
  return ds;
}

}  // namespace gwosae
