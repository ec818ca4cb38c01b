#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

#include "doctest.h"

#include "gwosae/data_io.hpp"
#include "gwosae/errors.hpp"
#include "gwosae/rng.hpp"
#include "oracles.hpp"

using namespace gwosae;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gwosae_dio_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

Dataset labelled(const std::vector<std::size_t>& per_class) {
  Dataset ds;
  std::size_t n = 0;
  for (auto c : per_class) n += c;
  ds.features = Matrix(n, 1);
  for (std::size_t k = 0, s = 0; k < per_class.size(); ++k) {
    ds.label_map.push_back("c" + std::to_string(k));
    for (std::size_t i = 0; i < per_class[k]; ++i, ++s) {
      ds.labels.push_back(k);
      ds.features(s, 0) = static_cast<double>(s);
    }
  }
  ds.name = "toy";
  return ds;
}

}  // namespace

TEST_CASE("load_csv maps labels in first-appearance order") {
  TempDir tmp;
  const auto p = tmp.write("a.csv", "x,y,label\n1,2,A\n3,4,B\n5,6,A\n");
  const Dataset ds = load_csv(p);
  CHECK(ds.label_map == std::vector<std::string>{"A", "B"});
  CHECK(ds.labels == Labels{0, 1, 0});
  CHECK(ds.features == Matrix{{1, 2}, {3, 4}, {5, 6}});
  CHECK(ds.name == "a");
}

TEST_CASE("load_csv delimiters, label column and header options") {
  TempDir tmp;
  const auto semi = tmp.write("s.csv", "lab;f1;f2\nB;1.5;2\nA;3;-4e-1\n");
  const Dataset a = load_csv(semi, LabelColumn::named("lab"));
  CHECK(a.label_map == std::vector<std::string>{"B", "A"});
  CHECK(a.features == Matrix{{1.5, 2}, {3, -0.4}});
  CHECK(load_csv(semi, LabelColumn::index(0)) == a);

  const auto tab = tmp.write("t.tsv", "1\t2\tno\n3\t4\tyes\n");
  const Dataset b = load_csv(tab, LabelColumn::last(), false);
  CHECK(b.size() == 2);
  CHECK(b.label_map == std::vector<std::string>{"no", "yes"});

  const auto crlf = tmp.write("w.csv", "a,b,c\r\n1,2,x\r\n\r\n3,4,y\r\n");
  CHECK(load_csv(crlf).size() == 2);

  CHECK_THROWS(load_csv(semi, LabelColumn::named("nope")));
  CHECK_THROWS(load_csv(semi, LabelColumn::index(7)));
}

TEST_CASE("load_csv errors") {
  TempDir tmp;
  try {
    load_csv(tmp.write("bad.csv", "a,b,l\n1,2,x\n1,zz,y\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("zz") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv(tmp.write("na.csv", "a,b,l\n1,NA,x\n")), ParseError);
  CHECK_THROWS_AS(load_csv(tmp.write("gap.csv", "a,b,l\n1,,x\n")), ParseError);
  CHECK_THROWS_AS(load_csv(tmp.write("ragged.csv", "a,b,l\n1,2,x\n1,x\n")), ParseError);
  CHECK_THROWS_AS(load_csv(tmp.write("empty.csv", "")), Error);
  CHECK_THROWS_AS(load_csv(tmp.write("head.csv", "a,b,l\n")), Error);
  CHECK_THROWS_AS(load_csv(tmp.path / "absent.csv"), IoError);
}

TEST_CASE("write_csv and load_csv round-trip") {
  TempDir tmp;
  Dataset ds = make_synthetic(17, 5, 3, 2.0, 9);
  ds.features(0, 0) = 0.1 + 0.2;
  ds.features(1, 1) = -1e-300;
  write_csv(ds, tmp.path / "syn.csv");
  Dataset back = load_csv(tmp.path / "syn.csv");
  back.name = ds.name;
  CHECK(back == ds);
  // Same bytes, same dataset.
  CHECK(load_csv(tmp.path / "syn.csv") == load_csv(tmp.path / "syn.csv"));
}

TEST_CASE("expected shape") {
  const auto shape = parse_expected_shape("2000,62,2");
  CHECK(shape.features == 2000);
  CHECK(shape.instances == 62);
  CHECK(shape.classes == 2);
  CHECK_THROWS_AS(parse_expected_shape("2000,62"), ArgumentError);
  CHECK_THROWS_AS(parse_expected_shape("a,b,c"), ArgumentError);

  const Dataset colon_like = make_synthetic(62, 2000, 2, 1.0, 3);
  CHECK_FALSE(shape_mismatch(colon_like, shape).has_value());
  const auto bad = shape_mismatch(make_synthetic(62, 1999, 2, 1.0, 3), shape);
  REQUIRE(bad.has_value());
  CHECK(bad->find("1999") != std::string::npos);
  CHECK(shape_mismatch(make_synthetic(61, 2000, 2, 1.0, 3), shape).has_value());
  CHECK(shape_mismatch(make_synthetic(62, 2000, 3, 1.0, 3), shape).has_value());
}

TEST_CASE("split arithmetic") {
  const auto hundred = labelled({33, 67});
  const auto s = split(hundred, 0.7, 1);
  CHECK(s.train.size() == 70);
  CHECK(s.test.size() == 30);

  const auto even = split(labelled({50, 50}), 0.7, 2);
  CHECK(even.train.class_counts() == std::vector<std::size_t>{35, 35});
  CHECK(even.test.class_counts() == std::vector<std::size_t>{15, 15});
}

TEST_CASE("split partitions and stratifies") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    std::vector<std::size_t> sizes;
    const std::size_t classes = 2 + rng.below(4);
    for (std::size_t k = 0; k < classes; ++k) sizes.push_back(2 + rng.below(40));
    const auto ds = labelled(sizes);
    const double frac = 0.3 + 0.5 * rng.uniform();
    const auto s = split(ds, frac, seed);
    std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
    all.insert(s.test_rows.begin(), s.test_rows.end());
    CHECK(all.size() == ds.size());
    CHECK(s.train_rows.size() + s.test_rows.size() == ds.size());
    CHECK(std::is_sorted(s.train_rows.begin(), s.train_rows.end()));
    CHECK(s.train.size() == static_cast<std::size_t>(std::llround(frac * ds.size())));
    const auto tc = s.train.class_counts();
    for (std::size_t k = 0; k < classes; ++k) {
      CHECK(std::abs(static_cast<double>(tc[k]) - frac * sizes[k]) <= 1.0);
      CHECK(tc[k] >= 1);
    }
    CHECK(s.train == ds.subset(s.train_rows));
  }
}

TEST_CASE("split seeds") {
  const auto ds = labelled({40, 40});
  CHECK(split(ds, 0.7, 5).train_rows == split(ds, 0.7, 5).train_rows);
  CHECK(split(ds, 0.7, 5).train_rows != split(ds, 0.7, 6).train_rows);
}

TEST_CASE("split errors") {
  CHECK_THROWS_AS(split(labelled({10, 10}), 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(split(labelled({10, 10}), 1.0, 1), ArgumentError);
  // One sample at fraction 0.1 rounds to nothing in train.
  CHECK_THROWS_AS(split(labelled({1, 30}), 0.1, 1), ArgumentError);
}

TEST_CASE("synthetic generator") {
  const Dataset ds = make_synthetic(60, 200, 2, 6.0, 4);
  CHECK(ds.features.rows() == 60);
  CHECK(ds.features.cols() == 200);
  CHECK(ds.class_counts() == std::vector<std::size_t>{30, 30});
  CHECK(ds.label_map == std::vector<std::string>{"class0", "class1"});
  CHECK(ds.name == "synthetic");
  CHECK(oracle::nearest_centroid_accuracy(ds) >= 0.95);
  CHECK(make_synthetic(60, 200, 2, 6.0, 4) == ds);

  const Dataset odd = make_synthetic(10, 3, 3, 1.0, 1);
  const auto cc = odd.class_counts();
  CHECK(*std::max_element(cc.begin(), cc.end()) - *std::min_element(cc.begin(), cc.end()) <= 1);
}

TEST_CASE("synthetic separation zero is indistinguishable") {
  // Resubstitution nearest-centroid is optimistic on tiny samples, so use
  // enough rows that chance level dominates.
  for (std::size_t c : {2u, 3u, 4u}) {
    const Dataset ds = make_synthetic(400, 10, c, 0.0, 12);
    const double acc = oracle::nearest_centroid_accuracy(ds);
    CHECK(std::abs(acc - 1.0 / static_cast<double>(c)) <= 0.15);
  }
}

TEST_CASE("synthetic minimum mean distance equals separation") {
  const Dataset ds = make_synthetic(3000, 6, 4, 5.0, 77);
  std::vector<std::vector<double>> m(4, std::vector<double>(6, 0.0));
  for (std::size_t s = 0; s < ds.size(); ++s) {
    for (std::size_t j = 0; j < 6; ++j) m[ds.labels[s]][j] += ds.features(s, j) / 750.0;
  }
  double closest = INFINITY;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      double d = 0;
      for (std::size_t j = 0; j < 6; ++j) d += std::pow(m[a][j] - m[b][j], 2);
      closest = std::min(closest, std::sqrt(d));
    }
  }
  // Sample means wander by about sqrt(6/750) per class.
  CHECK(closest == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("synthetic argument checks") {
  CHECK_THROWS_AS(make_synthetic(1, 3, 2, 1.0, 0), ArgumentError);
  CHECK_THROWS_AS(make_synthetic(10, 3, 2, -1.0, 0), ArgumentError);
  CHECK_THROWS_AS(make_synthetic(10, 0, 2, 1.0, 0), ArgumentError);
}
