#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "gwosae/errors.hpp"
#include "gwosae/experiments.hpp"

using namespace gwosae;
namespace fs = std::filesystem;

namespace {

ExperimentPlan small_plan(std::vector<Algorithm> algos, std::size_t repeats) {
  ExperimentPlan plan;
  plan.dataset = make_synthetic(30, 8, 2, 5.0, 1);
  plan.pipeline.layer_dims = {8, 5, 3, 2};
  plan.pipeline.optimizer.population_size = 6;
  plan.pipeline.optimizer.max_iterations = 8;
  plan.algorithms = std::move(algos);
  plan.repeats = repeats;
  plan.base_seed = 99;
  return plan;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("percent formatting") {
  CHECK(format_percent(0.9902) == "99.02");
  CHECK(format_percent(1.0) == "100.00");
  CHECK(format_percent(0.0) == "0.00");
  CHECK(format_percent(0.92285) == "92.29");
  CHECK(percent2(0.9902) == doctest::Approx(99.02));
}

TEST_CASE("mean and sample deviation") {
  double m = 0, s = 0;
  mean_std(std::vector<double>{0.5}, m, s);
  CHECK(m == 0.5);
  CHECK(s == 0.0);
  mean_std(std::vector<double>{0.8, 0.8, 0.8}, m, s);
  CHECK(s == 0.0);
  CHECK(format_percent(s) == "0.00");
  mean_std(std::vector<double>{1, 2, 3, 4}, m, s);
  CHECK(m == 2.5);
  CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)));
}

TEST_CASE("run_experiment shape and aggregates") {
  const auto result = run_experiment(small_plan({Algorithm::gwo, Algorithm::pso}, 3));
  REQUIRE(result.algorithms.size() == 2);
  CHECK(result.repeats == 3);
  for (const auto& ar : result.algorithms) {
    REQUIRE(ar.runs.size() == 3);
    std::vector<double> acc;
    for (const auto& r : ar.runs) acc.push_back(r.test_accuracy);
    double m = 0, s = 0;
    mean_std(acc, m, s);
    CHECK(std::abs(m - ar.mean_accuracy) <= 1e-9);
    CHECK(ar.mean_accuracy >= *std::min_element(acc.begin(), acc.end()));
    CHECK(ar.mean_accuracy <= *std::max_element(acc.begin(), acc.end()));
    for (const auto& r : ar.runs) {
      CHECK(r.report.ae1_trace.best_fitness_per_iteration.size() == 8);
    }
  }
  CHECK(result.algorithms[0].algorithm == Algorithm::gwo);
  CHECK(result.algorithms[1].algorithm == Algorithm::pso);
}

TEST_CASE("single repeat mean equals the run") {
  const auto result = run_experiment(small_plan({Algorithm::ga}, 1));
  CHECK(result.algorithms[0].mean_accuracy == result.algorithms[0].runs[0].test_accuracy);
  CHECK(result.algorithms[0].std_accuracy == 0.0);
}

TEST_CASE("run_experiment is deterministic apart from wall time") {
  const auto plan = small_plan({Algorithm::gwo, Algorithm::abc}, 2);
  const auto a = run_experiment(plan), b = run_experiment(plan);
  for (std::size_t i = 0; i < a.algorithms.size(); ++i) {
    for (std::size_t r = 0; r < 2; ++r) {
      const auto& ra = a.algorithms[i].runs[r];
      const auto& rb = b.algorithms[i].runs[r];
      CHECK(ra.test_accuracy == rb.test_accuracy);
      CHECK(ra.report.ae1_trace.best_fitness_per_iteration ==
            rb.report.ae1_trace.best_fitness_per_iteration);
      CHECK(ra.report.softmax_trace.best_fitness_per_iteration ==
            rb.report.softmax_trace.best_fitness_per_iteration);
    }
  }
  CHECK(repeat_seed(99, 0) != repeat_seed(99, 1));
}

TEST_CASE("plan validation") {
  auto plan = small_plan({}, 1);
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan = small_plan({Algorithm::gwo}, 0);
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan = small_plan({Algorithm::gwo}, 1);
  plan.pipeline.layer_dims = {9, 5, 3, 2};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
}

TEST_CASE("curve emission") {
  const auto result = run_experiment(small_plan({Algorithm::gwo, Algorithm::ga}, 2));
  const fs::path dir = fs::temp_directory_path() / "gwosae_exp_curves";
  fs::remove_all(dir);
  const auto files = emit_curves(result, dir);
  CHECK(files.size() == 2 * 2 * 3 + 1);
  CHECK(files.back().filename() == "curves_long.csv");
  for (std::size_t i = 0; i + 1 < files.size(); ++i) {
    const auto lines = lines_of(files[i]);
    REQUIRE(lines.size() == 9);
    CHECK(lines[0] == "iteration,best_cost");
    double prev = INFINITY;
    for (std::size_t l = 1; l < lines.size(); ++l) {
      const auto comma = lines[l].find(',');
      CHECK(std::stoul(lines[l].substr(0, comma)) == l);
      const double v = std::stod(lines[l].substr(comma + 1));
      CHECK(v <= prev);
      prev = v;
    }
  }
  CHECK(fs::exists(dir / "gwo_r1_ae2.csv"));
  const auto long_lines = lines_of(dir / "curves_long.csv");
  CHECK(long_lines[0] == "algorithm,repeat,stage,iteration,best_cost");
  CHECK(long_lines.size() == 1 + 2 * 2 * 3 * 8);

  const std::string before = slurp(dir / "ga_r0_ae1.csv");
  emit_curves(result, dir);
  CHECK(slurp(dir / "ga_r0_ae1.csv") == before);
  fs::remove_all(dir);
}

TEST_CASE("report emission") {
  auto result = run_experiment(small_plan({Algorithm::gwo}, 2));
  result.algorithms[0].mean_accuracy = 0.9902;
  const fs::path dir = fs::temp_directory_path() / "gwosae_exp_report";
  fs::remove_all(dir);
  emit_report(result, dir / "report.json");
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(j["algorithms"].size() == 1);
  CHECK(j["algorithms"][0]["mean_accuracy_pct"].get<double>() == doctest::Approx(99.02));
  CHECK(j["algorithms"][0]["accuracies"].size() == 2);
  CHECK(j["algorithms"][0]["wall_time"].contains("mean_seconds"));
  CHECK(j["best_by_mean_accuracy"] == "gwo");
  const std::string table = slurp(dir / "report.txt");
  CHECK(table.find("99.02") != std::string::npos);
  // One header line, one column line, one data row.
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  fs::remove_all(dir);
}

TEST_CASE("result json round-trip reproduces curves") {
  const auto result = run_experiment(small_plan({Algorithm::pso}, 1));
  const auto back = result_from_json(nlohmann::json::parse(result_to_json(result).dump()));
  CHECK(back.algorithms.size() == 1);
  CHECK(back.algorithms[0].runs[0].test_accuracy == result.algorithms[0].runs[0].test_accuracy);
  CHECK(back.algorithms[0].runs[0].report.ae2_trace.best_fitness_per_iteration ==
        result.algorithms[0].runs[0].report.ae2_trace.best_fitness_per_iteration);
  CHECK_THROWS_AS(result_from_json(nlohmann::json{{"format", "x"}}), ParseError);
}

#include "schema_check.hpp"

TEST_CASE("report matches its schema") {
  const auto schema = nlohmann::json::parse(slurp(GWOSAE_SCHEMA_PATH));
  const auto result = run_experiment(small_plan({Algorithm::gwo, Algorithm::abc}, 2));
  auto j = report_json(result);
  CHECK(schema_check::validate(schema, j).empty());
  // The checker does reject broken reports.
  j["algorithms"][0].erase("wall_time");
  j["schema_version"] = 2;
  CHECK(schema_check::validate(schema, j).size() == 2);
  CHECK_FALSE(schema_check::validate(schema, nlohmann::json::array()).empty());
}
