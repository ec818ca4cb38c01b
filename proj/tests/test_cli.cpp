#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

const fs::path& work() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("gwosae_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run cli(const std::string& args) {
  const fs::path out = work() / "stdout.txt", err = work() / "stderr.txt";
  const std::string cmd = "cd '" + work().string() + "' && '" GWOSAE_CLI_PATH "' " + args +
                          " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const std::string kSmall =
    "--synth 30x8x2 --dims 8,5,3,2 --population 6 --iterations 6 --seed 7";

}  // namespace

TEST_CASE("train writes a model and prints accuracy") {
  const auto r = cli("train " + kSmall + " --out tr");
  REQUIRE(r.status == 0);
  CHECK(fs::exists(work() / "tr" / "model.json"));
  CHECK(fs::exists(work() / "tr" / "curves" / "train_ae1.csv"));
  const auto pos = r.out.find("test_accuracy_pct ");
  REQUIRE(pos != std::string::npos);
  const double pct = std::stod(r.out.substr(pos + 18));
  CHECK(pct >= 0.0);
  CHECK(pct <= 100.0);
}

TEST_CASE("train usage errors") {
  auto r = cli("train --synth 30x8x2");
  CHECK(r.status == 2);
  CHECK(r.err.find("--dims") != std::string::npos);
  r = cli("train --synth 30x8x2 --dims 200,50");
  CHECK(r.status == 2);
  CHECK(r.err.find("4 elements") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  CHECK(cli("train " + kSmall + " --population 3").status == 2);
  CHECK(cli("train " + kSmall + " --iterations 0").status == 2);
  CHECK(cli("train " + kSmall + " --rho 1.5").status == 2);
  CHECK(cli("train " + kSmall + " --box 5,-5").status == 2);
  CHECK(cli("train " + kSmall + " --train-fraction 1").status == 2);
  CHECK(cli("train " + kSmall + " --opt nonsense.key=1").status == 2);
  CHECK(cli("train " + kSmall + " --no-such-flag").status == 2);
  CHECK(cli("train --data missing.csv --dims 8,5,3,2").status == 1);
  CHECK(cli("").status == 2);
}

TEST_CASE("artifacts are byte-identical for a fixed seed") {
  REQUIRE(cli("train " + kSmall + " --out same_a").status == 0);
  REQUIRE(cli("train " + kSmall + " --out same_b").status == 0);
  CHECK(slurp(work() / "same_a/model.json") == slurp(work() / "same_b/model.json"));
  for (const char* stage : {"ae1", "ae2", "softmax"}) {
    const std::string f = std::string("curves/train_") + stage + ".csv";
    CHECK(slurp(work() / "same_a" / f) == slurp(work() / "same_b" / f));
  }
}

TEST_CASE("evaluate scores a model and writes a confusion matrix") {
  REQUIRE(cli("train " + kSmall + " --out ev").status == 0);
  REQUIRE(cli("synth --synth 30x8x2 --out ev/data.csv").status == 0);
  const auto r = cli("evaluate --model ev/model.json --data ev/data.csv --confusion ev/cm.csv");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("accuracy_pct ") != std::string::npos);
  std::ifstream cm(work() / "ev/cm.csv");
  std::string line;
  std::getline(cm, line);
  double total = 0;
  while (std::getline(cm, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) total += std::stod(cell);
  }
  CHECK(total == 30);

  const auto mismatch = cli("evaluate --model ev/model.json --synth 30x9x2");
  CHECK(mismatch.status != 0);
  CHECK(mismatch.err.find("8") != std::string::npos);
  CHECK(mismatch.err.find("9") != std::string::npos);

  std::ofstream(work() / "ev/broken.json") << "{\"format\": \"gwosae-model\"";
  const auto broken = cli("evaluate --model ev/broken.json --synth 30x8x2");
  CHECK(broken.status == 1);
  CHECK(broken.err.rfind("error: ", 0) == 0);
}

TEST_CASE("compare emits report, result and curves") {
  const auto r = cli("compare " + kSmall + " --algos gwo,pso --repeats 2 --out cmp");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(slurp(work() / "cmp/report.json"));
  REQUIRE(j["algorithms"].size() == 2);
  for (const auto& a : j["algorithms"]) CHECK(a["accuracies"].size() == 2);
  CHECK(fs::exists(work() / "cmp/report.txt"));
  CHECK(fs::exists(work() / "cmp/result.json"));
  CHECK(fs::exists(work() / "cmp/curves/pso_r1_softmax.csv"));

  CHECK(cli("compare " + kSmall + " --algos gwo --repeats 1 --out cmp1").status == 0);
  const auto bad = cli("compare " + kSmall + " --algos xyz");
  CHECK(bad.status == 2);
  CHECK(bad.err.find("gwo, pso, ga, abc") != std::string::npos);
  CHECK(cli("compare " + kSmall + " --repeats 0").status == 2);

  REQUIRE(cli("curves --result cmp/result.json --out recurves").status == 0);
  CHECK(slurp(work() / "recurves/gwo_r0_ae1.csv") == slurp(work() / "cmp/curves/gwo_r0_ae1.csv"));
  CHECK(slurp(work() / "recurves/curves_long.csv") ==
        slurp(work() / "cmp/curves/curves_long.csv"));
}

TEST_CASE("config file merges under flags") {
  std::ofstream(work() / "cfg.json")
      << R"({"synth": "30x8x2", "dims": "8,5,3,2", "population": 6, "iterations": 4, "seed": 7})";
  REQUIRE(cli("train --config cfg.json --iterations 3 --out cfgrun").status == 0);
  std::ifstream curve(work() / "cfgrun/curves/train_ae1.csv");
  int lines = 0;
  for (std::string l; std::getline(curve, l);) ++lines;
  CHECK(lines == 1 + 3);
  std::ofstream(work() / "bad_cfg.json") << "[1,2]";
  CHECK(cli("train --config bad_cfg.json").status == 2);
}

TEST_CASE("expect-shape accepts and rejects") {
  REQUIRE(cli("synth --synth 62x2000x2 --separation 1 --out colon.csv").status == 0);
  REQUIRE(cli("synth --synth 62x1999x2 --separation 1 --out not_colon.csv").status == 0);
  const std::string tail = " --dims 2000,4,3,2 --population 4 --iterations 1 --out shp";
  CHECK(cli("train --data colon.csv --expect-shape 2000,62,2" + tail).status == 0);
  const auto r = cli("train --data not_colon.csv --expect-shape 2000,62,2" + tail);
  CHECK(r.status == 2);
  CHECK(r.err.find("expect-shape") != std::string::npos);
}

TEST_CASE("help documents every flag") {
  const std::pair<const char*, const char*> owned[] = {{"train", "--algo"},
                                                        {"evaluate", "--confusion"},
                                                        {"compare", "--repeats"},
                                                        {"synth", "--separation"},
                                                        {"curves", "--result"}};
  for (const auto& [sub, flag] : owned) {
    const auto r = cli(std::string(sub) + " --help");
    CHECK(r.status == 0);
    CHECK(r.out.find(flag) != std::string::npos);
  }
  const auto t = cli("train --help");
  for (const char* flag :
       {"--data", "--synth", "--separation", "--data-seed", "--label-column", "--no-header",
        "--expect-shape", "--dims", "--population", "--iterations", "--rho", "--lambda-bounds",
        "--beta-bounds", "--box", "--softmax-trainer", "--softmax-lr", "--opt",
        "--train-fraction", "--seed", "--threads", "--serial", "--algo", "--model", "--config"}) {
    CHECK_MESSAGE(t.out.find(flag) != std::string::npos, flag);
  }
}
