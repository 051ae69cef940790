#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + ARTEMIS_CLI + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("help and usage errors") {
  artemis::testing::TempDir dir;
  CHECK(run("--help", dir / "log") == 0);
  CHECK(artemis::testing::read_file(dir / "log").find("simulate") != std::string::npos);
  CHECK(run("train --epochs nope", dir / "log") == 1);
  CHECK(run("bogus", dir / "log") == 1);
  CHECK(run("preprocess --output " + dir.path().string(), dir / "log") == 1);
  CHECK(run("run --config " + (dir / "missing.json").string(), dir / "log") == 1);
}

TEST_CASE("data errors exit 2 and name the file") {
  artemis::testing::TempDir dir;
  const auto missing = dir / "absent.csv";
  CHECK(run("preprocess --input " + missing.string() + " --output " + dir.path().string(), dir / "log") == 2);
  CHECK(artemis::testing::read_file(dir / "log").find("absent.csv") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "HeartRate,O2Sat\n80,98\n";
  CHECK(run("train --input " + (dir / "bad.csv").string() + " --output " + dir.path().string(), dir / "log") == 2);
}

TEST_CASE("synthesize, train, evaluate and simulate from the command line") {
  artemis::testing::TempDir dir;
  const std::string out = " --output " + dir.path().string();
  REQUIRE(run("synthesize --count 1500 --seed 3" + out, dir / "log") == 0);
  REQUIRE(run("train --kind tree --input " + (dir / "synthetic.csv").string() + out, dir / "log") == 0);
  CHECK(fs::exists(dir / "model_tree.json"));
  CHECK(fs::exists(dir / "test.csv"));
  REQUIRE(run("evaluate --model " + (dir / "model_tree.json").string() + " --input " +
                  (dir / "test.csv").string() + out,
              dir / "log") == 0);
  CHECK(fs::exists(dir / "metrics_tree.json"));
  const auto scenario = artemis::testing::data_dir() / "scenarios" / "demo_12x3.json";
  CHECK(run("simulate --scenario " + scenario.string() + " --model " + (dir / "model_tree.json").string() + out,
            dir / "log") == 0);
  CHECK(fs::exists(dir / "mission_log.jsonl"));
}
