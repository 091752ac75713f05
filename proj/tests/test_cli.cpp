#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "affine/harness.hpp"
#include "cli.hpp"

using affine::run_cli;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit 2 with usage text") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {}, {"bogus"}, {"mult", "--frobnicate"}, {"chain", "--start", "1,0"}, {"mult", "--depth", "-1"}}) {
    const Run r = cli(args);
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"mult", "--help"}).out.find("--highest") != std::string::npos);
}

TEST_CASE("library errors exit 1") {
  CHECK(cli({"mult", "--highest", "1,0,0"}).code == 1);
  CHECK(cli({"mult", "--algebra", "Q7", "--highest", "1,0"}).code == 1);
  CHECK(cli({"mult", "--highest", "-1,0"}).code == 1);
}

TEST_CASE("multiplicities match the golden table") {
  const Run r = cli({"mult", "--highest", "1,0", "--depth", "10"});
  CHECK(r.code == 0);
  CHECK(r.out == read_file(AFFINE_GOLDEN_DIR "/a1_L0_depth10.csv"));
  CHECK(cli({"mult", "--highest", "1,0", "--depth", "10", "--method", "series"}).out == r.out);
}

TEST_CASE("algebra, tensor and characters") {
  const Run a = cli({"algebra", "--algebra", "A2~"});
  CHECK(a.code == 0);
  CHECK(a.out.find("\"dual_coxeter\": 3") != std::string::npos);
  const Run t = cli({"tensor", "--lambda", "1,0", "--omega", "2,0", "--n", "1", "--beta", "3,0"});
  CHECK(t.code == 0);
  CHECK(t.out == "1\n");
  CHECK(cli({"characters", "--highest", "1,0", "--spec-n", "2"}).code == 0);
}

TEST_CASE("seeded commands are reproducible") {
  const std::vector<std::string> chain{"chain", "--start", "1,2", "--steps", "20", "--seed", "4"};
  const Run a = cli(chain), b = cli(chain);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const std::vector<std::string> diff{"diffusion", "--start", "1,1", "--t-max", "0.2", "--dt", "0.01",
                                      "--paths", "3", "--seed", "4", "--conditioned"};
  CHECK(cli(diff).out == cli(diff).out);
}

TEST_CASE("experiment reports are byte-identical for the same config and seed") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "affine_cli_test";
  fs::create_directories(dir);
  affine::ExperimentConfig c = affine::default_chain_config();
  c.spec_n = 10;
  c.samples = 200;
  c.times = {0.5};
  c.dt = 1e-2;
  c.calibration_runs = 0;
  const std::string cfg = (dir / "cfg.json").string();
  affine::save_config(c, cfg);
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const std::string js = (dir / ("r" + std::to_string(i) + ".json")).string();
    const Run r = cli({"experiment", "--config", cfg, "--seed", "12", "--out-json", js});
    CHECK(r.code <= 1);
    reports[i] = read_file(js);
  }
  CHECK_FALSE(reports[0].empty());
  CHECK(reports[0] == reports[1]);
  CHECK(cli({"experiment", "--config", cfg}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("verify-all on the fast path") {
  const Run r = cli({"verify-all", "--algebra", "A1~", "--fast"});
  CHECK(r.code == 0);
  long lines = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);)
    if (line.rfind("PASS", 0) == 0) ++lines;
  CHECK(lines == 11);
  CHECK(cli({"verify-all", "--only", "1,2"}).code == 0);
}
