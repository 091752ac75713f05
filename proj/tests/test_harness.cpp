#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "affine/error.hpp"
#include "affine/harness.hpp"

using namespace affine;

namespace {

ExperimentConfig small_chain() {
  ExperimentConfig c = default_chain_config();
  c.spec_n = 10;
  c.samples = 300;
  c.times = {0.0, 0.5};
  c.dt = 1e-2;
  c.calibration_runs = 0;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round trip and golden defaults") {
  for (const ExperimentConfig& c : {default_walk_config(), default_chain_config(), small_chain()})
    CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(load_config(AFFINE_GOLDEN_DIR "/walk_default.json") == default_walk_config());
  CHECK(load_config(AFFINE_GOLDEN_DIR "/chain_default.json") == default_chain_config());
}

TEST_CASE("config hash is the git blob hash of the canonical JSON") {
  CHECK(config_hash(default_walk_config()) == "1455ba7362bd31d41f4cdc47ef0bea7cc621d557");
  CHECK(config_hash(default_chain_config()) == "acbf24ecbab7abcff110404e428efa5ce087e311");
  ExperimentConfig c = default_chain_config();
  c.seed += 1;
  CHECK(config_hash(c) != config_hash(default_chain_config()));
  ExperimentConfig d = default_chain_config();
  d.output_json = "/tmp/x.json";
  d.threads = 3;
  CHECK(config_hash(d) == config_hash(default_chain_config()));
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(config_from_json("{not json"), DomainError);
  CHECK_THROWS_AS(config_from_json(R"({"experiment": "bogus"})"), DomainError);
  CHECK_THROWS_AS(config_from_json(R"({"times": []})"), DomainError);
  CHECK_THROWS_AS(config_from_json(R"({"thresholds": {"ks_alpha": 0.2}})"), DomainError);
  CHECK_THROWS_AS(config_from_json(R"({"spec_n": 0})"), DomainError);
}

TEST_CASE("identical marginals give zero deltas") {
  MarginalSamples a(1);
  for (int i = 0; i < 200; ++i) a[0].push_back({0.01 * i, std::sin(i)});
  const ComparisonReport r = compare_marginals({1.0}, a, a, Thresholds{});
  CHECK(r.pass);
  for (const auto& m : r.marginals) {
    CHECK(m.ks == 0.0);
    CHECK(m.mean_delta == 0.0);
  }
  for (const auto& c : r.covariances) CHECK(c.delta == 0.0);
  CHECK(r.worst_sigma() == 0.0);
}

TEST_CASE("shifted marginals fail") {
  MarginalSamples a(1), b(1);
  for (int i = 0; i < 500; ++i) {
    a[0].push_back({std::sin(1.3 * i)});
    b[0].push_back({std::sin(1.3 * i) + 0.5});
  }
  CHECK_FALSE(compare_marginals({1.0}, a, b, Thresholds{}).pass);
}

TEST_CASE("chain start on the wall is rejected") {
  ExperimentConfig c = small_chain();
  c.start_finite = {0};
  CHECK_THROWS_AS(scaling_chain_experiment(c), DomainError);
  c.start_finite = {1};
  CHECK_THROWS_AS(scaling_chain_experiment(c), DomainError);
  c.start_finite = {2};
  CHECK_THROWS_AS(scaling_chain_experiment(c), DomainError);
}

TEST_CASE("time zero marginals are point masses") {
  const ComparisonReport r = scaling_chain_experiment(small_chain());
  bool saw_zero = false;
  for (const auto& m : r.marginals)
    if (m.time == 0.0) {
      saw_zero = true;
      CHECK(m.ks == 0.0);
      CHECK(std::abs(m.mean_delta) < 1e-12);
      CHECK(m.pass);
    }
  for (const auto& c : r.covariances)
    if (c.time == 0.0) CHECK(std::abs(c.delta) < 1e-12);
  CHECK(saw_zero);
}

TEST_CASE("rounding to dominant weights") {
  const AlgebraPtr alg = make_algebra("A1~");
  const Weight x(2, {Rational(1, 2)}, 0);
  const Weight r = round_to_dominant(*alg, x, 100);
  CHECK(r.k == 200);
  CHECK(alg->pairings(r) == RationalVector{100, 100});
  const Weight odd = round_to_dominant(*alg, Weight(2, {Rational(1, 3)}, 0), 10);
  CHECK(alg->is_dominant_integral(odd));
  CHECK(odd.k == 20);
}

TEST_CASE("walk report at n = 1 is produced") {
  ExperimentConfig c = default_walk_config();
  c.spec_n = 1;
  c.samples = 500;
  const ComparisonReport r = scaling_walk_experiment(c);
  CHECK(r.marginals.size() == 1);
  CHECK(r.samples_a == 500);
  CHECK(r.config_hash == config_hash(c));
}

TEST_CASE("standard errors shrink like the square root of the sample count") {
  ExperimentConfig c = default_walk_config();
  c.samples = 4000;
  const double se1 = scaling_walk_experiment(c).marginals.at(0).mean_se;
  c.samples = 8000;
  const double se2 = scaling_walk_experiment(c).marginals.at(0).mean_se;
  CHECK(se1 / se2 == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("reports are reproducible and written to disk") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "affine_harness_test";
  fs::create_directories(dir);
  ExperimentConfig c = small_chain();
  c.output_json = (dir / "a.json").string();
  c.output_csv = (dir / "a.csv").string();
  const ComparisonReport r1 = scaling_chain_experiment(c);
  write_outputs(c, r1);
  const ComparisonReport r2 = scaling_chain_experiment(c);
  CHECK(report_to_json(r1) == report_to_json(r2));
  CHECK(report_to_csv(r1) == report_to_csv(r2));
  CHECK(read_file(c.output_json) == report_to_json(r1));
  CHECK(read_file(c.output_csv) == report_to_csv(r1));
  const auto j = nlohmann::json::parse(read_file(c.output_json));
  CHECK(j.at("config_hash").get<std::string>() == config_hash(c));
  c.threads = 1;
  CHECK(report_to_csv(scaling_chain_experiment(c)) == report_to_csv(r1));
  fs::remove_all(dir);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(resolve_threads(3) >= 1);
}
