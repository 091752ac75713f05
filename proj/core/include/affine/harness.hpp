#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affine/algebra.hpp"
#include "affine/numeric.hpp"

namespace affine {

/// Every pass/fail threshold used by the experiments and the acceptance suite.
struct Thresholds {
  double sigma = 3.0;                       // moment deltas, in combined standard errors
  double ks_alpha = 0.01;                   // two-sample KS level for chain vs diffusion
  double ks_walk = 0.02;                    // one-sample KS bound for the walk
  double calibration_pass_fraction = 0.95;  // seeded self-agreement required
  double max_row_defect = 1e-4;             // truncated kernel mass tolerated per row
  double max_abort_fraction = 0.01;         // conditioned paths abandoned at the minimal step
  double max_law_tail = 1e-10;              // omitted increment mass

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct ExperimentConfig {
  std::string experiment = "chain";  // "walk" or "chain"
  std::string algebra = "A1~";
  long spec_n = 100;
  std::vector<double> times{0.5, 1.0};
  long samples = 5000;
  std::uint64_t seed = 1;
  long depth = 20;
  // chain start x = k Lambda0 + finite (root coordinates); ignored by the walk
  Rational start_level = 2;
  RationalVector start_finite{Rational(1, 2)};
  double dt = 1e-3;
  long calibration_runs = 20;
  double calibration_dt = 1e-2;
  long calibration_samples = 0;  // 0: same as samples
  long threads = 0;              // 0: hardware concurrency; AFFINE_THREADS overrides
  std::string output_json;
  std::string output_csv;
  Thresholds thresholds;

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string config_to_json(const ExperimentConfig& cfg);
/// Throws DomainError on malformed input or failed validation.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);
/// Git blob hash (SHA-1 of "blob <size>\0" + compact key-sorted JSON) of the config,
/// taken with the output paths and thread count cleared.
std::string config_hash(const ExperimentConfig& cfg);

/// Defaults used by the acceptance suite.
ExperimentConfig default_walk_config();
ExperimentConfig default_chain_config();

struct MarginalRow {
  double time = 0;
  std::size_t coordinate = 0;
  double ks = 0, ks_threshold = 0;
  double mean_a = 0, mean_b = 0, mean_delta = 0, mean_se = 0;
  bool pass = true;
};

struct CovarianceRow {
  double time = 0;
  std::size_t i = 0, j = 0;
  double cov_a = 0, cov_b = 0, delta = 0, se = 0;
  bool pass = true;
};

struct CalibrationSummary {
  bool performed = false;
  long runs = 0, passed = 0;
  double fraction = 0;
  bool pass = true;
};

struct ComparisonReport {
  std::string experiment, algebra, config_hash;
  std::string note;
  long spec_n = 0;
  long samples_a = 0, samples_b = 0;
  std::vector<MarginalRow> marginals;
  std::vector<CovarianceRow> covariances;
  CalibrationSummary calibration;
  std::map<std::string, double> diagnostics;
  bool pass = false;

  /// Largest mean or covariance delta measured in standard errors.
  double worst_sigma() const;
};

std::string report_to_json(const ComparisonReport& r);
std::string report_to_csv(const ComparisonReport& r);
/// Writes the JSON and CSV outputs named in the config, when set.
void write_outputs(const ExperimentConfig& cfg, const ComparisonReport& r);

/// Samples indexed [time][sample] -> coordinates in the orthonormal basis.
using MarginalSamples = std::vector<std::vector<RealVector>>;

/// Two-sample comparison at each time: per-coordinate KS against ks_critical(alpha),
/// mean and covariance deltas against sigma combined standard errors.
ComparisonReport compare_marginals(const std::vector<double>& times, const MarginalSamples& a,
                                   const MarginalSamples& b, const Thresholds& th);

/// (1/n) barbar of the weight walk at n t steps against Gaussian(t rho, t Id).
ComparisonReport scaling_walk_experiment(const ExperimentConfig& cfg);
/// Barred chain from round(n x) against the conditioned diffusion from x, plus the
/// diffusion-vs-diffusion calibration. Throws DomainError when x is not interior.
ComparisonReport scaling_chain_experiment(const ExperimentConfig& cfg);

/// round(n x) to a dominant integral weight: coroot pairings rounded, negatives clamped.
Weight round_to_dominant(const AffineAlgebra& alg, const Weight& x, long n);

/// Chain marginals at the given times, (1/n)-scaled, orthonormal basis.
MarginalSamples chain_marginals(const AffineAlgebra& alg, const Weight& start, long n, const std::vector<double>& times,
                                long samples, std::uint64_t seed, double max_defect, long threads,
                                double* worst_defect = nullptr);
/// Conditioned diffusion marginals from x by Euler with step dt; aborted paths are dropped.
MarginalSamples diffusion_marginals(const AffineAlgebra& alg, const Weight& x, const std::vector<double>& times,
                                    long samples, double dt, std::uint64_t seed, long threads,
                                    long* aborted = nullptr);

/// AFFINE_THREADS when set, else requested, else hardware concurrency; at least 1.
long resolve_threads(long requested);
/// Seed for sub-stream `tag` of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace affine
