#pragma once

// Batch experiment runner: seeded instance/noise generation, solver
// dispatch, recovery metrics, and table-style aggregation with CSV/JSON
// emission. Trials are embarrassingly parallel with per-trial Philox
// streams; aggregation is a deterministic ordered reduction.

#include "liftadmm/capreal.hpp"
#include "liftadmm/lifting.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liftadmm {

enum class NoiseModel { kNone, kGaussian, kCauchy, kUniform };

enum class Algorithm { kCapReal, kPCapReal1, kPCapReal2, kPCapRealInf, kZero, kJacobi, kTwisted };

std::string to_string(Algorithm a);
std::string to_string(NoiseModel m);

struct ExperimentConfig {
  Index n = 64;
  Index s = 4;
  std::vector<double> m_ratios = {0.5, 1.0, 1.5, 2.0};
  int trials = 20;
  NoiseModel noise = NoiseModel::kNone;
  double noise_param = 0.0;
  Algorithm algorithm = Algorithm::kCapReal;
  CapRealParams params;
  double success_threshold = 0.01;
  std::uint64_t master_seed = 0;
  /// Measurements are rescaled by s = ||A||_2^q (A /= s, b /= s, bbar /= s^2)
  /// before solving; an equivalent program with better-conditioned operator
  /// norms. 0 disables.
  double precondition_exponent = 0.38;
  bool emit_traces = false;
  std::string output_dir;

  void validate() const;
};

struct TrialResult {
  std::uint64_t seed = 0;
  Index m = 0;
  double ratio = 0.0;
  int trial_index = 0;
  double rel_error = 0.0;
  double snr_db = 0.0;
  bool success = false;
  int iterations = 0;
  double wall_seconds = 0.0;  // solver time only; instance generation excluded
  std::string error;          // nonempty when the solver aborted
};

struct TableRow {
  double ratio = 0.0;
  Index m = 0;
  int trials = 0;
  double success_percent = 0.0;
  double mean_snr_db = 0.0;
  double median_rel_error = 0.0;
  double mean_iterations = 0.0;
  double mean_wall_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<TableRow> rows;
  std::vector<TrialResult> trial_results;  // sorted by (ratio index, trial index)
};

struct GeneratedInstance {
  Matrix A;
  Vector x_o;
  Vector b;
  Vector bbar_noiseless;
};

/// Standard Gaussian A; x_o supported on a uniform random s-subset with
/// U(-1,1) values; b_j = xi_j y_j with xi ~ U(-1,1), y ~ N(0,1);
/// bbar = |A x_o + b|^2. Bit-deterministic per seed (Philox streams).
GeneratedInstance gen_instance(Index n, Index s, Index m, std::uint64_t seed);

/// gaussian: sigma N(0, I); cauchy: gamma tan(pi (u - 1/2)); uniform: U(-d, d).
Vector gen_noise(NoiseModel model, double param, Index m, std::uint64_t seed);

struct Metrics {
  double rel_error = 0.0;
  double snr_db = 0.0;
  bool success = false;
};

/// rel = ||x* - x_o|| / ||x_o||, snr = -20 log10(rel) (capped at 300 dB for
/// exact recovery), success = rel <= threshold. Zero ground truth is an error.
Metrics metrics(const Vector& x_star, const Vector& x_o, double threshold);

/// Per-trial seed derivation, fixed across platforms and worker counts.
std::uint64_t trial_seed(std::uint64_t master, std::size_t ratio_index, int trial_index);

/// Run the configured algorithm over the (ratio x trial) grid. Worker count
/// is capped by LIFTADMM_THREADS. Per-trial solver errors are recorded, not
/// fatal.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV with a header row; JSON as a {schema, config, rows} envelope.
void emit_csv(const ExperimentResult& result, const std::string& path);
void emit_json(const ExperimentResult& result, const ExperimentConfig& config,
               const std::string& path);

/// Reduced-scale reproduction of the paper-style benchmark tables
/// (1: step-size grid, 2: algorithm comparison, 4/5/6: noise SNR tables).
/// Returns one ExperimentResult per configuration label.
std::map<std::string, ExperimentResult> run_bench_table(int table, bool full,
                                                        std::uint64_t master_seed,
                                                        const std::string& output_dir);

int thread_budget();

}  // namespace liftadmm
