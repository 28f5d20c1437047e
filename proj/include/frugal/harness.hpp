#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "frugal/adversaries.hpp"
#include "frugal/learners.hpp"
#include "frugal/protocol.hpp"

namespace frugal {

// One experiment: `trials` independent seeded games of the chosen
// algorithm against the chosen adversary, with cumulative regret
// recorded at each checkpoint.
struct ExperimentConfig {
    GameConfig game;
    AdversaryConfig adversary;
    Algo algo = Algo::algo3;
    std::size_t trials = 1;
    std::uint64_t master_seed = 1;
    double delta = 0.05;                  // quantile level 1 - delta
    std::vector<std::size_t> checkpoints; // empty = powers of two from 64 to T
    std::string out_prefix;               // empty = no files; else writes .csv and .json
};

struct CheckpointStats {
    std::size_t checkpoint = 0;
    double mean = 0.0;
    double stderr_value = 0.0;
    double quantile = 0.0; // empirical nearest-rank (1 - delta) quantile
    double median = 0.0;   // nearest-rank 0.5 quantile
};

struct ExperimentResult {
    std::vector<std::size_t> checkpoints;
    std::vector<std::vector<double>> per_trial; // [trial][checkpoint position]
    std::vector<CheckpointStats> stats;
    // Least-squares slope of log median regret (floored at 1e-6)
    // against log checkpoint; NaN when fewer than 3 checkpoints.
    double exponent = 0.0;
};

// Powers of two 2^6, 2^7, ... up to T; {T} when 0 < T < 64; empty for T=0.
std::vector<std::size_t> default_checkpoints(std::size_t T);

// Least-squares slope through (x, y) points. Throws
// std::invalid_argument with fewer than 2 points or degenerate x.
double slope_fit(const std::vector<std::pair<double, double>>& points);

inline constexpr double kRegretFloor = 1e-6;

// Pearson statistic and degrees of freedom. Cells with expected count
// N*p < 5 are pooled into one remainder cell; dof = included cells - 1.
std::pair<double, std::size_t> chi_square_gof(const std::vector<std::uint64_t>& counts,
                                              const std::vector<double>& probs);

// Empirical nearest-rank quantile: the ceil(q*n)-th smallest value.
double nearest_rank_quantile(std::vector<double> values, double q);

// Runs all trials (possibly concurrently; trial k is seeded by
// derive_seed(master_seed, "trial", k) regardless of scheduling),
// aggregates, and writes <out_prefix>.csv / <out_prefix>.json when an
// output prefix is set. Output files are opened before any simulation
// so path errors surface immediately. Deterministic in config.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Per-trial CSV: header trial,checkpoint,regret; trial-major rows;
// floats with 17 significant digits; LF endings.
std::string experiment_csv(const ExperimentResult& result);

// Summary JSON: config echo, generator metadata, per-checkpoint
// statistics, fitted exponent (null when undefined).
std::string experiment_json(const ExperimentConfig& config, const ExperimentResult& result);

// Statistical self-checks (estimator unbiasedness, the two-step
// sampler's marginal and joint laws, tree-vs-naive sampling agreement,
// curvature-class machinery). Logs one line per check; returns the
// number of failures.
std::size_t run_validation_suite(std::uint64_t seed, std::ostream& log);

} // namespace frugal
