#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rsme/config.hpp"

namespace rsme {

/// Output files could not be written. The partial results.csv lacks its end
/// marker.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ResultRow {
    std::size_t sweep_index = 0;
    double sweep_value = 0.0;
    std::string estimator;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double l2_error = 0.0;
    double linf_error = 0.0;
    double success_rate = 0.0;
    std::size_t support_size = 0;
    double wall_time_ms = 0.0;
};

/// results.csv header. Wall times go to timings.csv so that results.csv is a
/// pure function of the config.
inline constexpr const char* kResultsHeader =
    "sweep_axis,sweep_value,estimator,trial,seed,l2_error,linf_error,success_rate,support_size";
inline constexpr const char* kTimingsHeader = "sweep_value,estimator,trial,wall_time_ms";
inline constexpr const char* kTraceHeader = "method,t,coordinate,value,beta";
inline constexpr const char* kBenchHeader = "d,estimator,n,iterations,repeats,wall_time_ms";
inline constexpr const char* kResultsSchema = "rsme-results/1";

/// Seed of trial `trial` at sweep point `sweep_index`.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t sweep_index, std::size_t trial);

/// Contaminated sample matrix of one trial (shared by every estimator).
SampleMatrix trial_samples(const Scenario& scenario, std::uint64_t seed, Backend backend = Backend::Serial);

/// Shortest round-trip decimal form; locale independent.
std::string format_double(double v);

std::string format_result_row(const ExperimentConfig& cfg, const ResultRow& row);

struct RunOptions {
    int threads = 1;
    // Streams receive the CSV as it is produced (canonical order). Either may be null.
    std::ostream* results = nullptr;
    std::ostream* timings = nullptr;
};

/// Runs every (sweep point, trial) on a pool of `threads` workers; all
/// estimators of a trial see the same data. Rows come back sorted by sweep
/// index, estimator (config order) and trial regardless of thread count.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// SubGM (method "ncvx") and convex ("cvx") trajectories on trial 0 of the
/// first sweep point, as rows of kTraceHeader.
void run_trace(const ExperimentConfig& cfg, const IndexSet& coordinates, std::ostream& out);

struct BenchRow {
    std::size_t d = 0;
    std::string estimator;
    std::size_t n = 0;
    std::size_t iterations = 0;
    std::size_t repeats = 0;
    double wall_time_ms = 0.0; // median over repeats
};

/// Times stage_1 and full_filter at each dimension (fixed n and T).
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& d_values, const ExperimentConfig& cfg,
                                std::ostream* out = nullptr);

/// manifest.json content: resolved config, library version, output schema.
std::string manifest_json(const ExperimentConfig& cfg, const std::string& command);

} // namespace rsme
