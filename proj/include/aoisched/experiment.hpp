#pragma once

// Policy x horizon x seed sweeps and their on-disk artifacts.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoisched/engine.hpp"
#include "aoisched/metrics.hpp"

namespace aoisched {

/// Invalid experiment configuration. The message starts with the field name.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    int num_sensors = 16;
    std::vector<int> horizons{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    std::vector<std::uint64_t> seeds = seed_range(200);
    double p_on = 0.8;
    IntRange setup_range{1, 25};
    IntRange window_range{1, 20};
    IntRange reset_range{1, 10};
    int d_max = 20;
    double alpha = 1.0;
    double k_const = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    std::vector<PolicyId> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
    std::string output_dir = "aoi_out";
    bool emit_traces = true;
    bool emit_plots = true;
    double slot_duration_ms = 10.0;  // recorded in the outputs, never used in computation

    EngineConfig engine(int horizon) const;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    static std::vector<std::uint64_t> seed_range(int n);
};

/// Missing keys keep their defaults; unknown keys are rejected. "seeds" is
/// either a list of seeds or a count n meaning 1..n. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Throws ConfigError on a missing file, malformed JSON or an invalid field.
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

struct RunRecord {
    std::uint64_t seed = 0;
    RunSummary summary;
};

struct CellResult {
    PolicyId policy = PolicyId::HLFD;
    int horizon = 0;
    std::vector<RunRecord> runs;  // in seed order
    AggregateStats stats;
};

struct ExperimentResult {
    std::vector<CellResult> cells;  // policies in config order, then horizons in config order
    std::vector<std::filesystem::path> files;  // everything written, in creation order

    const CellResult& cell(PolicyId policy, int horizon) const;
};

/// Runs the full matrix on up to `jobs` threads (0 picks AOI_SCHED_JOBS, then
/// the hardware concurrency). Only summaries are kept in memory. With
/// `write_outputs` false nothing touches the disk. On failure every file this
/// call created is removed before the exception propagates.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 0, bool write_outputs = true);

/// Rows (policy, horizon), columns n then <field>_mean / <field>_std.
std::string comparison_csv(const ExperimentResult& result);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

std::string trace_file_name(PolicyId policy, int horizon, std::uint64_t seed);

int resolve_jobs(int requested);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace aoisched
