// aoi_sched: experiment runner, oracle verifier and trace summarizer.
//
// Exit codes: 0 ok, 1 config error, 2 runtime error, 3 the oracle found an
// objective-level dominance violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoisched/experiment.hpp"
#include "aoisched/metrics.hpp"
#include "aoisched/oracle.hpp"
#include "aoisched/trace_io.hpp"

namespace {

using namespace aoisched;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitViolation = 3;

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    if (text.find(',') == std::string::npos) {
        int n = 0;
        try {
            std::size_t used = 0;
            n = std::stoi(text, &used);
            if (used != text.size())
                throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw ConfigError("seeds: expected a count or a comma-separated list");
        }
        if (n < 1)
            throw ConfigError("seeds: count must be at least 1");
        return ExperimentConfig::seed_range(n);
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        try {
            out.push_back(std::stoull(text.substr(start, end - start)));
        } catch (const std::exception&) {
            throw ConfigError("seeds: bad seed '" + text.substr(start, end - start) + "'");
        }
        start = end + 1;
    }
    return out;
}

struct RunArgs {
    std::string config;
    std::vector<std::string> policies;
    std::vector<int> horizons;
    std::string seeds;
    std::string output;
    bool no_traces = false;
    bool no_plots = false;
    int jobs = 0;
};

int cmd_run(const RunArgs& a)
{
    ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
    if (!a.policies.empty()) {
        cfg.policies.clear();
        for (const std::string& p : a.policies) {
            try {
                cfg.policies.push_back(parse_policy(p));
            } catch (const std::invalid_argument&) {
                throw ConfigError("policy: unknown policy '" + p + "'");
            }
        }
    }
    if (!a.horizons.empty())
        cfg.horizons = a.horizons;
    if (!a.seeds.empty())
        cfg.seeds = parse_seeds(a.seeds);
    if (!a.output.empty())
        cfg.output_dir = a.output;
    if (a.no_traces)
        cfg.emit_traces = false;
    if (a.no_plots)
        cfg.emit_plots = false;
    cfg.validate();

    const ExperimentResult result = run_experiment(cfg, a.jobs);
    std::printf("%-6s %6s %5s %12s %10s %12s %10s %8s\n", "policy", "T", "n", "exwsuoi", "mean_age", "mean_latency",
                "rms_jitter", "drops");
    for (const CellResult& c : result.cells)
        std::printf("%-6s %6d %5zu %12.6g %10.4f %12.4f %10.4f %8.2f\n", std::string(to_string(c.policy)).c_str(),
                    c.horizon, c.stats.n, c.stats.field("exwsuoi").mean, c.stats.field("mean_age").mean,
                    c.stats.field("mean_latency").mean, c.stats.field("rms_jitter").mean,
                    c.stats.field("drops").mean);
    std::printf("wrote %zu files under %s\n", result.files.size(), cfg.output_dir.c_str());
    return 0;
}

struct VerifyArgs {
    int instances = 200;
    int max_m = 3;
    int max_t = 7;
    std::vector<double> p_values{0.5, 0.8, 1.0};
    std::uint64_t seed = 1;
    std::string output;
    int jobs = 0;
};

int cmd_verify(const VerifyArgs& a)
{
    const OracleBounds bounds;
    if (a.instances < 1)
        throw ConfigError("instances: must be at least 1");
    if (a.max_m < 1 || a.max_m > bounds.max_sensors)
        throw ConfigError("max-m: must be in [1, " + std::to_string(bounds.max_sensors) + "]");
    if (a.max_t < 1 || a.max_t > bounds.max_horizon)
        throw ConfigError("max-t: must be in [1, " + std::to_string(bounds.max_horizon) + "]");
    for (double p : a.p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("p: channel probabilities must lie in [0, 1]");

    InstanceGenerator gen;
    gen.max_sensors = a.max_m;
    gen.min_sensors = std::min(2, a.max_m);
    gen.max_horizon = a.max_t;
    gen.min_horizon = std::min(4, a.max_t);
    gen.p_values = a.p_values;

    const BatchReport report = verify_batch(a.seed, a.instances, gen, resolve_jobs(a.jobs));
    const std::string text = to_json(report).dump(2) + "\n";
    if (a.output.empty()) {
        std::cout << text;
    } else {
        write_atomic(a.output, text);
        std::fprintf(stderr, "%d instances, %d objective-level violations, %d per-slot violations\n",
                     report.instances, report.violations, report.per_slot_violations);
    }
    return report.violations > 0 ? kExitViolation : 0;
}

int cmd_summarize(const std::string& trace_path, const std::string& config_path)
{
    const ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    std::ifstream in(trace_path);
    if (!in)
        throw std::runtime_error("cannot open trace " + trace_path);
    const Trace trace = trace_from_csv(in, cfg.engine(1));
    std::cout << to_json(summarize(trace)).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Age-of-information scheduling simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Sweep policies x horizons x seeds and write the artifacts");
    run->add_option("--config", run_args.config, "JSON experiment config");
    run->add_option("--policy", run_args.policies, "Policies to run (hlfd, hlf, edf, llf)")->delimiter(',');
    run->add_option("--horizon", run_args.horizons, "Horizons T in slots")->delimiter(',');
    run->add_option("--seeds", run_args.seeds, "Seed count n (seeds 1..n) or a comma-separated list");
    run->add_option("--output", run_args.output, "Output directory");
    run->add_flag("--no-traces", run_args.no_traces, "Skip per-run trace CSVs");
    run->add_flag("--no-plots", run_args.no_plots, "Skip SVG charts");
    run->add_option("--jobs", run_args.jobs, "Worker threads (default: AOI_SCHED_JOBS or all cores)");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Exhaustive HLF-D optimality check on random tiny instances");
    verify->add_option("--instances", verify_args.instances, "Number of random instances")->capture_default_str();
    verify->add_option("--max-m", verify_args.max_m, "Largest number of sensors")->capture_default_str();
    verify->add_option("--max-t", verify_args.max_t, "Largest horizon")->capture_default_str();
    verify->add_option("--p", verify_args.p_values, "Channel ON probabilities")->delimiter(',');
    verify->add_option("--seed", verify_args.seed, "Generator seed")->capture_default_str();
    verify->add_option("--output", verify_args.output, "Write the JSON report here instead of stdout");
    verify->add_option("--jobs", verify_args.jobs, "Worker threads (default: AOI_SCHED_JOBS or all cores)");

    std::string trace_path, summarize_config;
    CLI::App* summ = app.add_subcommand("summarize", "Recompute the run summary of a trace CSV");
    summ->add_option("--trace", trace_path, "Trace CSV")->required();
    summ->add_option("--config", summarize_config, "JSON config supplying k_const and alpha");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run)
            return cmd_run(run_args);
        if (*verify)
            return cmd_verify(verify_args);
        return cmd_summarize(trace_path, summarize_config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
