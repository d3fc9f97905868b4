#include "aoisched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "aoisched/plots.hpp"
#include "aoisched/trace_io.hpp"

namespace aoisched {

namespace fs = std::filesystem;

std::vector<std::uint64_t> ExperimentConfig::seed_range(int n)
{
    std::vector<std::uint64_t> out;
    for (int s = 1; s <= n; ++s)
        out.push_back(static_cast<std::uint64_t>(s));
    return out;
}

EngineConfig ExperimentConfig::engine(int horizon) const
{
    EngineConfig c;
    c.num_sensors = num_sensors;
    c.horizon_T = horizon;
    c.p_on = p_on;
    c.draws.setup_range = setup_range;
    c.draws.window_range = window_range;
    c.draws.reset_range = reset_range;
    c.draws.d_max = d_max;
    c.k_const = k_const;
    c.beta = beta;
    c.gamma = gamma;
    c.alpha = alpha;
    return c;
}

void ExperimentConfig::validate() const
{
    if (horizons.empty())
        throw ConfigError("horizons: need at least one horizon");
    for (int T : horizons)
        if (T < 1)
            throw ConfigError("horizons: every horizon must be at least 1");
    if (std::set<int>(horizons.begin(), horizons.end()).size() != horizons.size())
        throw ConfigError("horizons: duplicate horizon");
    if (seeds.empty())
        throw ConfigError("seeds: need at least one seed");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw ConfigError("seeds: duplicate seed");
    if (policies.empty())
        throw ConfigError("policies: need at least one policy");
    if (std::set<PolicyId>(policies.begin(), policies.end()).size() != policies.size())
        throw ConfigError("policies: duplicate policy");
    if (output_dir.empty())
        throw ConfigError("output_dir: must not be empty");
    if (!(slot_duration_ms > 0.0))
        throw ConfigError("slot_duration_ms: must be positive");
    try {
        engine(horizons.front()).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

template <class T>
T get_field(const nlohmann::json& j, const char* name)
{
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string(name) + ": wrong type");
    }
}

IntRange get_range(const nlohmann::json& j, const char* name)
{
    const auto& v = j.at(name);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ConfigError(std::string(name) + ": expected [lo, hi] integers");
    return {v[0].get<int>(), v[1].get<int>()};
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> known{
        "M",     "horizons", "seeds",  "p_on",     "setup_range", "window_range", "reset_range",  "d_max",
        "alpha", "k_const",  "beta",   "gamma",    "policies",    "output_dir",   "emit_traces",  "emit_plots",
        "slot_duration_ms"};
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw ConfigError(key + ": unknown field");

    ExperimentConfig c;
    if (j.contains("M"))
        c.num_sensors = get_field<int>(j, "M");
    if (j.contains("horizons")) {
        const auto& h = j.at("horizons");
        if (h.is_number_integer())
            c.horizons = {h.get<int>()};
        else
            c.horizons = get_field<std::vector<int>>(j, "horizons");
    }
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        if (s.is_number_integer()) {
            if (s.get<long long>() < 1 || s.get<long long>() > 1000000)
                throw ConfigError("seeds: count must be in [1, 1000000]");
            c.seeds = ExperimentConfig::seed_range(s.get<int>());
        } else {
            c.seeds = get_field<std::vector<std::uint64_t>>(j, "seeds");
        }
    }
    if (j.contains("p_on"))
        c.p_on = get_field<double>(j, "p_on");
    if (j.contains("setup_range"))
        c.setup_range = get_range(j, "setup_range");
    if (j.contains("window_range"))
        c.window_range = get_range(j, "window_range");
    if (j.contains("reset_range"))
        c.reset_range = get_range(j, "reset_range");
    if (j.contains("d_max"))
        c.d_max = get_field<int>(j, "d_max");
    if (j.contains("alpha"))
        c.alpha = get_field<double>(j, "alpha");
    if (j.contains("k_const"))
        c.k_const = get_field<double>(j, "k_const");
    if (j.contains("beta"))
        c.beta = get_field<double>(j, "beta");
    if (j.contains("gamma"))
        c.gamma = get_field<double>(j, "gamma");
    if (j.contains("policies")) {
        c.policies.clear();
        for (const auto& name : get_field<std::vector<std::string>>(j, "policies")) {
            try {
                c.policies.push_back(parse_policy(name));
            } catch (const std::invalid_argument&) {
                throw ConfigError("policies: unknown policy '" + name + "'");
            }
        }
    }
    if (j.contains("output_dir"))
        c.output_dir = get_field<std::string>(j, "output_dir");
    if (j.contains("emit_traces"))
        c.emit_traces = get_field<bool>(j, "emit_traces");
    if (j.contains("emit_plots"))
        c.emit_plots = get_field<bool>(j, "emit_plots");
    if (j.contains("slot_duration_ms"))
        c.slot_duration_ms = get_field<double>(j, "slot_duration_ms");
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: malformed JSON in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json to_json(const ExperimentConfig& c)
{
    std::vector<std::string> policies;
    for (PolicyId p : c.policies)
        policies.emplace_back(to_string(p));
    return {{"M", c.num_sensors},
            {"horizons", c.horizons},
            {"seeds", c.seeds},
            {"p_on", c.p_on},
            {"setup_range", {c.setup_range.lo, c.setup_range.hi}},
            {"window_range", {c.window_range.lo, c.window_range.hi}},
            {"reset_range", {c.reset_range.lo, c.reset_range.hi}},
            {"d_max", c.d_max},
            {"alpha", c.alpha},
            {"k_const", c.k_const},
            {"beta", c.beta},
            {"gamma", c.gamma},
            {"policies", policies},
            {"output_dir", c.output_dir},
            {"emit_traces", c.emit_traces},
            {"emit_plots", c.emit_plots},
            {"slot_duration_ms", c.slot_duration_ms}};
}

const CellResult& ExperimentResult::cell(PolicyId policy, int horizon) const
{
    for (const CellResult& c : cells)
        if (c.policy == policy && c.horizon == horizon)
            return c;
    throw std::out_of_range("no cell for policy " + std::string(to_string(policy)) + " at T = " +
                            std::to_string(horizon));
}

std::string trace_file_name(PolicyId policy, int horizon, std::uint64_t seed)
{
    return "trace_" + std::string(to_string(policy)) + "_T" + std::to_string(horizon) + "_seed" +
           std::to_string(seed) + ".csv";
}

int resolve_jobs(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("AOI_SCHED_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void write_atomic(const fs::path& path, const std::string& contents)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot rename into " + path.string());
    }
}

std::string comparison_csv(const ExperimentResult& result)
{
    std::string out = "policy,horizon,n";
    for (std::string_view f : kSummaryFields) {
        out += ',';
        out += f;
        out += "_mean,";
        out += f;
        out += "_std";
    }
    out += '\n';
    char buf[64];
    for (const CellResult& c : result.cells) {
        out += std::string(to_string(c.policy)) + ',' + std::to_string(c.horizon) + ',' + std::to_string(c.stats.n);
        for (const FieldStats& fs_ : c.stats.fields) {
            std::snprintf(buf, sizeof(buf), ",%.17g,", fs_.mean);
            out += buf;
            if (fs_.std) {
                std::snprintf(buf, sizeof(buf), "%.17g", *fs_.std);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const CellResult& c : result.cells) {
        nlohmann::json runs = nlohmann::json::array();
        for (const RunRecord& r : c.runs) {
            nlohmann::json j = to_json(r.summary);
            j["seed"] = r.seed;
            runs.push_back(std::move(j));
        }
        cells.push_back({{"policy", std::string(to_string(c.policy))},
                         {"horizon", c.horizon},
                         {"stats", to_json(c.stats)},
                         {"runs", std::move(runs)}});
    }
    return {{"config", to_json(config)}, {"slot_duration_ms", config.slot_duration_ms}, {"cells", std::move(cells)}};
}

namespace {

struct Job {
    std::size_t cell;
    std::size_t run;
    PolicyId policy;
    int horizon;
    std::uint64_t seed;
};

class FileLedger {
public:
    void add(const fs::path& p)
    {
        std::lock_guard lock(mu_);
        files_.push_back(p);
    }
    void remove_all()
    {
        std::lock_guard lock(mu_);
        std::error_code ec;
        for (auto it = files_.rbegin(); it != files_.rend(); ++it) {
            fs::remove(*it, ec);
            fs::path tmp = *it;
            tmp += ".tmp";
            fs::remove(tmp, ec);
        }
        files_.clear();
    }
    std::vector<fs::path> take()
    {
        std::lock_guard lock(mu_);
        return std::move(files_);
    }

private:
    std::mutex mu_;
    std::vector<fs::path> files_;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs, bool write_outputs)
{
    config.validate();
    const fs::path out_dir(config.output_dir);
    const fs::path trace_dir = out_dir / "traces";
    std::vector<fs::path> created_dirs;
    if (write_outputs) {
        std::error_code ec;
        for (const fs::path& d : {out_dir, trace_dir}) {
            if (d == trace_dir && !config.emit_traces)
                continue;
            if (fs::exists(d, ec))
                continue;
            fs::create_directories(d, ec);
            if (ec)
                throw std::runtime_error("output_dir: cannot create " + d.string() + ": " + ec.message());
            created_dirs.push_back(d);
        }
    }

    ExperimentResult result;
    std::vector<Job> work;
    for (PolicyId p : config.policies)
        for (int T : config.horizons) {
            CellResult cell;
            cell.policy = p;
            cell.horizon = T;
            cell.runs.resize(config.seeds.size());
            for (std::size_t s = 0; s < config.seeds.size(); ++s)
                work.push_back({result.cells.size(), s, p, T, config.seeds[s]});
            result.cells.push_back(std::move(cell));
        }

    FileLedger ledger;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= work.size())
                return;
            const Job& job = work[i];
            try {
                const Trace trace = run(config.engine(job.horizon), job.policy, job.seed);
                result.cells[job.cell].runs[job.run] = {job.seed, summarize(trace)};
                if (write_outputs && config.emit_traces) {
                    const fs::path path = trace_dir / trace_file_name(job.policy, job.horizon, job.seed);
                    ledger.add(path);
                    write_atomic(path, trace_csv(trace));
                }
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error)
                    error = std::current_exception();
                failed.store(true);
            }
        }
    };

    const int n_threads = std::min<int>(resolve_jobs(jobs), static_cast<int>(std::max<std::size_t>(1, work.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();

    auto cleanup = [&] {
        ledger.remove_all();
        std::error_code ec;
        for (auto it = created_dirs.rbegin(); it != created_dirs.rend(); ++it)
            fs::remove(*it, ec);  // only succeeds when empty
    };
    if (error) {
        cleanup();
        std::rethrow_exception(error);
    }

    try {
        for (CellResult& c : result.cells) {
            std::vector<RunSummary> summaries;
            for (const RunRecord& r : c.runs)
                summaries.push_back(r.summary);
            c.stats = aggregate(summaries);
        }
        if (write_outputs) {
            const std::string csv = comparison_csv(result);
            auto emit = [&](const fs::path& p, const std::string& text) {
                ledger.add(p);
                write_atomic(p, text);
            };
            emit(out_dir / "summary.json", summary_json(config, result).dump(2) + "\n");
            emit(out_dir / "comparison.csv", csv);
            if (config.emit_plots) {
                emit(out_dir / "exwsuoi_vs_horizon.svg", exwsuoi_line_svg(csv));
                emit(out_dir / "age_latency_jitter.svg", metrics_bars_svg(csv));
            }
        }
    } catch (...) {
        cleanup();
        throw;
    }
    result.files = ledger.take();
    return result;
}

}  // namespace aoisched
