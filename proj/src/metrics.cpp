#include "aoisched/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoisched {

double summary_field(const RunSummary& s, std::string_view name)
{
    if (name == "exwsuoi")
        return s.exwsuoi;
    if (name == "mean_age")
        return s.mean_age;
    if (name == "mean_latency")
        return s.mean_latency;
    if (name == "rms_jitter")
        return s.rms_jitter;
    if (name == "drops")
        return static_cast<double>(s.drops);
    if (name == "regenerations")
        return static_cast<double>(s.regenerations);
    if (name == "graces")
        return static_cast<double>(s.graces);
    throw std::invalid_argument("unknown summary field '" + std::string(name) + "'");
}

const FieldStats& AggregateStats::field(std::string_view name) const
{
    for (std::size_t i = 0; i < kSummaryFields.size(); ++i)
        if (kSummaryFields[i] == name)
            return fields[i];
    throw std::invalid_argument("unknown summary field '" + std::string(name) + "'");
}

RunSummary summarize(const Trace& trace)
{
    const EngineConfig& cfg = trace.config;
    const int T = cfg.horizon_T;
    const int M = cfg.num_sensors;
    if (static_cast<int>(trace.records.size()) != T)
        throw std::invalid_argument("summarize: trace holds " + std::to_string(trace.records.size()) +
                                    " records, expected " + std::to_string(T));

    double age_sum = 0.0;
    double latency_sum = 0.0;
    double latency_sq_sum = 0.0;
    double utility_sum = 0.0;
    RunSummary out;
    for (const SlotRecord& rec : trace.records) {
        if (static_cast<int>(rec.sensors.size()) != M)
            throw std::invalid_argument("summarize: incomplete slot record at slot " + std::to_string(rec.slot_t));
        for (std::size_t i = 0; i < rec.sensors.size(); ++i) {
            const SensorSnapshot& s = rec.sensors[i];
            age_sum += s.age_h;
            if (s.mode != Mode::Active)
                continue;
            latency_sum += s.total_latency;
            latency_sq_sum += static_cast<double>(s.total_latency) * s.total_latency;
            utility_sum += cfg.weight(static_cast<int>(i) + 1) * s.utility;
        }
        out.drops += static_cast<long long>(rec.dropped.size());
        out.regenerations += static_cast<long long>(rec.regenerated.size());
        out.graces += static_cast<long long>(rec.graced.size());
    }
    const double tm = static_cast<double>(T) * M;
    out.mean_age = age_sum / tm;
    out.mean_latency = latency_sum / tm;
    out.rms_jitter = std::sqrt(latency_sq_sum / tm);
    out.exwsuoi = cfg.k_const / tm * utility_sum;
    return out;
}

AggregateStats aggregate(std::span<const RunSummary> summaries)
{
    if (summaries.empty())
        throw std::invalid_argument("aggregate: no summaries");
    AggregateStats out;
    out.n = summaries.size();
    const double n = static_cast<double>(out.n);
    for (std::size_t f = 0; f < kSummaryFields.size(); ++f) {
        double sum = 0.0;
        for (const RunSummary& s : summaries)
            sum += summary_field(s, kSummaryFields[f]);
        const double mean = sum / n;
        out.fields[f].mean = mean;
        if (out.n >= 2) {
            double sq = 0.0;
            for (const RunSummary& s : summaries) {
                const double d = summary_field(s, kSummaryFields[f]) - mean;
                sq += d * d;
            }
            out.fields[f].std = std::sqrt(sq / (n - 1.0));
        }
    }
    return out;
}

nlohmann::json to_json(const RunSummary& s)
{
    return nlohmann::json{{"exwsuoi", s.exwsuoi},
                          {"mean_age", s.mean_age},
                          {"mean_latency", s.mean_latency},
                          {"rms_jitter", s.rms_jitter},
                          {"drops", s.drops},
                          {"regenerations", s.regenerations},
                          {"graces", s.graces}};
}

RunSummary summary_from_json(const nlohmann::json& j)
{
    RunSummary s;
    s.exwsuoi = j.at("exwsuoi").get<double>();
    s.mean_age = j.at("mean_age").get<double>();
    s.mean_latency = j.at("mean_latency").get<double>();
    s.rms_jitter = j.at("rms_jitter").get<double>();
    s.drops = j.at("drops").get<long long>();
    s.regenerations = j.at("regenerations").get<long long>();
    s.graces = j.at("graces").get<long long>();
    return s;
}

nlohmann::json to_json(const AggregateStats& a)
{
    nlohmann::json j;
    j["n"] = a.n;
    for (std::size_t f = 0; f < kSummaryFields.size(); ++f) {
        nlohmann::json cell;
        cell["mean"] = a.fields[f].mean;
        cell["std"] = a.fields[f].std ? nlohmann::json(*a.fields[f].std) : nlohmann::json(nullptr);
        j[std::string(kSummaryFields[f])] = std::move(cell);
    }
    return j;
}

}  // namespace aoisched
