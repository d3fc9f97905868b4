#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "aoisched/engine.hpp"
#include <json.hpp>

namespace aoisched {

/// Headline metrics of one run. Age, latency and jitter are in slots,
/// exwsuoi in slots^-1.
struct RunSummary {
    double exwsuoi = 0.0;
    double mean_age = 0.0;
    double mean_latency = 0.0;
    double rms_jitter = 0.0;
    long long drops = 0;
    long long regenerations = 0;
    long long graces = 0;
};

inline constexpr std::array<std::string_view, 7> kSummaryFields = {
    "exwsuoi", "mean_age", "mean_latency", "rms_jitter", "drops", "regenerations", "graces"};

double summary_field(const RunSummary& s, std::string_view name);

struct FieldStats {
    double mean = 0.0;
    std::optional<double> std;  // undefined for a single run
};

struct AggregateStats {
    std::size_t n = 0;
    std::array<FieldStats, kSummaryFields.size()> fields{};

    const FieldStats& field(std::string_view name) const;
};

/**
 * mean_age     = sum of h over every (slot, sensor) / TM
 * mean_latency = sum of total latency over active entries / TM
 * rms_jitter   = sqrt(sum of squared total latency over active entries / TM)
 * exwsuoi      = k / TM * sum of alpha_i U over active entries
 *
 * Throws std::invalid_argument if the trace does not hold T complete records.
 */
RunSummary summarize(const Trace& trace);

/// Field-wise mean and (n-1)-denominator standard deviation.
/// Throws std::invalid_argument on an empty input.
AggregateStats aggregate(std::span<const RunSummary> summaries);

nlohmann::json to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AggregateStats& a);

}  // namespace aoisched
