#include "aoisched/policies.hpp"

#include <stdexcept>
#include <string>

namespace aoisched {

std::string_view to_string(PolicyId id)
{
    switch (id) {
    case PolicyId::HLFD:
        return "hlfd";
    case PolicyId::HLF:
        return "hlf";
    case PolicyId::EDF:
        return "edf";
    case PolicyId::LLF:
        return "llf";
    }
    return "?";
}

PolicyId parse_policy(std::string_view name)
{
    for (PolicyId id : kAllPolicies)
        if (to_string(id) == name)
            return id;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

namespace {

// First view (in input order, ties to the lowest index) minimizing key.
template <class Key>
const SampleView* argmin(std::span<const SampleView> views, Key key)
{
    const SampleView* best = nullptr;
    for (const SampleView& v : views) {
        if (best == nullptr) {
            best = &v;
            continue;
        }
        const auto kv = key(v);
        const auto kb = key(*best);
        if (kv < kb || (kv == kb && v.index < best->index))
            best = &v;
    }
    return best;
}

void check_views(std::span<const SampleView> views)
{
    for (const SampleView& v : views) {
        if (v.attempt_latency_L < 0 || v.total_latency < 0)
            throw std::invalid_argument("select: view with negative latency");
        if (!(v.utility > 0.0))
            throw std::invalid_argument("select: active view with zero utility");
        if (v.attempt_xi < 1)
            throw std::invalid_argument("select: active view without an attempt");
    }
}

}  // namespace

Decision select(PolicyId policy, std::span<const SampleView> views, ChannelState channel, int slot)
{
    if (channel == ChannelState::Off || views.empty())
        return {};
    check_views(views);

    const SampleView* pick = nullptr;
    switch (policy) {
    case PolicyId::HLFD: {
        const SampleView* critical = nullptr;
        for (const SampleView& v : views) {
            if (v.hard_deadline) {
                pick = &v;
                break;
            }
            if (v.critical() && (critical == nullptr || v.index < critical->index))
                critical = &v;
        }
        if (pick == nullptr)
            pick = critical;
        if (pick == nullptr)
            pick = argmin(views, [](const SampleView& v) { return -v.priority; });
        break;
    }
    case PolicyId::HLF:
        pick = argmin(views, [](const SampleView& v) { return -v.total_latency; });
        break;
    case PolicyId::EDF:
        pick = argmin(views, [slot](const SampleView& v) { return static_cast<long long>(slot) + v.laxity + 1; });
        break;
    case PolicyId::LLF:
        pick = argmin(views, [](const SampleView& v) { return v.laxity; });
        break;
    }
    return {pick->index};
}

}  // namespace aoisched
