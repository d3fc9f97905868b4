#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "aoisched/channel.hpp"
#include "aoisched/valuation.hpp"

namespace aoisched {

enum class PolicyId { HLFD, HLF, EDF, LLF };

inline constexpr PolicyId kAllPolicies[] = {PolicyId::HLFD, PolicyId::HLF, PolicyId::EDF, PolicyId::LLF};

/// "hlfd", "hlf", "edf", "llf".
std::string_view to_string(PolicyId id);
/// Throws std::invalid_argument for unknown names.
PolicyId parse_policy(std::string_view name);

struct Decision {
    std::optional<int> chosen;  // sensor index
};

/**
 * Picks the sensor to serve this slot.
 *
 *  - HLFD: the hard-deadline critical sample if present, otherwise the highest
 *    priority (lowest utility) sample.
 *  - HLF: highest total latency, deadline-blind.
 *  - EDF: earliest absolute drop epoch, slot + laxity + 1.
 *  - LLF: least laxity.
 *
 * Ties go to the lowest sensor index. Returns no choice only when the channel
 * is OFF or `views` is empty. Throws std::invalid_argument on malformed views.
 */
Decision select(PolicyId policy, std::span<const SampleView> views, ChannelState channel, int slot);

}  // namespace aoisched
