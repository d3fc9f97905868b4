#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace aoisched {

enum class ChannelState : std::uint8_t { Off = 0, On = 1 };

struct ChannelParams {
    double p_on = 0.8;

    void validate() const;
};

using ChannelSeq = std::vector<ChannelState>;

/// Bernoulli(p_on) draw, independent across slots.
ChannelState next_state(const ChannelParams& params, std::mt19937_64& stream);

/// p^#ON * (1 - p)^#OFF.
double realization_weight(std::span<const ChannelState> seq, const ChannelParams& params);

/// All 2^T sequences of length T, in binary-counting order (slot 1 is the
/// most significant position, OFF before ON).
std::vector<ChannelSeq> all_realizations(int horizon);

}  // namespace aoisched
