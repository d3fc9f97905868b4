#include "aoisched/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace aoisched {

void ChannelParams::validate() const
{
    if (!(p_on >= 0.0 && p_on <= 1.0))
        throw std::invalid_argument("p_on: must lie in [0, 1]");
}

ChannelState next_state(const ChannelParams& params, std::mt19937_64& stream)
{
    std::bernoulli_distribution on(params.p_on);
    return on(stream) ? ChannelState::On : ChannelState::Off;
}

double realization_weight(std::span<const ChannelState> seq, const ChannelParams& params)
{
    double w = 1.0;
    for (ChannelState s : seq)
        w *= s == ChannelState::On ? params.p_on : 1.0 - params.p_on;
    return w;
}

std::vector<ChannelSeq> all_realizations(int horizon)
{
    if (horizon < 0 || horizon > 24)
        throw std::invalid_argument("all_realizations: horizon outside [0, 24]");
    const std::uint32_t count = 1u << horizon;
    std::vector<ChannelSeq> out;
    out.reserve(count);
    for (std::uint32_t bits = 0; bits < count; ++bits) {
        ChannelSeq seq(static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t)
            seq[static_cast<std::size_t>(t)] = (bits >> (horizon - 1 - t)) & 1u ? ChannelState::On : ChannelState::Off;
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace aoisched
