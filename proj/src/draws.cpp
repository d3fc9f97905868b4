#include "aoisched/draws.hpp"

#include <stdexcept>
#include <string>

namespace aoisched {

namespace {

constexpr std::uint64_t kFlowLineDomain = 0x666c6f776c696e65ULL;  // "flowline"
constexpr std::uint64_t kChannelDomain = 0x6368616e6e656c00ULL;   // "channel"

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t a, std::uint64_t b)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(domain), static_cast<std::uint32_t>(domain >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return std::mt19937_64(seq);
}

}  // namespace

RandomDraws::RandomDraws(std::uint64_t seed, int num_sensors, const FlowLineDraws& ranges) : ranges_(ranges)
{
    ranges_.validate();
    streams_.reserve(static_cast<std::size_t>(num_sensors) * kKinds);
    for (int i = 1; i <= num_sensors; ++i)
        for (int k = 0; k < kKinds; ++k)
            streams_.push_back(make_stream(seed, kFlowLineDomain, static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(k)));
}

int RandomDraws::uniform(int sensor, Kind kind, IntRange range)
{
    const auto slot = static_cast<std::size_t>(sensor - 1) * kKinds + kind;
    if (sensor < 1 || slot >= streams_.size())
        throw std::out_of_range("RandomDraws: sensor " + std::to_string(sensor) + " out of range");
    std::uniform_int_distribution<int> dist(range.lo, range.hi);
    return dist(streams_[slot]);
}

int RandomDraws::setup(int sensor) { return uniform(sensor, kSetup, ranges_.setup_range); }
int RandomDraws::window(int sensor) { return uniform(sensor, kWindow, ranges_.window_range); }
int RandomDraws::reset(int sensor) { return uniform(sensor, kReset, ranges_.reset_range); }
int RandomDraws::initial_age(int sensor, int lo, int hi) { return uniform(sensor, kInitialAge, {lo, hi}); }

PinnedDraws::PinnedDraws(std::vector<Sequences> per_sensor)
    : seq_(std::move(per_sensor)), cursors_(seq_.size() * 3, 0)
{
}

int PinnedDraws::take(int sensor, int kind, const std::vector<int>& values)
{
    int& cursor = cursors_.at(static_cast<std::size_t>(sensor - 1) * 3 + kind);
    if (cursor >= static_cast<int>(values.size()))
        throw std::out_of_range("PinnedDraws: sensor " + std::to_string(sensor) + " exhausted its pinned draws");
    return values[static_cast<std::size_t>(cursor++)];
}

int PinnedDraws::setup(int sensor) { return take(sensor, 0, seq_.at(sensor - 1).setups); }
int PinnedDraws::window(int sensor) { return take(sensor, 1, seq_.at(sensor - 1).windows); }
int PinnedDraws::reset(int sensor) { return take(sensor, 2, seq_.at(sensor - 1).resets); }
int PinnedDraws::initial_age(int, int lo, int) { return lo; }

std::mt19937_64 channel_stream(std::uint64_t seed) { return make_stream(seed, kChannelDomain, 0, 0); }

}  // namespace aoisched
