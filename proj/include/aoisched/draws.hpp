#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aoisched/flowline.hpp"

namespace aoisched {

/// Seeded per-(sensor, kind) streams over the configured draw ranges.
class RandomDraws final : public DrawSource {
public:
    RandomDraws(std::uint64_t seed, int num_sensors, const FlowLineDraws& ranges);

    int setup(int sensor) override;
    int window(int sensor) override;
    int reset(int sensor) override;
    int initial_age(int sensor, int lo, int hi) override;

private:
    enum Kind { kSetup, kWindow, kReset, kInitialAge, kKinds };

    int uniform(int sensor, Kind kind, IntRange range);

    FlowLineDraws ranges_;
    std::vector<std::mt19937_64> streams_;  // index (sensor - 1) * kKinds + kind
};

/// Pre-materialized draws consumed in order, one cursor per (sensor, kind).
/// Copyable value, so search code can branch on it.
class PinnedDraws final : public DrawSource {
public:
    struct Sequences {
        std::vector<int> setups;
        std::vector<int> windows;
        std::vector<int> resets;
        friend bool operator==(const Sequences&, const Sequences&) = default;
    };

    PinnedDraws() = default;
    explicit PinnedDraws(std::vector<Sequences> per_sensor);

    int setup(int sensor) override;
    int window(int sensor) override;
    int reset(int sensor) override;
    /// Pinned instances carry explicit initial states; always returns `lo`.
    int initial_age(int sensor, int lo, int hi) override;

    const std::vector<Sequences>& sequences() const { return seq_; }
    /// Cursor triples (setup, window, reset) per sensor, flattened.
    const std::vector<int>& cursors() const { return cursors_; }

private:
    int take(int sensor, int kind, const std::vector<int>& values);

    std::vector<Sequences> seq_;
    std::vector<int> cursors_;
};

/// Channel stream disjoint from the flow-line streams for the same seed.
std::mt19937_64 channel_stream(std::uint64_t seed);

}  // namespace aoisched
