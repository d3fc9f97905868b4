#pragma once

// Slot loop. Each slot runs, in order:
//   1. mode refresh (carried by the previous slot's end-of-slot transitions)
//   2. valuation of every active flow-line
//   3. channel state for the slot
//   4. conflict avoidance, applying graces
//   5. policy selection and service when the channel is ON
//   6. end of slot: the unserved hard-deadline sample is dropped, every other
//      unserved flow-line ticks
//   7. the SlotRecord is emitted

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aoisched/channel.hpp"
#include "aoisched/flowline.hpp"
#include "aoisched/policies.hpp"
#include "aoisched/valuation.hpp"

namespace aoisched {

struct EngineConfig {
    int num_sensors = 16;
    int horizon_T = 100;
    double p_on = 0.8;
    FlowLineDraws draws;
    double k_const = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double alpha = 1.0;
    std::vector<double> weights;  // optional per-sensor alpha_i; empty means alpha everywhere

    ValuationParams valuation() const;
    ChannelParams channel() const { return {p_on}; }
    double weight(int sensor) const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct WorldState {
    int slot_t = 1;
    std::vector<FlowLineState> flowlines;
    std::vector<int> pending_newly_active;  // became active at the last slot boundary
    std::vector<int> pending_regenerated;
    double utility_accumulator = 0.0;  // running sum of alpha_i * U over active entries
};

enum class PriorityClass : std::uint8_t { None, Normal, Critical };

struct SensorSnapshot {
    Mode mode = Mode::Inactive;
    int age_h = 0;
    int attempt_xi = 0;
    int attempt_latency_L = 0;
    int total_latency = 0;
    double utility = 0.0;
    int laxity = 0;  // meaningful only while active
    int window_W = 0;
    int grace_count = 0;
    PriorityClass priority_class = PriorityClass::None;
};

struct SlotRecord {
    int slot_t = 0;
    ChannelState channel = ChannelState::Off;
    std::vector<SensorSnapshot> sensors;  // position i-1 holds sensor i
    std::optional<int> chosen;
    std::optional<int> hard;
    std::vector<int> dropped;
    std::vector<int> graced;
    std::vector<int> regenerated;
    std::vector<int> newly_active;
    double weighted_utility = 0.0;  // sum of alpha_i * U over the active set
};

struct ConflictResolution {
    std::optional<int> hard;
    std::vector<int> soft_graced;
};

/// Channel OFF: every critical sample is graced. Channel ON: the critical
/// sample with the largest effective utility keeps its hard deadline (ties to
/// the lowest index), every other critical sample is graced.
ConflictResolution conflict_avoidance(std::span<const SampleView> views, ChannelState channel);

/// Picks a sensor among `views` (post conflict avoidance). Must return a
/// choice whenever the channel is ON and `views` is nonempty.
using Chooser = std::function<std::optional<int>(std::span<const SampleView>, ChannelState, int slot)>;

Chooser policy_chooser(PolicyId policy);

WorldState make_world(const EngineConfig& config, DrawSource& draws);
WorldState make_world(std::vector<FlowLineState> initial);

/// Valuations of the active flow-lines in index order.
std::vector<SampleView> active_views(const WorldState& world, const ValuationParams& params);

/// The views a policy sees this slot: active valuations after conflict
/// avoidance has applied its graces and marked the hard deadline.
std::vector<SampleView> decision_views(const WorldState& world, const EngineConfig& config, ChannelState channel);

SlotRecord advance(WorldState& world, const EngineConfig& config, ChannelState channel, const Chooser& chooser,
                   DrawSource& draws);

SlotRecord step(WorldState& world, const EngineConfig& config, PolicyId policy, ChannelState channel,
                DrawSource& draws);

struct Trace {
    EngineConfig config;
    PolicyId policy = PolicyId::HLFD;
    std::uint64_t seed = 0;
    std::vector<SlotRecord> records;
    double utility_accumulator = 0.0;
};

/// Seeded run over the configured horizon. Bitwise deterministic for a fixed
/// (config, policy, seed); the channel sequence depends on the seed only.
Trace run(const EngineConfig& config, PolicyId policy, std::uint64_t seed);

/// Run from explicit initial states over a fixed channel path (length T).
Trace run_path(const EngineConfig& config, const Chooser& chooser, std::vector<FlowLineState> initial,
               DrawSource& draws, std::span<const ChannelState> path);

}  // namespace aoisched
