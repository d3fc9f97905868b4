#include "aoisched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aoisched/draws.hpp"

namespace aoisched {

ValuationParams EngineConfig::valuation() const
{
    ValuationParams p;
    p.k_const = k_const;
    p.beta = beta;
    p.gamma = gamma;
    p.d_max = draws.d_max;
    p.horizon_T = horizon_T;
    return p;
}

double EngineConfig::weight(int sensor) const
{
    return weights.empty() ? alpha : weights.at(static_cast<std::size_t>(sensor - 1));
}

void EngineConfig::validate() const
{
    if (num_sensors < 1)
        throw std::invalid_argument("M: must be at least 1");
    if (horizon_T < 1)
        throw std::invalid_argument("horizon: must be at least 1");
    channel().validate();
    draws.validate();
    valuation().validate();
    if (!(alpha > 0.0))
        throw std::invalid_argument("alpha: must be positive");
    if (!weights.empty()) {
        if (static_cast<int>(weights.size()) != num_sensors)
            throw std::invalid_argument("weights: need one weight per sensor");
        for (double w : weights)
            if (!(w > 0.0))
                throw std::invalid_argument("weights: must be positive");
    }
}

ConflictResolution conflict_avoidance(std::span<const SampleView> views, ChannelState channel)
{
    ConflictResolution out;
    const SampleView* hard = nullptr;
    for (const SampleView& v : views) {
        if (!v.critical())
            continue;
        if (channel == ChannelState::Off) {
            out.soft_graced.push_back(v.index);
            continue;
        }
        if (hard == nullptr || v.effective_utility > hard->effective_utility ||
            (v.effective_utility == hard->effective_utility && v.index < hard->index))
            hard = &v;
    }
    if (hard != nullptr) {
        out.hard = hard->index;
        for (const SampleView& v : views)
            if (v.critical() && v.index != hard->index)
                out.soft_graced.push_back(v.index);
        std::sort(out.soft_graced.begin(), out.soft_graced.end());
    }
    return out;
}

Chooser policy_chooser(PolicyId policy)
{
    return [policy](std::span<const SampleView> views, ChannelState channel, int slot) {
        return select(policy, views, channel, slot).chosen;
    };
}

WorldState make_world(const EngineConfig& config, DrawSource& draws)
{
    std::vector<FlowLineState> initial;
    initial.reserve(static_cast<std::size_t>(config.num_sensors));
    for (int i = 1; i <= config.num_sensors; ++i)
        initial.push_back(initial_state(i, draws));
    return make_world(std::move(initial));
}

WorldState make_world(std::vector<FlowLineState> initial)
{
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (initial[i].index != static_cast<int>(i) + 1)
            throw std::invalid_argument("make_world: flow-line indices must be 1..M in order");
        if (auto bad = check_invariants(initial[i]))
            throw std::invalid_argument("make_world: sensor " + std::to_string(i + 1) + ": " + *bad);
    }
    WorldState w;
    w.flowlines = std::move(initial);
    return w;
}

std::vector<SampleView> active_views(const WorldState& world, const ValuationParams& params)
{
    std::vector<SampleView> views;
    for (const FlowLineState& s : world.flowlines)
        if (s.mode == Mode::Active)
            views.push_back(make_view(s, params));
    return views;
}

std::vector<SampleView> decision_views(const WorldState& world, const EngineConfig& config, ChannelState channel)
{
    const ValuationParams params = config.valuation();
    std::vector<SampleView> views = active_views(world, params);
    const ConflictResolution ca = conflict_avoidance(views, channel);
    if (!ca.soft_graced.empty()) {
        WorldState graced = world;
        for (int idx : ca.soft_graced) {
            FlowLineState& s = graced.flowlines[static_cast<std::size_t>(idx - 1)];
            s = grace(s);
        }
        views = active_views(graced, params);
    }
    for (SampleView& v : views)
        v.hard_deadline = ca.hard && *ca.hard == v.index;
    return views;
}

SlotRecord advance(WorldState& world, const EngineConfig& config, ChannelState channel, const Chooser& chooser,
                   DrawSource& draws)
{
    if (world.slot_t > config.horizon_T)
        throw std::logic_error("advance: slot beyond the horizon");
    const ValuationParams params = config.valuation();

    SlotRecord rec;
    rec.slot_t = world.slot_t;
    rec.channel = channel;
    rec.newly_active = std::move(world.pending_newly_active);
    rec.regenerated = std::move(world.pending_regenerated);
    world.pending_newly_active.clear();
    world.pending_regenerated.clear();

    std::vector<SampleView> views = active_views(world, params);

    rec.sensors.resize(world.flowlines.size());
    for (std::size_t i = 0; i < world.flowlines.size(); ++i) {
        const FlowLineState& s = world.flowlines[i];
        SensorSnapshot& snap = rec.sensors[i];
        snap.mode = s.mode;
        snap.age_h = s.age_h;
        snap.attempt_xi = s.attempt_xi;
        snap.attempt_latency_L = s.attempt_latency_L;
        snap.window_W = s.window_W;
        snap.grace_count = s.grace_count;
    }
    for (const SampleView& v : views) {
        SensorSnapshot& snap = rec.sensors[static_cast<std::size_t>(v.index - 1)];
        snap.total_latency = v.total_latency;
        snap.utility = v.utility;
        snap.laxity = v.laxity;
        snap.priority_class = v.critical() ? PriorityClass::Critical : PriorityClass::Normal;
        rec.weighted_utility += config.weight(v.index) * v.utility;
    }
    world.utility_accumulator += rec.weighted_utility;

    const ConflictResolution ca = conflict_avoidance(views, channel);
    rec.hard = ca.hard;
    rec.graced = ca.soft_graced;
    for (int idx : ca.soft_graced) {
        FlowLineState& s = world.flowlines[static_cast<std::size_t>(idx - 1)];
        s = grace(s);
    }
    if (!ca.soft_graced.empty())
        views = active_views(world, params);
    for (SampleView& v : views)
        v.hard_deadline = ca.hard && *ca.hard == v.index;

    if (channel == ChannelState::On && !views.empty()) {
        rec.chosen = chooser(views, channel, world.slot_t);
        if (!rec.chosen)
            throw std::logic_error("advance: policy idled with the channel ON and active samples waiting");
        const bool is_active =
            std::any_of(views.begin(), views.end(), [&](const SampleView& v) { return v.index == *rec.chosen; });
        if (!is_active)
            throw std::logic_error("advance: policy chose sensor " + std::to_string(*rec.chosen) +
                                   " which is not active");
    }

    int served = 0;
    for (FlowLineState& s : world.flowlines) {
        const Mode before = s.mode;
        if (rec.chosen && *rec.chosen == s.index) {
            ++served;
            s = on_served(s, draws);
            if (s.mode == Mode::Active)
                world.pending_newly_active.push_back(s.index);
        } else if (rec.hard && *rec.hard == s.index) {
            s = on_dropped(s, draws);
            rec.dropped.push_back(s.index);
        } else {
            s = tick_unserved(s);
            if (s.mode == Mode::Active && before == Mode::Inactive)
                world.pending_newly_active.push_back(s.index);
            else if (s.mode == Mode::Active && before == Mode::Hibernating)
                world.pending_regenerated.push_back(s.index);
        }
    }
    if (served > 1)
        throw std::logic_error("advance: more than one flow-line served in a slot");

    world.slot_t += 1;
    return rec;
}

SlotRecord step(WorldState& world, const EngineConfig& config, PolicyId policy, ChannelState channel,
                DrawSource& draws)
{
    return advance(world, config, channel, policy_chooser(policy), draws);
}

Trace run(const EngineConfig& config, PolicyId policy, std::uint64_t seed)
{
    config.validate();
    RandomDraws draws(seed, config.num_sensors, config.draws);
    std::mt19937_64 channel_rng = channel_stream(seed);
    WorldState world = make_world(config, draws);
    const ChannelParams channel = config.channel();
    const Chooser chooser = policy_chooser(policy);

    Trace trace;
    trace.config = config;
    trace.policy = policy;
    trace.seed = seed;
    trace.records.reserve(static_cast<std::size_t>(config.horizon_T));
    for (int t = 1; t <= config.horizon_T; ++t)
        trace.records.push_back(advance(world, config, next_state(channel, channel_rng), chooser, draws));
    trace.utility_accumulator = world.utility_accumulator;
    return trace;
}

Trace run_path(const EngineConfig& config, const Chooser& chooser, std::vector<FlowLineState> initial,
               DrawSource& draws, std::span<const ChannelState> path)
{
    if (static_cast<int>(path.size()) != config.horizon_T)
        throw std::invalid_argument("run_path: channel path length differs from the horizon");
    WorldState world = make_world(std::move(initial));
    Trace trace;
    trace.config = config;
    for (ChannelState ch : path)
        trace.records.push_back(advance(world, config, ch, chooser, draws));
    trace.utility_accumulator = world.utility_accumulator;
    return trace;
}

}  // namespace aoisched
