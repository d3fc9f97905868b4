#include "aoisched/flowline.hpp"

#include <algorithm>
#include <stdexcept>

namespace aoisched {

std::string_view to_string(Mode mode)
{
    switch (mode) {
    case Mode::Inactive:
        return "inactive";
    case Mode::Active:
        return "active";
    case Mode::Hibernating:
        return "hibernating";
    }
    return "?";
}

void FlowLineDraws::validate() const
{
    if (setup_range.empty() || setup_range.lo < 0)
        throw std::invalid_argument("setup_range: must be a nonempty range of nonnegative slots");
    if (window_range.empty() || window_range.lo < 1)
        throw std::invalid_argument("window_range: must be a nonempty range with lower bound >= 1");
    if (reset_range.empty() || reset_range.lo < 1)
        throw std::invalid_argument("reset_range: must be a nonempty range with lower bound >= 1");
    if (d_max < 1)
        throw std::invalid_argument("d_max: must be positive");
    if (window_range.hi > d_max)
        throw std::invalid_argument("window_range: upper bound exceeds d_max");
}

Mode mode_of(const FlowLineState& s)
{
    if (s.attempt_xi == 0)
        return Mode::Inactive;
    if (s.reset_RS > 0)
        return Mode::Hibernating;
    return Mode::Active;
}

std::optional<std::string> check_invariants(const FlowLineState& s)
{
    if (s.mode != mode_of(s))
        return "stored mode disagrees with mode_of";
    if (s.age_h < 1)
        return "age below 1";
    if (s.grace_count != s.window_W - s.window_W_original || s.grace_count < 0)
        return "grace_count != window_W - window_W_original";
    switch (s.mode) {
    case Mode::Inactive:
        if (s.age_h > s.setup_c)
            return "inactive with age beyond setup time";
        break;
    case Mode::Active:
        if (s.attempt_latency_L < 0 || s.attempt_latency_L > s.window_W - 1)
            return "active with attempt latency outside [0, W-1]";
        if (s.attempt_xi < 1)
            return "active without an attempt";
        break;
    case Mode::Hibernating:
        if (s.attempt_xi < 1)
            return "hibernating without an attempt";
        break;
    }
    return std::nullopt;
}

FlowLineState make_initial_state(int index, int setup_c, int window_W, int age_h)
{
    if (setup_c < 0 || window_W < 1 || age_h < 1 || age_h > setup_c + window_W)
        throw std::invalid_argument("initial conditions require 1 <= h <= c + W, W >= 1, c >= 0");
    FlowLineState s;
    s.index = index;
    s.age_h = age_h;
    s.setup_c = setup_c;
    s.window_W = window_W;
    s.window_W_original = window_W;
    if (age_h > setup_c) {
        s.attempt_xi = 1;
        s.attempt_latency_L = age_h - setup_c - 1;
    }
    s.mode = mode_of(s);
    return s;
}

FlowLineState initial_state(int index, DrawSource& draws)
{
    const int c = draws.setup(index);
    const int w = draws.window(index);
    const int h = draws.initial_age(index, 1, c + w);
    return make_initial_state(index, c, w, h);
}

FlowLineState on_served(const FlowLineState& state, DrawSource& draws)
{
    if (state.mode != Mode::Active)
        throw std::logic_error("on_served: flow-line is not active");
    FlowLineState s = state;
    s.age_h = 1;
    s.sample_index_k += 1;
    s.setup_c = draws.setup(s.index);
    s.window_W = draws.window(s.index);
    s.window_W_original = s.window_W;
    s.attempt_latency_L = 0;
    s.cum_deadline_prev = 0;
    s.grace_count = 0;
    s.reset_RS = 0;
    // With zero setup time the inactive interval 1 <= h < c + 1 is empty.
    s.attempt_xi = s.setup_c == 0 ? 1 : 0;
    s.mode = mode_of(s);
    return s;
}

FlowLineState on_dropped(const FlowLineState& state, DrawSource& draws)
{
    if (state.mode != Mode::Active)
        throw std::logic_error("on_dropped: flow-line is not active");
    if (state.window_W - state.attempt_latency_L - 1 != 0)
        throw std::logic_error("on_dropped: sample is not critical");
    FlowLineState s = state;
    s.age_h += 1;
    s.reset_RS = draws.reset(s.index);
    s.cum_deadline_prev += s.window_W;
    s.grace_count = 0;
    s.attempt_latency_L = 0;
    s.window_W = draws.window(s.index);
    s.window_W_original = s.window_W;
    s.mode = mode_of(s);
    return s;
}

FlowLineState tick_unserved(const FlowLineState& state)
{
    FlowLineState s = state;
    s.age_h += 1;
    switch (s.mode) {
    case Mode::Active:
        s.attempt_latency_L += 1;
        if (s.attempt_latency_L >= s.window_W)
            throw std::logic_error("tick_unserved: critical sample neither served, graced nor dropped");
        break;
    case Mode::Inactive:
        if (s.age_h >= s.setup_c + 1) {
            s.attempt_xi = std::max(1, s.attempt_xi);
            s.attempt_latency_L = 0;
        }
        break;
    case Mode::Hibernating:
        s.reset_RS -= 1;
        if (s.reset_RS == 0) {
            s.attempt_xi += 1;
            s.attempt_latency_L = 0;
        }
        break;
    }
    s.mode = mode_of(s);
    return s;
}

FlowLineState grace(const FlowLineState& state)
{
    if (state.mode != Mode::Active || state.window_W - state.attempt_latency_L - 1 != 0)
        throw std::logic_error("grace: only an active critical sample can be graced");
    FlowLineState s = state;
    s.window_W += 1;
    s.grace_count += 1;
    return s;
}

}  // namespace aoisched
