#pragma once

// Per-flow-line lifecycle: sleep (inactive), active and hibernation modes,
// age/latency clocks and attempt-indexed deadlines.
//
// Deadline model: every attempt owns a latency budget `window_W`. A sample
// is dropped when its attempt latency would reach the window. On the age axis
// the cumulative deadline is D^xi = D^(xi-1) + RS^(xi-1) + W^xi with D^0 = 0
// and RS^0 = setup_c + 1, so the inactive / active / hibernating intervals
// tile the age axis without gaps.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aoisched {

enum class Mode : std::uint8_t { Inactive, Active, Hibernating };

std::string_view to_string(Mode mode);

struct IntRange {
    int lo = 0;
    int hi = 0;

    bool empty() const { return lo > hi; }
    bool contains(int v) const { return v >= lo && v <= hi; }
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Draw ranges for one flow-line population.
struct FlowLineDraws {
    IntRange setup_range{1, 25};
    IntRange window_range{1, 20};
    IntRange reset_range{1, 10};
    int d_max = 20;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct FlowLineState {
    int index = 1;  // sensor id, 1-based
    Mode mode = Mode::Inactive;
    int age_h = 1;
    int sample_index_k = 1;
    int attempt_xi = 0;
    int setup_c = 1;
    int window_W = 1;
    int window_W_original = 1;
    int cum_deadline_prev = 0;  // sum of windows of the failed attempts of this sample
    int attempt_latency_L = 0;
    int reset_RS = 0;  // slots left in hibernation
    int grace_count = 0;

    friend bool operator==(const FlowLineState&, const FlowLineState&) = default;
};

/// Source of the per-flow-line random draws. Each (sensor, kind) pair is an
/// independent ordered stream, so the n-th setup draw of sensor i is the same
/// no matter which policy is driving the run.
class DrawSource {
public:
    virtual ~DrawSource() = default;
    virtual int setup(int sensor) = 0;
    virtual int window(int sensor) = 0;
    virtual int reset(int sensor) = 0;
    virtual int initial_age(int sensor, int lo, int hi) = 0;
};

Mode mode_of(const FlowLineState& state);

/// Returns a description of the first violated state invariant, if any.
std::optional<std::string> check_invariants(const FlowLineState& state);

/// Slot-1 state: setup and window drawn, age uniform in [1, setup_c + window_W]
/// so no flow-line starts in hibernation.
FlowLineState initial_state(int index, DrawSource& draws);

/// Builds a consistent state from explicit initial conditions (c(0), D(1), h(1)).
FlowLineState make_initial_state(int index, int setup_c, int window_W, int age_h);

FlowLineState on_served(const FlowLineState& state, DrawSource& draws);
FlowLineState on_dropped(const FlowLineState& state, DrawSource& draws);
FlowLineState tick_unserved(const FlowLineState& state);
FlowLineState grace(const FlowLineState& state);

}  // namespace aoisched
