#pragma once

// Scalar valuation of a sample: freshness, laxity, utility, lateness,
// penalty, effective utility and scheduling priority.

#include "aoisched/flowline.hpp"

namespace aoisched {

struct ValuationParams {
    double k_const = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    int d_max = 20;
    int horizon_T = 100;

    void validate() const;
};

/// Valuation of one active flow-line's current sample at one slot.
struct SampleView {
    int index = 0;
    int attempt_xi = 0;
    int attempt_latency_L = 0;
    int window_W = 0;
    int window_W_original = 0;
    int cum_deadline_prev = 0;
    int total_latency = 0;
    double freshness = 0.0;
    int laxity = 0;
    int slack_X = 0;
    int lateness = 0;
    double utility = 0.0;
    double penalty = 0.0;
    double effective_utility = 0.0;
    double priority = 0.0;  // +inf when critical
    bool hard_deadline = false;  // set by conflict avoidance

    bool critical() const { return laxity == 0; }
};

/// 1 / ((xi - 1) * d_max + L + 1). Throws std::invalid_argument for xi < 1 or L < 0.
double freshness(int attempt_latency, int attempt_xi, int d_max);

/// Slots left before the deadline once this slot's processing is done.
int laxity(int window_W, int attempt_latency);

int slack_indicator(int laxity_value);

double utility(double freshness_value, int slack_X, const ValuationParams& params);

/// Slots past the ungraced critical point; positive only after a grace.
int lateness(int attempt_latency, int window_W_original);

/// Tardiness penalty U * psi(Lt) * 1{Lt > 0}, with
/// psi(Lt) = exp(-10 ln(T - (xi-1) d_max - D - Lt) / T); the log argument is
/// clamped below at 1, which keeps the penalty within [0, U].
double penalty(double utility_value, int lateness_value, int attempt_xi, int cum_deadline,
               const ValuationParams& params);

double effective_utility(double utility_value, double penalty_value);

/// +inf when the sample has no slack left in the next slot, 1 / U otherwise.
/// Throws std::invalid_argument for U <= 0 with slack remaining.
double priority(double utility_value, int slack_X_next);

/// L^xi + D^(xi-1): latency accumulated over all attempts of the sample.
int total_latency(int attempt_latency, int cum_deadline_prev);

/// Full view of an active flow-line. Throws std::logic_error if not active.
SampleView make_view(const FlowLineState& state, const ValuationParams& params);

}  // namespace aoisched
