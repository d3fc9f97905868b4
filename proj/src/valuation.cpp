#include "aoisched/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoisched {

void ValuationParams::validate() const
{
    if (!(k_const > 0.0))
        throw std::invalid_argument("k_const: must be positive");
    if (!std::isfinite(beta))
        throw std::invalid_argument("beta: must be finite");
    if (!std::isfinite(gamma))
        throw std::invalid_argument("gamma: must be finite");
    if (d_max < 1)
        throw std::invalid_argument("d_max: must be positive");
    if (horizon_T < 1)
        throw std::invalid_argument("horizon_T: must be positive");
}

double freshness(int attempt_latency, int attempt_xi, int d_max)
{
    if (attempt_xi < 1)
        throw std::invalid_argument("freshness: attempt 0 has no active packet");
    if (attempt_latency < 0)
        throw std::invalid_argument("freshness: negative latency");
    const double denom = static_cast<double>(attempt_xi - 1) * d_max + attempt_latency + 1;
    return 1.0 / denom;
}

int laxity(int window_W, int attempt_latency) { return window_W - attempt_latency - 1; }

int slack_indicator(int laxity_value) { return laxity_value < 0 ? 0 : 1; }

double utility(double freshness_value, int slack_X, const ValuationParams& params)
{
    if (slack_X == 0)
        return 0.0;
    return params.k_const * std::pow(freshness_value, params.beta);
}

int lateness(int attempt_latency, int window_W_original) { return attempt_latency - (window_W_original - 1); }

double penalty(double utility_value, int lateness_value, int attempt_xi, int cum_deadline,
               const ValuationParams& params)
{
    if (lateness_value <= 0)
        return 0.0;
    const double T = params.horizon_T;
    const double arg = T - static_cast<double>(attempt_xi - 1) * params.d_max - cum_deadline - lateness_value;
    const double psi = std::exp(-10.0 * std::log(std::max(1.0, arg)) / T);
    return utility_value * psi;
}

double effective_utility(double utility_value, double penalty_value) { return utility_value - penalty_value; }

double priority(double utility_value, int slack_X_next)
{
    if (slack_X_next == 0)
        return std::numeric_limits<double>::infinity();
    if (!(utility_value > 0.0))
        throw std::invalid_argument("priority: non-critical sample with zero utility");
    return 1.0 / utility_value;
}

int total_latency(int attempt_latency, int cum_deadline_prev) { return attempt_latency + cum_deadline_prev; }

SampleView make_view(const FlowLineState& s, const ValuationParams& params)
{
    if (s.mode != Mode::Active)
        throw std::logic_error("make_view: flow-line is not active");
    SampleView v;
    v.index = s.index;
    v.attempt_xi = s.attempt_xi;
    v.attempt_latency_L = s.attempt_latency_L;
    v.window_W = s.window_W;
    v.window_W_original = s.window_W_original;
    v.cum_deadline_prev = s.cum_deadline_prev;
    v.total_latency = total_latency(s.attempt_latency_L, s.cum_deadline_prev);
    v.freshness = freshness(s.attempt_latency_L, s.attempt_xi, params.d_max);
    v.laxity = laxity(s.window_W, s.attempt_latency_L);
    v.slack_X = slack_indicator(v.laxity);
    v.lateness = lateness(s.attempt_latency_L, s.window_W_original);
    v.utility = utility(v.freshness, v.slack_X, params);
    // Cumulative deadline of the current attempt, measured without graces.
    const int cum_deadline = s.cum_deadline_prev + s.window_W_original;
    v.penalty = penalty(v.utility, v.lateness, s.attempt_xi, cum_deadline, params);
    v.effective_utility = effective_utility(v.utility, v.penalty);
    v.priority = priority(v.utility, slack_indicator(v.laxity - 1));
    return v;
}

}  // namespace aoisched
