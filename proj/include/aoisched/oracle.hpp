#pragma once

// Exhaustive optimality check on tiny instances. Every draw is pinned up
// front, so the only randomness left is the channel, and the expected
// objective of any deterministic state-feedback policy can be computed exactly
// by branching on the channel state of each slot.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aoisched/draws.hpp"
#include "aoisched/engine.hpp"

namespace aoisched {

struct OracleBounds {
    int max_sensors = 3;
    int max_horizon = 8;
};

struct Instance {
    EngineConfig config;  // num_sensors, horizon_T, p_on, valuation constants
    std::vector<FlowLineState> initial;
    std::vector<PinnedDraws::Sequences> draws;  // one per sensor, consumed in order

    /// Throws std::invalid_argument when malformed or beyond `bounds`.
    void validate(const OracleBounds& bounds = {}) const;
};

/// Exact expectation of a policy: the objective k/(TM) * sum_t E[V_t] and the
/// per-slot E[V_t], where V_t = sum over the active set of alpha_i * U.
struct Evaluation {
    double value = 0.0;
    std::vector<double> per_slot;
};

Evaluation evaluate(const Instance& instance, const Chooser& chooser);
double exact_value(const Instance& instance, PolicyId policy);

/// Canonical world key: slot, every flow-line field, and the draw cursors.
using StateKey = std::vector<int>;

/// Optimal choice per reachable (slot, state) with the channel ON.
struct DecisionTree {
    std::map<StateKey, int> choices;
};

/// Exact expectation of the policy encoded by a decision tree.
Evaluation evaluate(const Instance& instance, const DecisionTree& tree);

struct MaxResult {
    double value = 0.0;
    DecisionTree witness;
    std::size_t decision_points = 0;  // reachable (slot, state) nodes, channel ON, with >= 2 candidates
    double policy_count = 1.0;        // admissible policies: product of candidate counts over those nodes
};

/// Maximum over all deterministic, state-feedback, work-conserving policies.
/// With `reward_slot` > 0 only E[V_{reward_slot}] is maximized (unscaled).
MaxResult brute_force_max(const Instance& instance, int reward_slot = 0);

struct DominanceReport {
    std::string instance_digest;
    double hlfd_value = 0.0;
    double max_value = 0.0;
    bool dominant = false;
    bool per_slot_dominance = false;
    std::vector<std::pair<PolicyId, double>> policy_values;
    nlohmann::json counterexamples = nlohmann::json::array();
};

inline constexpr double kDominanceRelTol = 1e-9;

DominanceReport verify_dominance(const Instance& instance);

struct InstanceGenerator {
    int min_sensors = 2;
    int max_sensors = 3;
    int min_horizon = 4;
    int max_horizon = 7;
    std::vector<double> p_values{0.5, 0.8, 1.0};
    FlowLineDraws ranges;  // defaults: setup [1,25], window [1,20], reset [1,10]
};

Instance random_instance(std::mt19937_64& rng, const InstanceGenerator& gen);

/// Instance `i` of a batch, drawn from its own stream so batches can be
/// checked in parallel and any single instance regenerated on its own.
Instance batch_instance(std::uint64_t seed, int i, const InstanceGenerator& gen);

struct BatchReport {
    std::uint64_t seed = 0;
    int instances = 0;
    int violations = 0;           // objective-level
    int per_slot_violations = 0;  // instances with some slot where HLF-D is beaten
    std::vector<DominanceReport> reports;
};

/// verify_dominance over `count` batch instances on up to `jobs` threads.
BatchReport verify_batch(std::uint64_t seed, int count, const InstanceGenerator& gen, int jobs = 1);

nlohmann::json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DominanceReport& report);
nlohmann::json to_json(const BatchReport& report);
std::string digest(const Instance& instance);

}  // namespace aoisched
