#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "aoisched/oracle.hpp"

using namespace aoisched;

namespace {

Instance make_instance(double p, int T, std::vector<FlowLineState> init, std::vector<PinnedDraws::Sequences> draws)
{
    Instance inst;
    inst.config.num_sensors = static_cast<int>(init.size());
    inst.config.horizon_T = T;
    inst.config.p_on = p;
    inst.initial = std::move(init);
    inst.draws = std::move(draws);
    return inst;
}

PinnedDraws::Sequences constant(int setup, int window, int reset, int n = 8)
{
    return {std::vector<int>(static_cast<std::size_t>(n), setup), std::vector<int>(static_cast<std::size_t>(n), window),
            std::vector<int>(static_cast<std::size_t>(n), reset)};
}

double scale(const Instance& inst)
{
    return inst.config.k_const / (static_cast<double>(inst.config.horizon_T) * inst.config.num_sensors);
}

// Expectation by running the engine on every channel path.
double path_enumeration(const Instance& inst, PolicyId policy)
{
    double total = 0.0;
    for (const ChannelSeq& path : all_realizations(inst.config.horizon_T)) {
        const double w = realization_weight(path, inst.config.channel());
        if (w == 0.0)
            continue;
        PinnedDraws d(inst.draws);
        const Trace t = run_path(inst.config, policy_chooser(policy), inst.initial, d, path);
        total += w * t.utility_accumulator;
    }
    return scale(inst) * total;
}

struct NaiveNode {
    WorldState world;
    PinnedDraws draws;
};

// Unmemoized maximum over every work-conserving choice sequence.
double naive_max(const Instance& inst, const NaiveNode& n)
{
    const EngineConfig& c = inst.config;
    if (n.world.slot_t > c.horizon_T)
        return 0.0;
    double reward = 0.0;
    for (const FlowLineState& s : n.world.flowlines)
        if (s.mode == Mode::Active)
            reward += c.weight(s.index) * make_view(s, c.valuation()).utility;
    double future = 0.0;
    for (ChannelState ch : {ChannelState::On, ChannelState::Off}) {
        const double w = ch == ChannelState::On ? c.p_on : 1.0 - c.p_on;
        if (w == 0.0)
            continue;
        std::vector<std::optional<int>> options;
        if (ch == ChannelState::On)
            for (const SampleView& v : decision_views(n.world, c, ch))
                options.emplace_back(v.index);
        if (options.empty())
            options.emplace_back(std::nullopt);
        double best = -1e300;
        for (const auto& o : options) {
            NaiveNode child = n;
            advance(child.world, c, ch, [o](std::span<const SampleView>, ChannelState, int) { return o; }, child.draws);
            best = std::max(best, naive_max(inst, child));
        }
        future += w * best;
    }
    return reward + future;
}

double naive_max(const Instance& inst)
{
    return scale(inst) * naive_max(inst, NaiveNode{make_world(inst.initial), PinnedDraws(inst.draws)});
}

std::string state_text(const NaiveNode& n)
{
    std::ostringstream ss;
    ss << n.world.slot_t;
    for (const FlowLineState& s : n.world.flowlines)
        ss << '|' << static_cast<int>(s.mode) << ',' << s.age_h << ',' << s.sample_index_k << ',' << s.attempt_xi
           << ',' << s.setup_c << ',' << s.window_W << ',' << s.window_W_original << ',' << s.cum_deadline_prev << ','
           << s.attempt_latency_L << ',' << s.reset_RS << ',' << s.grace_count;
    for (int c : n.draws.cursors())
        ss << ';' << c;
    return ss.str();
}

// Distinct reachable states with the channel ON and at least two candidates.
void count_choices(const Instance& inst, const NaiveNode& n, std::set<std::string>& seen, std::size_t& points)
{
    const EngineConfig& c = inst.config;
    if (n.world.slot_t > c.horizon_T)
        return;
    for (ChannelState ch : {ChannelState::On, ChannelState::Off}) {
        if ((ch == ChannelState::On ? c.p_on : 1.0 - c.p_on) == 0.0)
            continue;
        std::vector<std::optional<int>> options;
        if (ch == ChannelState::On) {
            const auto views = decision_views(n.world, c, ch);
            for (const SampleView& v : views)
                options.emplace_back(v.index);
            if (views.size() > 1 && seen.insert(state_text(n)).second)
                ++points;
        }
        if (options.empty())
            options.emplace_back(std::nullopt);
        for (const auto& o : options) {
            NaiveNode child = n;
            advance(child.world, c, ch, [o](std::span<const SampleView>, ChannelState, int) { return o; }, child.draws);
            count_choices(inst, child, seen, points);
        }
    }
}

Instance shared_critical()
{
    // both samples critical at slot 1; long setups keep served sensors away
    return make_instance(1.0, 3, {make_initial_state(1, 0, 2, 2), make_initial_state(2, 0, 2, 2)},
                         {constant(25, 2, 3), constant(25, 2, 3)});
}

Instance fast_return()
{
    // sensor 1 is fresh and returns at once after service; sensor 2 has waited
    return make_instance(1.0, 3, {make_initial_state(1, 0, 5, 1), make_initial_state(2, 0, 10, 5)},
                         {constant(0, 5, 3), constant(25, 10, 3)});
}

}  // namespace

TEST_CASE("perfect channel: exact value is the single trace's utility")
{
    const Instance inst = fast_return();
    for (PolicyId p : kAllPolicies) {
        PinnedDraws d(inst.draws);
        const Trace t = run_path(inst.config, policy_chooser(p), inst.initial, d, ChannelSeq(3, ChannelState::On));
        CHECK(exact_value(inst, p) == doctest::Approx(scale(inst) * t.utility_accumulator).epsilon(1e-12));
    }
}

TEST_CASE("dead channel: exact value is the utility earned while waiting")
{
    Instance inst = make_instance(0.0, 3, {make_initial_state(1, 0, 2, 1)}, {constant(1, 2, 1)});
    // L = 0, 1, 2 with graces at slots 2 and 3
    CHECK(exact_value(inst, PolicyId::HLFD) == doctest::Approx((1.0 + 0.5 + 1.0 / 3) / 3));
}

TEST_CASE("two-slot coin-flip channel, one sensor")
{
    // slot 1: U = 1. ON: served, setup 2 keeps it asleep in slot 2. OFF: L = 1, U = 1/2.
    Instance inst = make_instance(0.5, 2, {make_initial_state(1, 0, 5, 1)}, {constant(2, 5, 1)});
    const double expected = 0.5 * (0.5 * (1.0 + 0.0) + 0.5 * (1.0 + 0.5));
    CHECK(exact_value(inst, PolicyId::HLFD) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(exact_value(inst, PolicyId::LLF) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("exact values agree with engine runs over every channel path")
{
    std::mt19937_64 rng(2024);
    InstanceGenerator gen;
    gen.min_sensors = 1;
    for (int k = 0; k < 25; ++k) {
        const Instance inst = random_instance(rng, gen);
        for (PolicyId p : kAllPolicies) {
            const double a = exact_value(inst, p);
            const double b = path_enumeration(inst, p);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
        }
    }
}

TEST_CASE("per-slot expectations sum to the objective")
{
    std::mt19937_64 rng(99);
    const Instance inst = random_instance(rng, InstanceGenerator{});
    const Evaluation e = evaluate(inst, policy_chooser(PolicyId::HLF));
    CHECK(e.per_slot.size() == static_cast<std::size_t>(inst.config.horizon_T));
    double sum = 0.0;
    for (double v : e.per_slot)
        sum += v;
    CHECK(e.value == doctest::Approx(scale(inst) * sum).epsilon(1e-14));
}

TEST_CASE("memoized maximum matches unmemoized enumeration")
{
    std::mt19937_64 rng(31337);
    InstanceGenerator gen;
    gen.min_sensors = 1;
    gen.max_horizon = 6;
    for (int k = 0; k < 30; ++k) {
        const Instance inst = random_instance(rng, gen);
        const MaxResult m = brute_force_max(inst);
        CHECK(m.value == doctest::Approx(naive_max(inst)).epsilon(1e-12));
        // the witness, replayed as a policy, attains the maximum
        CHECK(evaluate(inst, m.witness).value == doctest::Approx(m.value).epsilon(1e-12));
        for (PolicyId p : kAllPolicies)
            CHECK(m.value >= exact_value(inst, p) - 1e-12);
    }
}

TEST_CASE("decision points match an independent count")
{
    std::mt19937_64 rng(77);
    InstanceGenerator gen;
    gen.min_sensors = 1;
    gen.max_horizon = 5;
    gen.ranges.setup_range = {0, 3};
    gen.ranges.window_range = {1, 4};
    gen.ranges.reset_range = {1, 2};
    for (int k = 0; k < 20; ++k) {
        const Instance inst = random_instance(rng, gen);
        std::set<std::string> seen;
        std::size_t points = 0;
        count_choices(inst, NaiveNode{make_world(inst.initial), PinnedDraws(inst.draws)}, seen, points);
        CHECK(brute_force_max(inst).decision_points == points);
    }
}

TEST_CASE("a single sensor leaves exactly one admissible policy")
{
    Instance inst = make_instance(0.8, 6, {make_initial_state(1, 1, 3, 2)}, {constant(1, 3, 2)});
    const MaxResult m = brute_force_max(inst);
    CHECK(m.decision_points == 0);
    CHECK(m.policy_count == 1.0);
    for (PolicyId p : kAllPolicies)
        CHECK(m.value == doctest::Approx(exact_value(inst, p)).epsilon(1e-14));
}

TEST_CASE("maximum dominates a deadline-blind policy that drops")
{
    // sensor 1 critical with little latency, sensor 2 has waited longer
    Instance inst = make_instance(1.0, 4, {make_initial_state(1, 2, 2, 4), make_initial_state(2, 1, 10, 8)},
                                  {constant(3, 4, 2), constant(3, 4, 2)});
    const double hlf = exact_value(inst, PolicyId::HLF);
    const double best = brute_force_max(inst).value;
    CHECK(best >= hlf);
    CHECK(best > hlf + 1e-6);
}

TEST_CASE("shared critical slot on a perfect channel: HLF-D attains the maximum")
{
    const DominanceReport r = verify_dominance(shared_critical());
    CHECK(r.dominant);
    CHECK(r.hlfd_value == doctest::Approx(r.max_value).epsilon(1e-12));
    CHECK(r.counterexamples.empty());
    // slot 1: 1/2 + 1/2, slot 2: the graced sample at L = 2
    CHECK(r.hlfd_value == doctest::Approx((1.0 + 1.0 / 3) / 6).epsilon(1e-12));
}

TEST_CASE("no active sensors ever: trivially dominant")
{
    Instance inst = make_instance(0.5, 4, {make_initial_state(1, 20, 3, 1), make_initial_state(2, 20, 3, 2)},
                                  {constant(20, 3, 2), constant(20, 3, 2)});
    const DominanceReport r = verify_dominance(inst);
    CHECK(r.dominant);
    CHECK(r.per_slot_dominance);
    CHECK(r.hlfd_value == 0.0);
    CHECK(r.max_value == 0.0);
}

TEST_CASE("a fast-returning fresh sensor beats serving the stale one")
{
    // Serving the fresh sensor brings it straight back at U = 1, which is
    // worth more than clearing the stale sample first.
    const Instance inst = fast_return();
    const DominanceReport r = verify_dominance(inst);
    CHECK_FALSE(r.dominant);
    CHECK(r.max_value > r.hlfd_value);
    REQUIRE_FALSE(r.counterexamples.empty());
    const nlohmann::json& ce = r.counterexamples.front();
    CHECK(ce["kind"] == "objective");
    CHECK(ce.contains("instance"));
    CHECK_FALSE(ce["witness"].empty());
    bool differs = false;
    for (const auto& node : ce["witness"])
        differs = differs || node["choice"] != node["hlfd_choice"];
    CHECK(differs);
    CHECK(r.max_value == doctest::Approx(naive_max(inst)).epsilon(1e-12));
}

TEST_CASE("report JSON")
{
    const DominanceReport r = verify_dominance(shared_critical());
    const nlohmann::json j = to_json(r);
    for (const char* key : {"instance_digest", "hlfd_value", "max_value", "dominant", "per_slot_dominance",
                            "counterexamples", "policy_values"})
        CHECK(j.contains(key));
    CHECK(j["instance_digest"].get<std::string>().size() == 16);
}

TEST_CASE("instance JSON round trip keeps the digest")
{
    std::mt19937_64 rng(5);
    const Instance a = random_instance(rng, InstanceGenerator{});
    const Instance b = instance_from_json(nlohmann::json::parse(to_json(a).dump()));
    CHECK(digest(a) == digest(b));
    CHECK(exact_value(a, PolicyId::HLFD) == exact_value(b, PolicyId::HLFD));
}

TEST_CASE("bounds are enforced")
{
    Instance inst = make_instance(0.5, 9, {make_initial_state(1, 1, 3, 2)}, {constant(1, 3, 2, 12)});
    CHECK_THROWS_AS(exact_value(inst, PolicyId::HLFD), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_max(inst), std::invalid_argument);
    std::vector<FlowLineState> four;
    std::vector<PinnedDraws::Sequences> d;
    for (int i = 1; i <= 4; ++i) {
        four.push_back(make_initial_state(i, 1, 3, 2));
        d.push_back(constant(1, 3, 2));
    }
    CHECK_THROWS_AS(brute_force_max(make_instance(0.5, 4, four, d)), std::invalid_argument);
    Instance short_draws = make_instance(0.5, 5, {make_initial_state(1, 1, 3, 2)}, {constant(1, 3, 2, 2)});
    CHECK_THROWS_AS(short_draws.validate(), std::invalid_argument);
}

TEST_CASE("random instances respect the generator ranges")
{
    std::mt19937_64 rng(1);
    const InstanceGenerator gen;
    for (int k = 0; k < 100; ++k) {
        const Instance inst = random_instance(rng, gen);
        CHECK(inst.config.num_sensors >= 2);
        CHECK(inst.config.num_sensors <= 3);
        CHECK(inst.config.horizon_T >= 4);
        CHECK(inst.config.horizon_T <= 7);
        CHECK(std::find(gen.p_values.begin(), gen.p_values.end(), inst.config.p_on) != gen.p_values.end());
        CHECK_NOTHROW(inst.validate());
        for (const FlowLineState& s : inst.initial) {
            CHECK(s.mode != Mode::Hibernating);
            CHECK(gen.ranges.setup_range.contains(s.setup_c));
            CHECK(gen.ranges.window_range.contains(s.window_W));
        }
    }
}

TEST_CASE("batches are reproducible and independent of the thread count")
{
    InstanceGenerator gen;
    gen.max_horizon = 5;
    const BatchReport a = verify_batch(3, 12, gen, 1);
    const BatchReport b = verify_batch(3, 12, gen, 4);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(digest(batch_instance(3, 7, gen)) == a.reports[7].instance_digest);
}
