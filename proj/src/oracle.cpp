#include "aoisched/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace aoisched {

void Instance::validate(const OracleBounds& bounds) const
{
    config.validate();
    const int M = config.num_sensors;
    const int T = config.horizon_T;
    if (M > bounds.max_sensors)
        throw std::invalid_argument("instance: M = " + std::to_string(M) + " exceeds the enumeration bound " +
                                    std::to_string(bounds.max_sensors));
    if (T > bounds.max_horizon)
        throw std::invalid_argument("instance: T = " + std::to_string(T) + " exceeds the enumeration bound " +
                                    std::to_string(bounds.max_horizon));
    if (static_cast<int>(initial.size()) != M || static_cast<int>(draws.size()) != M)
        throw std::invalid_argument("instance: need one initial state and one draw sequence per sensor");
    for (int i = 0; i < M; ++i) {
        const auto& d = draws[static_cast<std::size_t>(i)];
        if (static_cast<int>(d.setups.size()) < T || static_cast<int>(d.windows.size()) < T ||
            static_cast<int>(d.resets.size()) < T)
            throw std::invalid_argument("instance: sensor " + std::to_string(i + 1) +
                                        " has fewer than T pinned draws of some kind");
        for (int c : d.setups)
            if (c < 0)
                throw std::invalid_argument("instance: negative pinned setup time");
        for (int w : d.windows)
            if (w < 1 || w > config.draws.d_max)
                throw std::invalid_argument("instance: pinned window outside [1, d_max]");
        for (int r : d.resets)
            if (r < 1)
                throw std::invalid_argument("instance: pinned reset time below 1");
    }
    (void)make_world(initial);
}

namespace {

struct Node {
    WorldState world;
    PinnedDraws draws;
};

StateKey key_of(const Node& n)
{
    StateKey k;
    k.reserve(1 + n.world.flowlines.size() * 11 + n.draws.cursors().size());
    k.push_back(n.world.slot_t);
    for (const FlowLineState& s : n.world.flowlines) {
        k.push_back(static_cast<int>(s.mode));
        k.push_back(s.age_h);
        k.push_back(s.sample_index_k);
        k.push_back(s.attempt_xi);
        k.push_back(s.setup_c);
        k.push_back(s.window_W);
        k.push_back(s.window_W_original);
        k.push_back(s.cum_deadline_prev);
        k.push_back(s.attempt_latency_L);
        k.push_back(s.reset_RS);
        k.push_back(s.grace_count);
    }
    k.insert(k.end(), n.draws.cursors().begin(), n.draws.cursors().end());
    return k;
}

Node root_of(const Instance& inst) { return Node{make_world(inst.initial), PinnedDraws(inst.draws)}; }

double slot_reward(const Node& n, const EngineConfig& cfg)
{
    double v = 0.0;
    for (const SampleView& view : active_views(n.world, cfg.valuation()))
        v += cfg.weight(view.index) * view.utility;
    return v;
}

Node child_of(const Node& n, const EngineConfig& cfg, ChannelState ch, std::optional<int> choice)
{
    Node c = n;
    advance(c.world, cfg, ch, [choice](std::span<const SampleView>, ChannelState, int) { return choice; }, c.draws);
    return c;
}

std::vector<std::pair<ChannelState, double>> branches(const EngineConfig& cfg)
{
    std::vector<std::pair<ChannelState, double>> out;
    if (cfg.p_on > 0.0)
        out.emplace_back(ChannelState::On, cfg.p_on);
    if (cfg.p_on < 1.0)
        out.emplace_back(ChannelState::Off, 1.0 - cfg.p_on);
    return out;
}

double objective_scale(const EngineConfig& cfg)
{
    return cfg.k_const / (static_cast<double>(cfg.horizon_T) * cfg.num_sensors);
}

using NodeChooser = std::function<std::optional<int>(const Node&, std::span<const SampleView>)>;

Evaluation evaluate_nodes(const Instance& inst, const NodeChooser& choose)
{
    inst.validate();
    const EngineConfig& cfg = inst.config;
    Evaluation out;
    out.per_slot.assign(static_cast<std::size_t>(cfg.horizon_T), 0.0);

    std::map<StateKey, std::pair<double, Node>> layer;
    Node root = root_of(inst);
    layer.emplace(key_of(root), std::make_pair(1.0, std::move(root)));
    for (int t = 1; t <= cfg.horizon_T; ++t) {
        std::map<StateKey, std::pair<double, Node>> next;
        for (const auto& [key, entry] : layer) {
            const auto& [prob, node] = entry;
            out.per_slot[static_cast<std::size_t>(t - 1)] += prob * slot_reward(node, cfg);
            for (const auto& [ch, w] : branches(cfg)) {
                std::optional<int> choice;
                if (ch == ChannelState::On) {
                    const auto views = decision_views(node.world, cfg, ch);
                    if (!views.empty())
                        choice = choose(node, views);
                }
                Node c = child_of(node, cfg, ch, choice);
                StateKey ck = key_of(c);
                auto it = next.find(ck);
                if (it == next.end())
                    next.emplace(std::move(ck), std::make_pair(prob * w, std::move(c)));
                else
                    it->second.first += prob * w;
            }
        }
        layer = std::move(next);
    }
    double sum = 0.0;
    for (double v : out.per_slot)
        sum += v;
    out.value = objective_scale(cfg) * sum;
    return out;
}

class Solver {
public:
    Solver(const Instance& inst, int reward_slot) : inst_(inst), cfg_(inst.config), reward_slot_(reward_slot) {}

    double best(const Node& n)
    {
        const int t = n.world.slot_t;
        if (t > cfg_.horizon_T)
            return 0.0;
        StateKey key = key_of(n);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;

        double total = (reward_slot_ == 0 || reward_slot_ == t) ? slot_reward(n, cfg_) : 0.0;
        if (reward_slot_ == 0 || t < reward_slot_) {
            for (const auto& [ch, w] : branches(cfg_)) {
                const auto views = ch == ChannelState::On ? decision_views(n.world, cfg_, ch) : std::vector<SampleView>{};
                if (views.empty()) {
                    total += w * best(child_of(n, cfg_, ch, std::nullopt));
                    continue;
                }
                if (views.size() > 1) {
                    ++result_.decision_points;
                    result_.policy_count *= static_cast<double>(views.size());
                }
                double best_val = -std::numeric_limits<double>::infinity();
                int best_choice = views.front().index;
                for (const SampleView& v : views) {
                    const double val = best(child_of(n, cfg_, ch, v.index));
                    if (val > best_val) {
                        best_val = val;
                        best_choice = v.index;
                    }
                }
                result_.witness.choices[key] = best_choice;
                total += w * best_val;
            }
        }
        memo_.emplace(std::move(key), total);
        return total;
    }

    MaxResult finish(double root_value)
    {
        result_.value = reward_slot_ == 0 ? objective_scale(cfg_) * root_value : root_value;
        return std::move(result_);
    }

private:
    const Instance& inst_;
    const EngineConfig& cfg_;
    int reward_slot_;
    std::map<StateKey, double> memo_;
    MaxResult result_;
};

nlohmann::json node_json(const Node& n, const EngineConfig& cfg)
{
    nlohmann::json sensors = nlohmann::json::array();
    for (const FlowLineState& s : n.world.flowlines) {
        nlohmann::json j{{"sensor", s.index},     {"mode", std::string(to_string(s.mode))},
                         {"age", s.age_h},        {"attempt", s.attempt_xi},
                         {"latency", s.attempt_latency_L}, {"window", s.window_W}};
        if (s.mode == Mode::Active) {
            const SampleView v = make_view(s, cfg.valuation());
            j["laxity"] = v.laxity;
            j["utility"] = v.utility;
        }
        sensors.push_back(std::move(j));
    }
    return sensors;
}

// Every decision node reachable under `tree`, one entry per channel path.
void dump_tree(const Node& n, const Instance& inst, const DecisionTree& tree, std::string path, nlohmann::json& out)
{
    const EngineConfig& cfg = inst.config;
    if (n.world.slot_t > cfg.horizon_T)
        return;
    for (const auto& [ch, w] : branches(cfg)) {
        std::optional<int> choice;
        std::string next_path = path + (ch == ChannelState::On ? '1' : '0');
        if (ch == ChannelState::On) {
            const auto views = decision_views(n.world, cfg, ch);
            if (!views.empty()) {
                auto it = tree.choices.find(key_of(n));
                if (it == tree.choices.end())
                    continue;
                choice = it->second;
                out.push_back({{"slot", n.world.slot_t},
                               {"channel_path", next_path},
                               {"sensors", node_json(n, cfg)},
                               {"choice", *choice},
                               {"hlfd_choice", *select(PolicyId::HLFD, views, ch, n.world.slot_t).chosen}});
            }
        }
        dump_tree(child_of(n, cfg, ch, choice), inst, tree, next_path, out);
    }
}

bool within(double hlfd, double best)
{
    return hlfd >= best || best - hlfd <= kDominanceRelTol * std::abs(best);
}

}  // namespace

Evaluation evaluate(const Instance& instance, const Chooser& chooser)
{
    return evaluate_nodes(instance, [&](const Node& n, std::span<const SampleView> views) {
        return chooser(views, ChannelState::On, n.world.slot_t);
    });
}

Evaluation evaluate(const Instance& instance, const DecisionTree& tree)
{
    return evaluate_nodes(instance, [&](const Node& n, std::span<const SampleView>) -> std::optional<int> {
        auto it = tree.choices.find(key_of(n));
        if (it == tree.choices.end())
            throw std::logic_error("decision tree has no entry for a reachable state");
        return it->second;
    });
}

double exact_value(const Instance& instance, PolicyId policy)
{
    return evaluate(instance, policy_chooser(policy)).value;
}

MaxResult brute_force_max(const Instance& instance, int reward_slot)
{
    instance.validate();
    if (reward_slot < 0 || reward_slot > instance.config.horizon_T)
        throw std::invalid_argument("brute_force_max: reward slot outside [0, T]");
    Solver solver(instance, reward_slot);
    const double v = solver.best(root_of(instance));
    return solver.finish(v);
}

DominanceReport verify_dominance(const Instance& instance)
{
    DominanceReport rep;
    rep.instance_digest = digest(instance);
    const Evaluation hlfd = evaluate(instance, policy_chooser(PolicyId::HLFD));
    const MaxResult best = brute_force_max(instance);
    rep.hlfd_value = hlfd.value;
    rep.max_value = best.value;
    rep.dominant = within(hlfd.value, best.value);
    for (PolicyId p : kAllPolicies)
        rep.policy_values.emplace_back(p, p == PolicyId::HLFD ? hlfd.value : exact_value(instance, p));

    if (!rep.dominant) {
        nlohmann::json tree = nlohmann::json::array();
        dump_tree(root_of(instance), instance, best.witness, "", tree);
        rep.counterexamples.push_back({{"kind", "objective"},
                                       {"hlfd_value", hlfd.value},
                                       {"max_value", best.value},
                                       {"instance", to_json(instance)},
                                       {"witness", std::move(tree)}});
    }

    rep.per_slot_dominance = true;
    for (int t = 1; t <= instance.config.horizon_T; ++t) {
        const MaxResult slot_best = brute_force_max(instance, t);
        const double h = hlfd.per_slot[static_cast<std::size_t>(t - 1)];
        if (within(h, slot_best.value))
            continue;
        rep.per_slot_dominance = false;
        nlohmann::json tree = nlohmann::json::array();
        dump_tree(root_of(instance), instance, slot_best.witness, "", tree);
        rep.counterexamples.push_back({{"kind", "per_slot"},
                                       {"slot", t},
                                       {"hlfd_expected_v", h},
                                       {"max_expected_v", slot_best.value},
                                       {"instance", to_json(instance)},
                                       {"witness", std::move(tree)}});
    }
    return rep;
}

Instance random_instance(std::mt19937_64& rng, const InstanceGenerator& gen)
{
    gen.ranges.validate();
    if (gen.p_values.empty())
        throw std::invalid_argument("random_instance: no channel probabilities");
    auto uniform = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    Instance inst;
    inst.config.num_sensors = uniform(gen.min_sensors, gen.max_sensors);
    inst.config.horizon_T = uniform(gen.min_horizon, gen.max_horizon);
    inst.config.p_on = gen.p_values[static_cast<std::size_t>(uniform(0, static_cast<int>(gen.p_values.size()) - 1))];
    inst.config.draws = gen.ranges;
    const FlowLineDraws& r = gen.ranges;
    const int T = inst.config.horizon_T;
    for (int i = 1; i <= inst.config.num_sensors; ++i) {
        const int c = uniform(r.setup_range.lo, r.setup_range.hi);
        const int w = uniform(r.window_range.lo, r.window_range.hi);
        const int h = uniform(1, c + w);
        inst.initial.push_back(make_initial_state(i, c, w, h));
        PinnedDraws::Sequences seq;
        for (int k = 0; k < T; ++k) {
            seq.setups.push_back(uniform(r.setup_range.lo, r.setup_range.hi));
            seq.windows.push_back(uniform(r.window_range.lo, r.window_range.hi));
            seq.resets.push_back(uniform(r.reset_range.lo, r.reset_range.hi));
        }
        inst.draws.push_back(std::move(seq));
    }
    return inst;
}

Instance batch_instance(std::uint64_t seed, int i, const InstanceGenerator& gen)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), 0x0a11ce5u};
    std::mt19937_64 rng(seq);
    return random_instance(rng, gen);
}

BatchReport verify_batch(std::uint64_t seed, int count, const InstanceGenerator& gen, int jobs)
{
    if (count < 0)
        throw std::invalid_argument("verify_batch: negative instance count");
    BatchReport out;
    out.seed = seed;
    out.instances = count;
    out.reports.resize(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed.load()) {
            const int i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                out.reports[static_cast<std::size_t>(i)] = verify_dominance(batch_instance(seed, i, gen));
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, std::min(jobs, count)); ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
    for (const DominanceReport& r : out.reports) {
        out.violations += r.dominant ? 0 : 1;
        out.per_slot_violations += r.per_slot_dominance ? 0 : 1;
    }
    return out;
}

nlohmann::json to_json(const Instance& inst)
{
    const EngineConfig& c = inst.config;
    nlohmann::json initial = nlohmann::json::array();
    for (const FlowLineState& s : inst.initial)
        initial.push_back({{"index", s.index},
                           {"age_h", s.age_h},
                           {"sample_index_k", s.sample_index_k},
                           {"attempt_xi", s.attempt_xi},
                           {"setup_c", s.setup_c},
                           {"window_W", s.window_W},
                           {"window_W_original", s.window_W_original},
                           {"cum_deadline_prev", s.cum_deadline_prev},
                           {"attempt_latency_L", s.attempt_latency_L},
                           {"reset_RS", s.reset_RS},
                           {"grace_count", s.grace_count}});
    nlohmann::json draws = nlohmann::json::array();
    for (const auto& d : inst.draws)
        draws.push_back({{"setups", d.setups}, {"windows", d.windows}, {"resets", d.resets}});
    return {{"M", c.num_sensors},
            {"T", c.horizon_T},
            {"p_on", c.p_on},
            {"d_max", c.draws.d_max},
            {"setup_range", {c.draws.setup_range.lo, c.draws.setup_range.hi}},
            {"window_range", {c.draws.window_range.lo, c.draws.window_range.hi}},
            {"reset_range", {c.draws.reset_range.lo, c.draws.reset_range.hi}},
            {"k_const", c.k_const},
            {"beta", c.beta},
            {"gamma", c.gamma},
            {"alpha", c.alpha},
            {"initial", std::move(initial)},
            {"draws", std::move(draws)}};
}

Instance instance_from_json(const nlohmann::json& j)
{
    Instance inst;
    EngineConfig& c = inst.config;
    c.num_sensors = j.at("M").get<int>();
    c.horizon_T = j.at("T").get<int>();
    c.p_on = j.at("p_on").get<double>();
    c.draws.d_max = j.at("d_max").get<int>();
    auto range = [&j](const char* name) {
        const auto& a = j.at(name);
        return IntRange{a.at(0).get<int>(), a.at(1).get<int>()};
    };
    c.draws.setup_range = range("setup_range");
    c.draws.window_range = range("window_range");
    c.draws.reset_range = range("reset_range");
    c.k_const = j.at("k_const").get<double>();
    c.beta = j.at("beta").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.alpha = j.at("alpha").get<double>();
    for (const auto& s : j.at("initial")) {
        FlowLineState f;
        f.index = s.at("index").get<int>();
        f.age_h = s.at("age_h").get<int>();
        f.sample_index_k = s.at("sample_index_k").get<int>();
        f.attempt_xi = s.at("attempt_xi").get<int>();
        f.setup_c = s.at("setup_c").get<int>();
        f.window_W = s.at("window_W").get<int>();
        f.window_W_original = s.at("window_W_original").get<int>();
        f.cum_deadline_prev = s.at("cum_deadline_prev").get<int>();
        f.attempt_latency_L = s.at("attempt_latency_L").get<int>();
        f.reset_RS = s.at("reset_RS").get<int>();
        f.grace_count = s.at("grace_count").get<int>();
        f.mode = mode_of(f);
        inst.initial.push_back(f);
    }
    for (const auto& d : j.at("draws"))
        inst.draws.push_back({d.at("setups").get<std::vector<int>>(), d.at("windows").get<std::vector<int>>(),
                              d.at("resets").get<std::vector<int>>()});
    return inst;
}

std::string digest(const Instance& instance)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(instance).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json to_json(const DominanceReport& r)
{
    nlohmann::json values;
    for (const auto& [p, v] : r.policy_values)
        values[std::string(to_string(p))] = v;
    return {{"instance_digest", r.instance_digest},
            {"hlfd_value", r.hlfd_value},
            {"max_value", r.max_value},
            {"dominant", r.dominant},
            {"per_slot_dominance", r.per_slot_dominance},
            {"policy_values", std::move(values)},
            {"counterexamples", r.counterexamples}};
}

nlohmann::json to_json(const BatchReport& r)
{
    nlohmann::json reports = nlohmann::json::array();
    for (const DominanceReport& d : r.reports)
        reports.push_back(to_json(d));
    return {{"seed", r.seed},
            {"instances", r.instances},
            {"violations", r.violations},
            {"per_slot_violations", r.per_slot_violations},
            {"reports", std::move(reports)}};
}

}  // namespace aoisched
