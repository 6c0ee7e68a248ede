#include "tti/inference/strategy.hpp"

#include "tti/core/error.hpp"

#include <cmath>
#include <string>

namespace tti::inference {

using nlohmann::json;

void validate(const InferenceStrategy& strategy) {
    std::visit(
        [](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, CheckAgain>) {
                if (s.max_rechecks < 1) throw Error(ErrorCode::InvalidArgument, "check_again needs max_rechecks >= 1");
            } else if constexpr (std::is_same_v<S, BestOfN>) {
                if (s.n < 3 || s.n % 2 == 0) throw Error(ErrorCode::InvalidArgument, "best_of_n needs odd n >= 3");
            } else if constexpr (std::is_same_v<S, BudgetForce>) {
                if (s.k < 2) throw Error(ErrorCode::InvalidArgument, "budget_force needs k >= 2");
                if (!(s.gamma > 0.0 && s.gamma <= 1.0))
                    throw Error(ErrorCode::InvalidArgument, "budget_force needs gamma in (0,1]");
            }
        },
        strategy);
}

std::string describe(const InferenceStrategy& strategy) {
    struct Visitor {
        std::string operator()(const Plain&) const { return "plain"; }
        std::string operator()(const CheckAgain& s) const { return "check_again(" + std::to_string(s.max_rechecks) + ")"; }
        std::string operator()(const BestOfN& s) const { return "best_of_n(" + std::to_string(s.n) + ")"; }
        std::string operator()(const BudgetForce& s) const {
            char buf[64];
            std::snprintf(buf, sizeof buf, "budget_force(%d,%g)", s.k, s.gamma);
            return buf;
        }
    };
    return std::visit(Visitor{}, strategy);
}

json to_json(const InferenceStrategy& strategy) {
    struct Visitor {
        json operator()(const Plain&) const { return {{"kind", "plain"}}; }
        json operator()(const CheckAgain& s) const { return {{"kind", "check_again"}, {"max_rechecks", s.max_rechecks}}; }
        json operator()(const BestOfN& s) const { return {{"kind", "best_of_n"}, {"n", s.n}}; }
        json operator()(const BudgetForce& s) const { return {{"kind", "budget_force"}, {"k", s.k}, {"gamma", s.gamma}}; }
    };
    return std::visit(Visitor{}, strategy);
}

InferenceStrategy strategy_from_json(const json& doc) {
    InferenceStrategy out;
    try {
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "plain") {
            out = Plain{};
        } else if (kind == "check_again") {
            out = CheckAgain{doc.at("max_rechecks").get<int>()};
        } else if (kind == "best_of_n") {
            out = BestOfN{doc.at("n").get<int>()};
        } else if (kind == "budget_force") {
            out = BudgetForce{doc.at("k").get<int>(), doc.value("gamma", 1.0)};
        } else {
            throw Error(ErrorCode::ConfigError, "unknown strategy kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("strategy: ") + e.what());
    }
    validate(out);
    return out;
}

namespace {

std::size_t draw(const policy::ActionDistribution& dist, double temperature, Rng& rng) {
    return temperature > 0.0 ? policy::sample_slot(dist, rng) : policy::argmax_slot(dist);
}

} // namespace

RolloutResult rollout_with_strategy(const Agent& agent, const policy::Encoder& encoder,
                                    const policy::ActionSpace& space, const env::WebGraph& graph,
                                    const env::Task& task, int horizon, const InferenceStrategy& strategy,
                                    double temperature, std::uint64_t seed) {
    validate(strategy);
    auto [state, first] = env::reset(graph, task, horizon, seed);
    Rng rng(derive_seed(seed, {task.task_id, 0x706f6c696379ULL}));
    const double base_temperature = temperature > 0.0 ? temperature : 1.0;

    RolloutResult result;
    trainer::Trajectory& traj = result.trajectory;
    traj.task_id = task.task_id;
    traj.seed = seed;
    traj.horizon = horizon;
    traj.strategy = describe(strategy);

    std::vector<env::Observation> recent{std::move(first)};
    std::vector<env::Action> history;
    int recheck_pass = 0;
    int pending_queries = 0;
    std::optional<env::TokenId> pending_answer;  // last intercepted Stop awaiting its successor

    auto note_answer = [&](env::TokenId answer) {
        if (pending_answer) {
            if (*pending_answer != answer) ++traj.answer_changes;
            pending_answer.reset();
        }
    };

    while (!state.terminated()) {
        const env::Observation& cur = recent.back();
        policy::FeatureVector features = encoder.encode(recent, history, horizon);
        policy::Mask mask = space.mask(cur);
        const DecisionContext ctx{recent, history, features, mask, horizon, task};

        std::size_t slot = 0;
        double log_prob = 0.0;
        int queries = 0;
        if (const auto* bon = std::get_if<BestOfN>(&strategy)) {
            const auto dist = agent.distribution(ctx, base_temperature);
            std::vector<int> votes(dist.probs.size(), 0);
            for (int i = 0; i < bon->n; ++i) ++votes[draw(dist, temperature, rng)];
            for (std::size_t s = 1; s < votes.size(); ++s) {
                if (votes[s] > votes[slot]) slot = s;
            }
            log_prob = std::log(dist.probs[slot]);
            queries = bon->n;
        } else if (const auto* bf = std::get_if<BudgetForce>(&strategy)) {
            double t = temperature;
            for (int i = 0; i < bf->k; ++i) {
                const auto dist = agent.distribution(ctx, t > 0.0 ? t : 1.0);
                slot = draw(dist, t, rng);
                log_prob = std::log(dist.probs[slot]);
                t *= bf->gamma;
            }
            queries = bf->k;
        } else {
            const auto dist = agent.distribution(ctx, base_temperature);
            slot = draw(dist, temperature, rng);
            log_prob = std::log(dist.probs[slot]);
            queries = 1;
        }

        const env::Action action = space.action_at(slot);
        if (const auto* stop = std::get_if<env::Stop>(&action)) {
            note_answer(stop->answer);
            if (const auto* ca = std::get_if<CheckAgain>(&strategy); ca && traj.rechecks_used < ca->max_rechecks) {
                // Intercepted at the prompt level: no environment step is taken.
                ++traj.rechecks_used;
                pending_queries += queries;
                pending_answer = stop->answer;
                traj.intercepted_answers.push_back(stop->answer);
                ++recheck_pass;
                recent.back() = state.observe(recheck_pass);
                continue;
            }
        }

        auto outcome = state.step(action);
        outcome.observation.recheck_pass = recheck_pass;
        traj.steps.push_back({cur, std::move(features), std::move(mask), action, slot, log_prob, queries + pending_queries});
        pending_queries = 0;
        history.push_back(action);
        recent.push_back(std::move(outcome.observation));
        if (recent.size() > 3) recent.erase(recent.begin());
    }

    traj.h_stop = *state.h_stop();
    traj.final_answer = state.final_answer();
    if (!traj.final_answer && !traj.intercepted_answers.empty()) {
        traj.final_answer = traj.intercepted_answers.back();
    }
    for (const auto& s : traj.steps) traj.compute_queries += s.queries;
    traj.compute_queries += pending_queries;

    result.ledger.policy_queries = traj.compute_queries;
    result.ledger.steps_taken = traj.h_stop;
    result.ledger.rechecks_used = traj.rechecks_used;
    return result;
}

} // namespace tti::inference
