#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tti/evalkit/evaluation.hpp"
#include "tti/inference/agent.hpp"
#include "tti/inference/compute_match.hpp"
#include "tti/inference/strategy.hpp"

#include <doctest.h>

#include <functional>

using namespace tti;
using namespace tti::inference;
using tti::testing::error_code_of;
using tti::testing::g3_lookup;
using tti::testing::make_g3;

namespace {

/// Picks the action returned by a script over (history, current observation).
class ScriptedAgent final : public Agent {
public:
    using Script = std::function<env::Action(const std::vector<env::Action>&, const env::Observation&)>;
    ScriptedAgent(const policy::ActionSpace& space, Script script) : space_(&space), script_(std::move(script)) {}

    policy::ActionDistribution distribution(const DecisionContext& ctx, double) const override {
        const std::vector<env::Action> history(ctx.history.begin(), ctx.history.end());
        return one_hot(space_->slot_of(script_(history, ctx.recent.back())), ctx.mask);
    }

private:
    const policy::ActionSpace* space_;
    Script script_;
};

struct G3 {
    env::WebGraph graph = make_g3();
    env::Task task = g3_lookup(graph);
    policy::ActionSpace space = policy::ActionSpace::for_graph(graph);
    policy::Encoder encoder{graph.vocabulary()};
};

} // namespace

TEST_CASE("strategies validate and describe themselves") {
    CHECK(describe(Plain{}) == "plain");
    CHECK(describe(CheckAgain{2}) == "check_again(2)");
    CHECK(describe(BestOfN{3}) == "best_of_n(3)");
    for (const InferenceStrategy& s : {InferenceStrategy{Plain{}}, InferenceStrategy{CheckAgain{2}},
                                       InferenceStrategy{BestOfN{5}}, InferenceStrategy{BudgetForce{3, 0.5}}}) {
        CHECK(strategy_from_json(to_json(s)) == s);
    }
    CHECK(error_code_of([] { validate(BestOfN{0}); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { validate(CheckAgain{-1}); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { validate(BudgetForce{0, 1.0}); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { strategy_from_json({{"kind", "beam"}}); }) == ErrorCode::ConfigError);
}

TEST_CASE("plain spends one query per step") {
    G3 w;
    const policy::PolicyParams zero(w.space, w.encoder.dim());
    const LinearAgent agent(zero);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 6, Plain{}, 1.0, seed);
        CHECK(r.ledger.policy_queries == r.trajectory.h_stop);
        CHECK(r.ledger.steps_taken == r.trajectory.h_stop);
        CHECK(r.trajectory.steps.size() == static_cast<std::size_t>(r.trajectory.h_stop));
    }
}

TEST_CASE("greedy best-of-n repeats the plain trajectory at n times the cost") {
    G3 w;
    policy::PolicyParams p(w.space, w.encoder.dim());
    Rng rng(4);
    for (double& x : p.weights) x = uniform01(rng) - 0.5;
    const LinearAgent agent(p);
    const auto plain = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 8, Plain{}, 0.0, 1);
    const auto bon = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 8, BestOfN{3}, 0.0, 1);
    REQUIRE(plain.trajectory.steps.size() == bon.trajectory.steps.size());
    for (std::size_t k = 0; k < plain.trajectory.steps.size(); ++k) {
        CHECK(plain.trajectory.steps[k].action == bon.trajectory.steps[k].action);
    }
    CHECK(bon.ledger.policy_queries == 3 * bon.trajectory.h_stop);
}

TEST_CASE("budget forcing spends k queries per step") {
    G3 w;
    const policy::PolicyParams zero(w.space, w.encoder.dim());
    const LinearAgent agent(zero);
    const auto r = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 6, BudgetForce{4, 0.5}, 1.0, 3);
    CHECK(r.ledger.policy_queries == 4 * r.trajectory.h_stop);
}

TEST_CASE("check-again lets the agent keep acting after an intercepted stop") {
    G3 w;
    const auto& v = w.graph.vocabulary();
    const ScriptedAgent agent(w.space, [&](const std::vector<env::Action>& h, const env::Observation& obs) -> env::Action {
        if (obs.recheck_pass == 0) return h.empty() ? env::Action{env::Click{0}} : env::Action{env::Stop{v.id("v00")}};
        switch (h.size()) {
        case 1: return env::Click{0};
        case 2: return env::GoBack{};
        default: return env::Stop{v.id("v01")};
        }
    });
    const auto r = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 10, CheckAgain{1}, 1.0, 0);
    CHECK(r.trajectory.h_stop == 4);
    CHECK(r.trajectory.final_answer == v.id("v01"));
    CHECK(r.ledger.rechecks_used == 1);
    CHECK(r.trajectory.answer_changes == 1);
    CHECK(r.trajectory.intercepted_answers == std::vector<env::TokenId>{v.id("v00")});
    CHECK(r.ledger.policy_queries == 5);
}

TEST_CASE("check-again stops intercepting once the budget is spent") {
    G3 w;
    const auto& v = w.graph.vocabulary();
    const ScriptedAgent agent(w.space, [&](const std::vector<env::Action>& h, const env::Observation&) -> env::Action {
        return h.empty() ? env::Action{env::Click{0}} : env::Action{env::Stop{v.id("v00")}};
    });
    const auto r = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 10, CheckAgain{2}, 1.0, 0);
    CHECK(r.trajectory.h_stop == 2);
    CHECK(r.ledger.rechecks_used == 2);
    CHECK(r.trajectory.answer_changes == 0);
    CHECK(r.ledger.policy_queries == 4);
}

TEST_CASE("identical seeds give identical rollouts") {
    G3 w;
    const policy::PolicyParams zero(w.space, w.encoder.dim());
    const LinearAgent agent(zero);
    auto run = [&] {
        return rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 6, CheckAgain{1}, 1.0, 9);
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.ledger == b.ledger);
    REQUIRE(a.trajectory.steps.size() == b.trajectory.steps.size());
    for (std::size_t k = 0; k < a.trajectory.steps.size(); ++k) {
        CHECK(a.trajectory.steps[k].action == b.trajectory.steps[k].action);
    }
}

TEST_CASE("gold path agent replays the certificate") {
    G3 w;
    const GoldPathAgent agent(w.space);
    const auto r = rollout_with_strategy(agent, w.encoder, w.space, w.graph, w.task, 5, Plain{}, 1.0, 0);
    REQUIRE(r.trajectory.steps.size() == w.task.certificate.size());
    for (std::size_t k = 0; k < w.task.certificate.size(); ++k) {
        CHECK(r.trajectory.steps[k].action == w.task.certificate[k]);
    }
    CHECK(r.trajectory.final_answer == w.task.correct_answer);
}

TEST_CASE("uniform policy success matches exhaustive enumeration on G3") {
    G3 w;
    auto [state, obs] = env::reset(w.graph, w.task, 3, 0);
    const double exact = tti::testing::uniform_policy_success(state, obs, w.space);
    CHECK(exact > 0.0);
    const policy::PolicyParams zero(w.space, w.encoder.dim());
    const LinearAgent agent(zero);
    std::vector<std::uint64_t> seeds(10000);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
    const auto run = evalkit::evaluate_policy(agent, w.encoder, w.space, w.graph, {w.task}, 3, Plain{}, seeds);
    CHECK(std::abs(run.metrics.success_rate - exact) <= 0.02);
}

TEST_CASE("compute matching sorts runs and rejects mismatched episodes") {
    G3 w;
    const policy::PolicyParams zero(w.space, w.encoder.dim());
    const LinearAgent agent(zero);
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    auto run = [&](const InferenceStrategy& s, const std::vector<std::uint64_t>& sd) {
        return evalkit::evaluate_policy(agent, w.encoder, w.space, w.graph, {w.task}, 6, s, sd);
    };
    const auto rows = compute_match({{"bon", 6, run(BestOfN{3}, seeds)}, {"plain", 6, run(Plain{}, seeds)}});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].label == "plain");
    CHECK(rows[0].mean_policy_queries <= rows[1].mean_policy_queries);
    CHECK(rows == compute_match({{"plain", 6, run(Plain{}, seeds)}, {"bon", 6, run(BestOfN{3}, seeds)}}));
    CHECK(error_code_of([&] {
              compute_match({{"a", 6, run(Plain{}, seeds)}, {"b", 6, run(Plain{}, {1, 2, 4})}});
          }) == ErrorCode::MismatchedRuns);
    CHECK(queries_matched(10.0, 9.1));
    CHECK_FALSE(queries_matched(10.0, 8.9));
    CHECK(compute_match_csv_row({"budget_force(2,0.8)", 30, 4.0, 0.5, 3.0, 10}).rfind("\"budget_force(2,0.8)\",", 0) == 0);
}
