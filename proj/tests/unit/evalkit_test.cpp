#include "support/fixtures.hpp"
#include "tti/evalkit/evaluation.hpp"
#include "tti/inference/agent.hpp"
#include "tti/trainer/trainer.hpp"

#include <doctest.h>

using namespace tti;
using namespace tti::evalkit;
using tti::testing::all_families;
using tti::testing::error_code_of;
using tti::testing::g3_lookup;
using tti::testing::make_g3;
using tti::testing::small_world_config;

namespace {

trainer::Trajectory ended_with(std::uint64_t task_id, std::optional<env::TokenId> answer, std::uint64_t seed = 0) {
    trainer::Trajectory t;
    t.task_id = task_id;
    t.seed = seed;
    t.horizon = 10;
    t.final_answer = answer;
    return t;
}

} // namespace

TEST_CASE("ground truth compares the final answer") {
    const env::WebGraph g = make_g3();
    const env::Task task = g3_lookup(g);
    CHECK(gt_evaluate(ended_with(0, task.correct_answer), task).success);
    CHECK_FALSE(gt_evaluate(ended_with(0, std::nullopt), task).success);
    CHECK_FALSE(gt_evaluate(ended_with(0, g.vocabulary().id("v00")), task).success);
    CHECK(error_code_of([&] { gt_evaluate(ended_with(3, task.correct_answer), task); }) == ErrorCode::TaskMismatch);
}

TEST_CASE("a perfect verifier agrees with ground truth") {
    const env::WebGraph g = make_g3();
    const env::Task task = g3_lookup(g);
    const NoisyVerifier perfect{.accuracy = 1.0, .seed = 3};
    for (std::uint64_t s = 0; s < 200; ++s) {
        for (auto answer : {std::optional<env::TokenId>{task.correct_answer}, std::optional<env::TokenId>{}}) {
            const auto t = ended_with(0, answer, s);
            CHECK(noisy_evaluate(perfect, t, task).success == gt_evaluate(t, task).success);
            CHECK(noisy_evaluate(perfect, t, task).source == VerdictSource::Noisy);
        }
    }
}

TEST_CASE("the noisy verifier agrees with ground truth at its accuracy") {
    const env::WebGraph g = make_g3();
    const env::Task task = g3_lookup(g);
    const NoisyVerifier v{.accuracy = 0.889, .seed = 17};
    int agree = 0;
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
        const auto t = ended_with(0, s % 2 ? std::optional<env::TokenId>{task.correct_answer} : std::nullopt,
                                  static_cast<std::uint64_t>(s));
        agree += noisy_evaluate(v, t, task).success == gt_evaluate(t, task).success;
        CHECK(noisy_evaluate(v, t, task) == noisy_evaluate(v, t, task));
    }
    CHECK(std::abs(agree / static_cast<double>(n) - 0.889) <= 0.01);
}

TEST_CASE("class-conditional error rates override the symmetric flip") {
    const env::WebGraph g = make_g3();
    const env::Task task = g3_lookup(g);
    const NoisyVerifier v{.accuracy = 1.0, .seed = 1, .false_positive_rate = 1.0, .false_negative_rate = 0.0};
    for (std::uint64_t s = 0; s < 50; ++s) {
        CHECK(noisy_evaluate(v, ended_with(0, std::nullopt, s), task).success);
        CHECK(noisy_evaluate(v, ended_with(0, task.correct_answer, s), task).success);
    }
    CHECK(error_code_of([] { NoisyVerifier{.accuracy = 0.3}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("evaluators round-trip through json") {
    Evaluator e{Evaluator::Kind::Noisy, {.accuracy = 0.9, .seed = 4}};
    const Evaluator back = evaluator_from_json(to_json(e));
    CHECK(back.kind == Evaluator::Kind::Noisy);
    CHECK(back.verifier.accuracy == 0.9);
    CHECK(back.verifier.seed == 4);
    CHECK(evaluator_from_json({{"kind", "ground_truth"}}).kind == Evaluator::Kind::GroundTruth);
}

TEST_CASE("aggregate averages episodes and action rates") {
    EpisodeSummary a{.task_id = 0, .family = env::TaskFamily::Lookup, .success = true, .h_stop = 2,
                     .policy_queries = 2, .action_counts = {1, 0, 0, 0, 1}};
    EpisodeSummary b{.task_id = 1, .family = env::TaskFamily::Compare, .success = false, .h_stop = 4,
                     .policy_queries = 6, .rechecks_used = 1, .answer_changes = 1, .action_counts = {2, 1, 1, 0, 0}};
    const MetricsRecord m = aggregate({a, b}, {7});
    CHECK(m.success_rate == 0.5);
    CHECK(m.mean_h_stop == 3.0);
    CHECK(m.mean_policy_queries == 4.0);
    CHECK(m.rate(env::ActionKind::Click) == doctest::Approx(0.5));
    CHECK(m.rate(env::ActionKind::GoBack) == doctest::Approx(1.0 / 6.0));
    CHECK(m.family_success.at(env::TaskFamily::Lookup) == 1.0);
    CHECK(m.family_success.at(env::TaskFamily::Compare) == 0.0);
    CHECK(m.rechecks == 1);
    CHECK(m.recheck_change_rate == 1.0);
    CHECK(m.episodes == 2);
}

TEST_CASE("the gold path solves every task in as many steps as its certificate") {
    const env::WebGraph g = taskgen::generate_graph(small_world_config(), 3);
    const auto tasks = taskgen::generate_tasks(g, 30, all_families(), 3);
    const trainer::World world(g);
    const inference::GoldPathAgent gold(world.space);
    auto quiet = tasks;
    for (auto& t : quiet) t.popups = false;
    const auto run = evaluate_policy(gold, world.encoder, world.space, g, quiet, 30, inference::Plain{}, {1, 2});
    CHECK(run.metrics.success_rate == 1.0);
    double mean_cert = 0.0;
    for (const auto& t : quiet) mean_cert += t.certificate_len;
    CHECK(run.metrics.mean_h_stop == doctest::Approx(mean_cert / static_cast<double>(quiet.size())));
    // With pop-ups on it still succeeds, spending extra GoBacks.
    CHECK(evaluate_policy(gold, world.encoder, world.space, g, tasks, 30, inference::Plain{}, {1, 2})
              .metrics.success_rate == 1.0);
}

TEST_CASE("evaluation is deterministic and independent of worker count") {
    const env::WebGraph g = taskgen::generate_graph(small_world_config(), 3);
    const auto tasks = taskgen::generate_tasks(g, 12, all_families(), 3);
    const trainer::World world(g);
    const policy::PolicyParams zero(world.space, world.encoder.dim());
    const inference::LinearAgent agent(zero);
    const auto a = evaluate_policy(agent, world.encoder, world.space, g, tasks, 10, inference::CheckAgain{1}, {1, 2, 3});
    const auto b = evaluate_policy(agent, world.encoder, world.space, g, tasks, 10, inference::CheckAgain{1}, {1, 2, 3},
                                   {.temperature = 1.0, .workers = 3});
    CHECK(a.metrics == b.metrics);
    CHECK(a.episodes == b.episodes);
    CHECK(error_code_of([&] {
              evaluate_policy(agent, world.encoder, world.space, g, {}, 10, inference::Plain{}, {1});
          }) == ErrorCode::InvalidArgument);
}

TEST_CASE("metrics rows follow the header") {
    const MetricsRecord m = aggregate({EpisodeSummary{.success = true, .h_stop = 1, .action_counts = {0, 0, 0, 0, 1}}}, {1});
    const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(metrics_csv_header()) == count(metrics_csv_row("plain", m)));
    CHECK(metrics_to_json(m).at("success_rate") == 1.0);
}
