#include "support/fixtures.hpp"
#include "tti/inference/agent.hpp"
#include "tti/policy/checkpoint.hpp"
#include "tti/trainer/replay_buffer.hpp"
#include "tti/trainer/schedule.hpp"
#include "tti/trainer/trainer.hpp"

#include <doctest.h>

#include <cmath>

using namespace tti;
using namespace tti::trainer;
using tti::testing::all_families;
using tti::testing::error_code_of;
using tti::testing::g3_lookup;
using tti::testing::make_g3;
using tti::testing::scratch_dir;
using tti::testing::slurp;
using tti::testing::small_world_config;

namespace {

std::vector<int> first_horizons(const CurriculumSchedule& s, int n) {
    std::vector<int> out;
    for (int i = 1; i <= n; ++i) out.push_back(get_schedule(i, s));
    return out;
}

Trajectory numbered(std::uint64_t id) {
    Trajectory t;
    t.task_id = id;
    t.success = true;
    return t;
}

struct SmallWorld {
    env::WebGraph graph = taskgen::generate_graph(small_world_config(), 5);
    std::vector<env::Task> tasks = taskgen::generate_tasks(graph, 30, all_families(), 5);
    std::vector<env::Task> train, test;
    World world{graph};

    SmallWorld() { std::tie(train, test) = taskgen::split(tasks, 0.2, 1); }
};

TrainConfig quick_config(std::uint64_t seed) {
    TrainConfig c;
    c.seed = seed;
    c.num_iterations = 2;
    c.rollout_size = 24;
    c.num_update_samples = 24;
    c.eval_episodes = 1;
    c.schedule = CurriculumSchedule::multiplicative(5, 10);
    c.eval_horizon = 10;
    return c;
}

} // namespace

TEST_CASE("horizon schedules produce their sequences") {
    CHECK(first_horizons(CurriculumSchedule::multiplicative(10, 30), 4) == std::vector<int>{10, 20, 30, 30});
    CHECK(first_horizons(CurriculumSchedule::additive(10, 30), 4) == std::vector<int>{10, 11, 12, 13});
    CHECK(first_horizons(CurriculumSchedule::additive(10, 12), 5) == std::vector<int>{10, 11, 12, 12, 12});
    CHECK(first_horizons(CurriculumSchedule::fixed(7), 3) == std::vector<int>{7, 7, 7});
    const auto list = CurriculumSchedule::explicit_list({10, 20, 20, 30, 30, 30});
    CHECK(get_schedule(2, list) == 20);
    CHECK(first_horizons(list, 8) == std::vector<int>{10, 20, 20, 30, 30, 30, 30, 30});
    CHECK(error_code_of([&] { get_schedule(0, list); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("schedules validate, describe and round-trip") {
    CHECK(error_code_of([] { CurriculumSchedule::multiplicative(0, 30).validate(); }) == ErrorCode::InvalidHorizon);
    CHECK(error_code_of([] { CurriculumSchedule::additive(20, 10).validate(); }) == ErrorCode::InvalidHorizon);
    CHECK(error_code_of([] { CurriculumSchedule::explicit_list({}).validate(); }) == ErrorCode::InvalidHorizon);
    CHECK(describe(CurriculumSchedule::multiplicative(10, 30)) == "multiplicative(10,30)");
    CHECK(describe(CurriculumSchedule::fixed(10)) == "fixed(10)");
    for (const auto& s : {CurriculumSchedule::fixed(4), CurriculumSchedule::additive(3, 9),
                          CurriculumSchedule::multiplicative(10, 30), CurriculumSchedule::explicit_list({5, 6})}) {
        CHECK(schedule_from_json(to_json(s)) == s);
    }
    CHECK(CurriculumSchedule::explicit_list({5, 40, 6}).max_horizon() == 40);
}

TEST_CASE("replay probabilities grow linearly with insertion order") {
    ReplayBuffer b;
    b.add({numbered(0)});
    CHECK(b.probabilities() == std::vector<double>{1.0});
    b.add({numbered(1), numbered(2), numbered(3)});
    const auto p = b.probabilities();
    REQUIRE(p.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(0.1 * static_cast<double>(k + 1)));
    CHECK(b.entries()[3].insertion_index == 4);
}

TEST_CASE("replay sampling frequencies match the weights") {
    ReplayBuffer b;
    b.add({numbered(0), numbered(1), numbered(2), numbered(3)});
    Rng rng(99);
    std::array<int, 4> counts{};
    const auto draws = b.sample(100000, rng);
    for (const auto& t : draws) ++counts[t.task_id];
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(counts[k] / 100000.0 - 0.1 * static_cast<double>(k + 1)) <= 0.01);
    }
}

TEST_CASE("replay capacity evicts the oldest and renumbers") {
    ReplayBuffer b(3);
    b.add({numbered(0), numbered(1)});
    b.add({numbered(2), numbered(3)});
    REQUIRE(b.size() == 3);
    CHECK(b.entries()[0].task_id == 1);
    CHECK(b.entries()[0].insertion_index == 1);
    CHECK(b.entries()[2].insertion_index == 3);
    ReplayBuffer empty;
    Rng rng(1);
    CHECK(error_code_of([&] { empty.sample(1, rng); }) == ErrorCode::EmptyBuffer);
    CHECK(error_code_of([&] { b.sample(0, rng); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("rollouts respect the horizon and are reproducible") {
    const env::WebGraph g = make_g3();
    const std::vector<env::Task> tasks{g3_lookup(g)};
    const World world(g);
    const policy::PolicyParams zero(world.space, world.encoder.dim());
    const inference::LinearAgent agent(zero);
    const auto a = collect_rollouts(agent, world, tasks, 4, 8, 11);
    REQUIRE(a.size() == 8);
    for (const auto& t : a) CHECK(t.h_stop <= 4);
    const auto b = collect_rollouts(agent, world, tasks, 4, 8, 11, 1.0, 3);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].seed == b[k].seed);
        CHECK(a[k].h_stop == b[k].h_stop);
        CHECK(a[k].final_answer == b[k].final_answer);
    }
}

TEST_CASE("gold rollouts reproduce the certificate") {
    const env::WebGraph g = make_g3();
    const std::vector<env::Task> tasks{g3_lookup(g)};
    const World world(g);
    const inference::GoldPathAgent gold(world.space);
    for (const auto& t : collect_rollouts(gold, world, tasks, 5, 6, 2)) {
        REQUIRE(t.steps.size() == tasks[0].certificate.size());
        for (std::size_t k = 0; k < t.steps.size(); ++k) CHECK(t.steps[k].action == tasks[0].certificate[k]);
    }
}

TEST_CASE("filtering keeps the accepted trajectories in order") {
    const env::WebGraph g = make_g3();
    const std::vector<env::Task> tasks{g3_lookup(g)};
    const auto good = tasks[0].correct_answer;
    std::vector<Trajectory> batch(3);
    batch[0].final_answer = good;
    batch[0].seed = 1;
    batch[2].final_answer = good;
    batch[2].seed = 3;
    const evalkit::Evaluator gt{};
    const auto kept = filter_successful(batch, tasks, gt);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].seed == 1);
    CHECK(kept[1].seed == 3);
    CHECK(batch[1].success == false);

    std::vector<Trajectory> none(2);
    CHECK(filter_successful(none, tasks, gt).empty());

    const evalkit::Evaluator perfect{evalkit::Evaluator::Kind::Noisy, {.accuracy = 1.0, .seed = 8}};
    std::vector<Trajectory> again(3);
    again[0].final_answer = good;
    again[2].final_answer = good;
    const auto kept2 = filter_successful(again, tasks, perfect);
    CHECK(kept2.size() == 2);
}

TEST_CASE("an update raises the likelihood of the cloned trajectory") {
    const env::WebGraph g = make_g3();
    const std::vector<env::Task> tasks{g3_lookup(g)};
    const World world(g);
    const inference::GoldPathAgent gold(world.space);
    auto batch = collect_rollouts(gold, world, tasks, 5, 1, 1);
    batch[0].success = true;

    policy::PolicyParams p(world.space, world.encoder.dim());
    const double before = batch_loss(p, batch);
    CHECK(before > 0.0);
    policy::OptimizerState st(policy::AdamConfig{}, p.weights.size());
    const UpdateReport r = train_iteration(p, st, batch, 1);
    CHECK(r.loss_before == doctest::Approx(before));
    CHECK(batch_loss(p, batch) < before);
    CHECK(r.loss_after == doctest::Approx(batch_loss(p, batch)));
    CHECK(r.optimizer_steps == 1);
    CHECK(r.steps == batch[0].steps.size());

    policy::PolicyParams q(world.space, world.encoder.dim());
    policy::OptimizerState frozen(policy::AdamConfig{.learning_rate = 0.0}, q.weights.size());
    train_iteration(q, frozen, batch, 3);
    CHECK(q == policy::PolicyParams(world.space, world.encoder.dim()));
}

TEST_CASE("batch loss is the mean per-step cross-entropy") {
    const env::WebGraph g = make_g3();
    const std::vector<env::Task> tasks{g3_lookup(g)};
    const World world(g);
    const inference::GoldPathAgent gold(world.space);
    auto batch = collect_rollouts(gold, world, tasks, 5, 2, 1);
    const policy::PolicyParams zero(world.space, world.encoder.dim());
    double total = 0.0;
    std::size_t steps = 0;
    for (const auto& t : batch) {
        for (const auto& s : t.steps) {
            const auto valid = std::count(s.mask.begin(), s.mask.end(), 1);
            total += std::log(static_cast<double>(valid));
            ++steps;
        }
    }
    CHECK(batch_loss(zero, batch) == doctest::Approx(total / static_cast<double>(steps)));
}

TEST_CASE("minibatches take one optimizer step each") {
    const env::WebGraph g = make_g3();
    const std::vector<env::Task> tasks{g3_lookup(g)};
    const World world(g);
    const inference::GoldPathAgent gold(world.space);
    auto batch = collect_rollouts(gold, world, tasks, 5, 5, 1);
    for (auto& t : batch) t.success = true;
    policy::PolicyParams p(world.space, world.encoder.dim());
    policy::OptimizerState st(policy::AdamConfig{}, p.weights.size());
    CHECK(train_iteration(p, st, batch, 2, 2).optimizer_steps == 6);
}

TEST_CASE("unfiltered trajectories are refused") {
    const env::WebGraph g = make_g3();
    const World world(g);
    policy::PolicyParams p(world.space, world.encoder.dim());
    policy::OptimizerState st(policy::AdamConfig{}, p.weights.size());
    std::vector<Trajectory> batch(1);
    CHECK(error_code_of([&] { train_iteration(p, st, batch, 1); }) == ErrorCode::UnfilteredTrajectory);
    batch[0].success = false;
    CHECK(error_code_of([&] { train_iteration(p, st, batch, 1); }) == ErrorCode::UnfilteredTrajectory);
}

TEST_CASE("train configs validate and round-trip") {
    TrainConfig c = quick_config(3);
    c.buffer_capacity = 100;
    const TrainConfig back = train_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    auto doc = to_json(c);
    doc.erase("seed");
    CHECK(error_code_of([&] { train_config_from_json(doc); }) == ErrorCode::ConfigError);
    c.rollout_size = 0;
    CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("a gold-initialized single iteration succeeds everywhere") {
    SmallWorld w;
    TrainConfig c = quick_config(1);
    c.num_iterations = 1;
    c.schedule = CurriculumSchedule::fixed(30);
    c.evaluator = evalkit::Evaluator{};
    RunOptions o;
    o.agent_factory = [&](const policy::PolicyParams&) {
        return std::make_unique<inference::GoldPathAgent>(w.world.space);
    };
    const RunResult r = run_tti(c, w.world, w.train, w.test, o);
    REQUIRE(r.reports.size() == 1);
    CHECK(r.reports[0].rollout_success_rate == 1.0);
    CHECK(r.reports[0].rollout_true_success_rate == 1.0);
    CHECK(r.reports[0].updated);
}

TEST_CASE("run_tti writes identical outputs for identical inputs") {
    SmallWorld w;
    const TrainConfig c = quick_config(7);
    auto run_into = [&](const std::string& name) {
        RunOptions o;
        o.output_dir = scratch_dir(name);
        o.header = {{"seed", 7}};
        return std::pair{run_tti(c, w.world, w.train, w.test, o), *o.output_dir};
    };
    const auto [ra, da] = run_into("run_a");
    const auto [rb, db] = run_into("run_b");
    CHECK(ra.params == rb.params);
    for (const char* f : {"checkpoint_iter_1.ckpt", "checkpoint_iter_2.ckpt", "rollouts_iter_1.jsonl",
                          "rollouts_iter_2.jsonl"}) {
        CHECK(slurp(da / f) == slurp(db / f));
    }
    REQUIRE(ra.reports.size() == 2);
    CHECK(ra.reports[0].horizon == 5);
    CHECK(ra.reports[1].horizon == 10);
    CHECK(ra.reports[0].eval.has_value());

    const std::string log = slurp(da / "rollouts_iter_1.jsonl");
    CHECK(std::count(log.begin(), log.end(), '\n') == c.rollout_size + 1);
    const auto ckpt = policy::load_checkpoint(da / "checkpoint_iter_2.ckpt", w.graph.vocabulary());
    CHECK(ckpt.params == ra.params);
    CHECK(ckpt.metadata.at("iteration") == 2);
}

TEST_CASE("worker count does not change the run") {
    SmallWorld w;
    TrainConfig c = quick_config(4);
    const RunResult a = run_tti(c, w.world, w.train, w.test);
    c.workers = 3;
    const RunResult b = run_tti(c, w.world, w.train, w.test);
    CHECK(a.params == b.params);
}

TEST_CASE("a perfect verifier trains exactly like ground truth") {
    SmallWorld w;
    TrainConfig c = quick_config(2);
    c.evaluator = evalkit::Evaluator{};
    const RunResult gt = run_tti(c, w.world, w.train, w.test);
    c.evaluator = {evalkit::Evaluator::Kind::Noisy, {.accuracy = 1.0, .seed = 5}};
    const RunResult noisy = run_tti(c, w.world, w.train, w.test);
    CHECK(gt.params == noisy.params);
}

TEST_CASE("an empty success set skips the update with a warning") {
    SmallWorld w;
    TrainConfig c = quick_config(2);
    c.num_iterations = 1;
    c.evaluator = {evalkit::Evaluator::Kind::Noisy, {.accuracy = 1.0, .seed = 1, .false_positive_rate = 0.0,
                                                     .false_negative_rate = 1.0}};
    std::vector<std::string> warnings;
    RunOptions o;
    o.warn = [&](const std::string& m) { warnings.push_back(m); };
    const RunResult r = run_tti(c, w.world, w.train, w.test, o);
    CHECK_FALSE(r.reports[0].updated);
    CHECK_FALSE(warnings.empty());
    CHECK(r.params == policy::PolicyParams(w.world.space, w.world.encoder.dim()));
}

TEST_CASE("overlapping train and eval tasks are rejected") {
    SmallWorld w;
    CHECK(error_code_of([&] { run_tti(quick_config(1), w.world, w.train, w.train); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("short-horizon training stops earlier than long-horizon training on multi-hop tasks") {
    taskgen::WorldConfig wc = small_world_config();
    wc.n_pages = 40;
    const env::WebGraph g = taskgen::generate_graph(wc, 2);
    const auto tasks = taskgen::generate_tasks(g, 60, {{env::TaskFamily::MultiHop, 1.0}}, 2);
    const auto [train, test] = taskgen::split(tasks, 0.2, 2);
    const World world(g);
    auto final_h_stop = [&](int h) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            TrainConfig c;
            c.seed = seed;
            c.num_iterations = 3;
            c.rollout_size = 64;
            c.num_update_samples = 64;
            c.schedule = CurriculumSchedule::fixed(h);
            c.eval_horizon = h;
            c.eval_episodes = 2;
            total += run_tti(c, world, train, test).reports.back().eval->mean_h_stop;
        }
        return total / 5.0;
    };
    CHECK(final_h_stop(5) < final_h_stop(20));
}

TEST_CASE("iteration rows follow the header") {
    IterationReport r;
    r.eval = evalkit::MetricsRecord{};
    const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(iteration_csv_header()) == count(iteration_csv_row(r)));
}
