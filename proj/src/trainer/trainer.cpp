#include "tti/trainer/trainer.hpp"

#include "tti/core/error.hpp"
#include "tti/core/parallel.hpp"
#include "tti/core/rng.hpp"
#include "tti/inference/strategy.hpp"
#include "tti/policy/checkpoint.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tti::trainer {

using nlohmann::json;

namespace {

// Stream tags for seed derivation.
constexpr std::uint64_t kCollectStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kEvalStream = 3;
constexpr std::uint64_t kTaskDrawStream = 4;

std::unordered_map<std::uint64_t, const env::Task*> index_tasks(const std::vector<env::Task>& tasks) {
    std::unordered_map<std::uint64_t, const env::Task*> out;
    for (const auto& t : tasks) out.emplace(t.task_id, &t);
    return out;
}

const env::Task& lookup(const std::unordered_map<std::uint64_t, const env::Task*>& index, std::uint64_t id) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::TaskMismatch, "no task with id " + std::to_string(id));
    return *it->second;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

} // namespace

evalkit::Evaluator TrainConfig::default_evaluator() {
    evalkit::Evaluator e;
    e.kind = evalkit::Evaluator::Kind::Noisy;
    e.verifier.accuracy = 0.889;
    return e;
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::ConfigError, what);
    };
    require(num_iterations >= 1, "num_iterations must be >= 1");
    require(rollout_size >= 1, "rollout_size must be >= 1");
    require(num_update_samples >= 1, "num_update_samples must be >= 1");
    require(actor_epochs >= 1, "actor_epochs must be >= 1");
    require(learning_rate >= 0.0, "learning_rate must be >= 0");
    require(weight_decay >= 0.0, "weight_decay must be >= 0");
    require(minibatch_size >= 0, "minibatch_size must be >= 0");
    require(eval_horizon >= 1, "eval_horizon must be >= 1");
    require(eval_episodes >= 0, "eval_episodes must be >= 0");
    require(temperature >= 0.0, "temperature must be >= 0");
    require(eval_temperature >= 0.0, "eval_temperature must be >= 0");
    require(!buffer_capacity || *buffer_capacity >= 1, "buffer_capacity must be >= 1");
    try {
        schedule.validate();
        evaluator.verifier.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

json to_json(const TrainConfig& c) {
    json j{{"num_iterations", c.num_iterations},
           {"rollout_size", c.rollout_size},
           {"num_update_samples", c.num_update_samples},
           {"actor_epochs", c.actor_epochs},
           {"learning_rate", c.learning_rate},
           {"weight_decay", c.weight_decay},
           {"minibatch_size", c.minibatch_size},
           {"eval_horizon", c.eval_horizon},
           {"eval_episodes", c.eval_episodes},
           {"temperature", c.temperature},
           {"eval_temperature", c.eval_temperature},
           {"seed", c.seed},
           {"schedule", to_json(c.schedule)},
           {"evaluator", evalkit::to_json(c.evaluator)},
           {"workers", c.workers}};
    if (c.buffer_capacity) j["buffer_capacity"] = *c.buffer_capacity;
    return j;
}

TrainConfig train_config_from_json(const json& doc) {
    TrainConfig c;
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "train config must be an object");
    if (!doc.contains("seed")) throw Error(ErrorCode::ConfigError, "seed is mandatory");
    try {
        c.seed = doc.at("seed").get<std::uint64_t>();
        c.num_iterations = doc.value("num_iterations", c.num_iterations);
        c.rollout_size = doc.value("rollout_size", c.rollout_size);
        c.num_update_samples = doc.value("num_update_samples", c.num_update_samples);
        c.actor_epochs = doc.value("actor_epochs", c.actor_epochs);
        c.learning_rate = doc.value("learning_rate", c.learning_rate);
        c.weight_decay = doc.value("weight_decay", c.weight_decay);
        c.minibatch_size = doc.value("minibatch_size", c.minibatch_size);
        c.eval_horizon = doc.value("eval_horizon", c.eval_horizon);
        c.eval_episodes = doc.value("eval_episodes", c.eval_episodes);
        c.temperature = doc.value("temperature", c.temperature);
        c.eval_temperature = doc.value("eval_temperature", c.eval_temperature);
        c.workers = doc.value("workers", c.workers);
        if (doc.contains("schedule")) c.schedule = schedule_from_json(doc["schedule"]);
        if (doc.contains("evaluator")) c.evaluator = evalkit::evaluator_from_json(doc["evaluator"]);
        if (doc.contains("buffer_capacity") && !doc["buffer_capacity"].is_null()) {
            c.buffer_capacity = doc["buffer_capacity"].get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("train config: ") + e.what());
    }
    c.validate();
    return c;
}

World::World(const env::WebGraph& g, std::size_t feature_dim)
    : graph(&g), space(policy::ActionSpace::for_graph(g)), encoder(g.vocabulary(), feature_dim) {}

std::vector<Trajectory> collect_rollouts(const inference::Agent& agent, const World& world,
                                         const std::vector<env::Task>& tasks, int horizon, int rollout_size,
                                         std::uint64_t seed, double temperature, std::size_t workers) {
    if (tasks.empty()) throw Error(ErrorCode::TooFewTasks, "collect_rollouts needs at least one task");
    if (rollout_size < 1) throw Error(ErrorCode::InvalidArgument, "rollout_size must be >= 1");
    const auto n = static_cast<std::size_t>(rollout_size);
    std::vector<std::size_t> picks(n);
    Rng task_rng(derive_seed(seed, {kTaskDrawStream}));
    for (auto& p : picks) p = uniform_index(task_rng, tasks.size());

    std::vector<Trajectory> out(n);
    parallel_for(n, workers, [&](std::size_t r) {
        out[r] = inference::rollout_with_strategy(agent, world.encoder, world.space, *world.graph, tasks[picks[r]],
                                                  horizon, inference::Plain{}, temperature, derive_seed(seed, {r}))
                     .trajectory;
    });
    return out;
}

std::vector<Trajectory> filter_successful(std::vector<Trajectory>& trajectories, const std::vector<env::Task>& tasks,
                                          const evalkit::Evaluator& evaluator) {
    const auto index = index_tasks(tasks);
    std::vector<Trajectory> kept;
    for (auto& t : trajectories) {
        t.success = evaluator.evaluate(t, lookup(index, t.task_id)).success;
        if (*t.success) kept.push_back(t);
    }
    return kept;
}

double batch_loss(const policy::PolicyParams& params, const std::vector<Trajectory>& batch) {
    double total = 0.0;
    std::size_t steps = 0;
    for (const auto& t : batch) {
        for (const auto& s : t.steps) {
            const auto dist = policy::action_distribution(params, s.features, s.mask);
            total -= std::log(dist.probs[s.action_slot]);
            ++steps;
        }
    }
    return steps ? total / static_cast<double>(steps) : 0.0;
}

UpdateReport train_iteration(policy::PolicyParams& params, policy::OptimizerState& state,
                             const std::vector<Trajectory>& batch, int actor_epochs, int minibatch_size) {
    for (const auto& t : batch) {
        if (t.success != true) {
            throw Error(ErrorCode::UnfilteredTrajectory,
                        "trajectory for task " + std::to_string(t.task_id) + " is not marked successful");
        }
    }
    if (actor_epochs < 1) throw Error(ErrorCode::InvalidArgument, "actor_epochs must be >= 1");
    UpdateReport report;
    report.loss_before = batch_loss(params, batch);
    for (const auto& t : batch) report.steps += t.steps.size();
    if (report.steps == 0) {
        report.loss_after = report.loss_before;
        return report;
    }
    const std::size_t chunk = minibatch_size > 0 ? static_cast<std::size_t>(minibatch_size) : batch.size();
    std::vector<double> grad(params.weights.size());
    for (int epoch = 0; epoch < actor_epochs; ++epoch) {
        for (std::size_t begin = 0; begin < batch.size(); begin += chunk) {
            const std::size_t end = std::min(batch.size(), begin + chunk);
            std::size_t steps = 0;
            for (std::size_t i = begin; i < end; ++i) steps += batch[i].steps.size();
            if (steps == 0) continue;
            std::fill(grad.begin(), grad.end(), 0.0);
            const double scale = 1.0 / static_cast<double>(steps);
            for (std::size_t i = begin; i < end; ++i) {
                for (const auto& s : batch[i].steps) {
                    policy::accumulate_nll_gradient(params, s.features, s.action_slot, s.mask, scale, grad);
                }
            }
            policy::apply_update(params, state, grad);
            ++report.optimizer_steps;
        }
    }
    report.loss_after = batch_loss(params, batch);
    return report;
}

std::vector<std::uint64_t> eval_seeds(const TrainConfig& config) {
    std::vector<std::uint64_t> seeds;
    for (int j = 0; j < config.eval_episodes; ++j) {
        seeds.push_back(derive_seed(config.seed, {kEvalStream, static_cast<std::uint64_t>(j)}));
    }
    return seeds;
}

json trajectory_to_json(const Trajectory& t, const env::Vocabulary& vocab) {
    json actions = json::array();
    for (const auto& s : t.steps) actions.push_back(env::format_action(s.action, vocab));
    json j{{"task_id", t.task_id},
           {"seed", t.seed},
           {"horizon", t.horizon},
           {"strategy", t.strategy},
           {"actions", std::move(actions)},
           {"h_stop", t.h_stop},
           {"answer", t.final_answer ? json(vocab.text(*t.final_answer)) : json(nullptr)},
           {"success", t.success ? json(*t.success) : json(nullptr)},
           {"compute_queries", t.compute_queries}};
    return j;
}

std::string iteration_csv_header() {
    return "iteration,horizon,rollout_success_rate,rollout_true_success_rate,filtered_count,mean_h_stop,"
           "click_rate,scroll_rate,back_rate,search_rate,stop_rate,updated,loss_before,loss_after,buffer_size,"
           "eval_success_rate,eval_mean_h_stop,eval_back_rate,eval_search_rate,wall_time_s";
}

std::string iteration_csv_row(const IterationReport& r) {
    std::ostringstream out;
    out.precision(10);
    out << r.iteration << ',' << r.horizon << ',' << r.rollout_success_rate << ',' << r.rollout_true_success_rate
        << ',' << r.filtered_count << ',' << r.mean_h_stop;
    for (double f : r.action_frequencies) out << ',' << f;
    out << ',' << (r.updated ? 1 : 0) << ',' << r.loss_before << ',' << r.loss_after << ',' << r.buffer_size;
    if (r.eval) {
        out << ',' << r.eval->success_rate << ',' << r.eval->mean_h_stop << ','
            << r.eval->rate(env::ActionKind::GoBack) << ',' << r.eval->rate(env::ActionKind::Search);
    } else {
        out << ",,,,";
    }
    out << ',' << r.wall_time_s;
    return out.str();
}

RunResult run_tti(const TrainConfig& config, const World& world, const std::vector<env::Task>& train_tasks,
                  const std::vector<env::Task>& eval_tasks, const RunOptions& options) {
    config.validate();
    if (train_tasks.empty()) throw Error(ErrorCode::TooFewTasks, "run_tti needs training tasks");
    {
        std::unordered_set<std::uint64_t> train_ids;
        for (const auto& t : train_tasks) train_ids.insert(t.task_id);
        for (const auto& t : eval_tasks) {
            if (train_ids.contains(t.task_id)) {
                throw Error(ErrorCode::InvalidArgument,
                            "task " + std::to_string(t.task_id) + " is in both train and eval sets");
            }
        }
    }
    const env::WebGraph& graph = *world.graph;
    auto warn = options.warn ? options.warn : [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    auto make_agent = options.agent_factory ? options.agent_factory : [](const policy::PolicyParams& p) {
        return std::unique_ptr<inference::Agent>(std::make_unique<inference::LinearAgent>(p));
    };

    RunResult result;
    result.params = options.initial_params ? *options.initial_params
                                           : policy::PolicyParams(world.space, world.encoder.dim());
    if (result.params.layout != world.space || result.params.feature_dim != world.encoder.dim()) {
        throw Error(ErrorCode::ShapeMismatch, "initial parameters do not match the world");
    }
    policy::AdamConfig adam;
    adam.learning_rate = config.learning_rate;
    adam.weight_decay = config.weight_decay;
    policy::OptimizerState optimizer(adam, result.params.weights.size());
    ReplayBuffer buffer(config.buffer_capacity);
    const auto seeds = eval_seeds(config);

    std::ofstream csv;
    json header = options.header;
    header["seed"] = config.seed;
    if (options.output_dir) {
        std::filesystem::create_directories(*options.output_dir);
        csv = open_output(*options.output_dir / "iterations.csv");
        csv << "# " << header.dump() << '\n' << iteration_csv_header() << '\n';
    }

    for (int i = 1; i <= config.num_iterations; ++i) {
        const auto started = std::chrono::steady_clock::now();
        IterationReport report;
        report.iteration = i;
        report.horizon = get_schedule(i, config.schedule);

        auto agent = make_agent(result.params);
        auto rollouts = collect_rollouts(*agent, world, train_tasks, report.horizon, config.rollout_size,
                                         derive_seed(config.seed, {kCollectStream, static_cast<std::uint64_t>(i)}),
                                         config.temperature, config.workers);
        auto kept = filter_successful(rollouts, train_tasks, config.evaluator);

        const auto index = index_tasks(train_tasks);
        double h_total = 0.0;
        double truly = 0.0;
        double actions = 0.0;
        for (const auto& t : rollouts) {
            h_total += t.h_stop;
            truly += evalkit::gt_evaluate(t, lookup(index, t.task_id)).success ? 1.0 : 0.0;
            for (const auto& s : t.steps) {
                report.action_frequencies[static_cast<std::size_t>(env::kind_of(s.action))] += 1.0;
                actions += 1.0;
            }
        }
        if (actions > 0.0) {
            for (double& f : report.action_frequencies) f /= actions;
        }
        const auto n = static_cast<double>(rollouts.size());
        report.mean_h_stop = h_total / n;
        report.rollout_true_success_rate = truly / n;
        report.filtered_count = kept.size();
        report.rollout_success_rate = static_cast<double>(kept.size()) / n;

        if (kept.empty()) {
            warn("iteration " + std::to_string(i) + ": no successful rollouts");
        }
        buffer.add(std::move(kept));
        report.buffer_size = buffer.size();
        if (!buffer.empty()) {
            Rng sample_rng(derive_seed(config.seed, {kSampleStream, static_cast<std::uint64_t>(i)}));
            const auto batch = buffer.sample(static_cast<std::size_t>(config.num_update_samples), sample_rng);
            const auto update =
                train_iteration(result.params, optimizer, batch, config.actor_epochs, config.minibatch_size);
            report.updated = true;
            report.loss_before = update.loss_before;
            report.loss_after = update.loss_after;
        } else {
            warn("iteration " + std::to_string(i) + ": replay buffer empty, skipping update");
        }

        if (!eval_tasks.empty() && !seeds.empty()) {
            const inference::LinearAgent eval_agent(result.params);
            report.eval = evalkit::evaluate_policy(eval_agent, world.encoder, world.space, graph, eval_tasks,
                                                   config.eval_horizon, inference::Plain{}, seeds,
                                                   {config.eval_temperature, config.workers})
                              .metrics;
        }

        if (options.output_dir) {
            json meta = header;
            meta["iteration"] = i;
            meta["horizon"] = report.horizon;
            policy::save_checkpoint(*options.output_dir / ("checkpoint_iter_" + std::to_string(i) + ".ckpt"),
                                    result.params, graph.vocabulary(), meta);
            auto log = open_output(*options.output_dir / ("rollouts_iter_" + std::to_string(i) + ".jsonl"));
            log << json{{"header", meta}}.dump() << '\n';
            for (const auto& t : rollouts) log << trajectory_to_json(t, graph.vocabulary()).dump() << '\n';
            if (!log) throw Error(ErrorCode::Io, "failed writing rollout log");
        }
        report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (csv.is_open()) csv << iteration_csv_row(report) << '\n' << std::flush;
        result.reports.push_back(std::move(report));
    }
    return result;
}

} // namespace tti::trainer
