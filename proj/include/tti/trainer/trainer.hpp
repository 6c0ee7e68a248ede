#pragma once

#include "tti/env/task.hpp"
#include "tti/env/webgraph.hpp"
#include "tti/evalkit/evaluation.hpp"
#include "tti/inference/agent.hpp"
#include "tti/policy/policy.hpp"
#include "tti/trainer/replay_buffer.hpp"
#include "tti/trainer/schedule.hpp"
#include "tti/trainer/trajectory.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tti::trainer {

struct TrainConfig {
    int num_iterations = 10;
    int rollout_size = 256;
    int num_update_samples = 256;
    int actor_epochs = 1;
    double learning_rate = 0.05;
    double weight_decay = 0.0;
    /// Trajectories per optimizer step; 0 means the whole sampled batch.
    int minibatch_size = 0;
    int eval_horizon = 30;
    /// Evaluation episodes per eval task after each iteration; 0 disables it.
    int eval_episodes = 1;
    /// Sampling temperature for rollouts; 0 is greedy.
    double temperature = 1.0;
    /// Sampling temperature for the per-iteration evaluation.
    double eval_temperature = 1.0;
    std::uint64_t seed = 0;
    CurriculumSchedule schedule = CurriculumSchedule::multiplicative(10, 30);
    evalkit::Evaluator evaluator = default_evaluator();
    std::optional<std::size_t> buffer_capacity;
    std::size_t workers = 1;

    static evalkit::Evaluator default_evaluator();
    /// Throws ConfigError.
    void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
/// Missing keys keep their defaults; "seed" is required.
TrainConfig train_config_from_json(const nlohmann::json& doc);

/// Graph plus the encoder and action layout derived from it.
struct World {
    const env::WebGraph* graph = nullptr;
    policy::ActionSpace space;
    policy::Encoder encoder;

    explicit World(const env::WebGraph& graph, std::size_t feature_dim = policy::kDefaultFeatureDim);
};

struct IterationReport {
    int iteration = 0;
    int horizon = 0;
    /// Fraction of rollouts the training evaluator accepted.
    double rollout_success_rate = 0.0;
    /// Fraction of rollouts that are actually correct.
    double rollout_true_success_rate = 0.0;
    std::size_t filtered_count = 0;
    double mean_h_stop = 0.0;
    std::array<double, env::kActionKindCount> action_frequencies{};
    bool updated = false;
    double loss_before = 0.0;
    double loss_after = 0.0;
    std::size_t buffer_size = 0;
    std::optional<evalkit::MetricsRecord> eval;
    double wall_time_s = 0.0;
};

/// rollout_size episodes on tasks drawn uniformly with replacement; episode
/// seeds derive from `seed` so the batch is identical for any worker count.
std::vector<Trajectory> collect_rollouts(const inference::Agent& agent, const World& world,
                                         const std::vector<env::Task>& tasks, int horizon, int rollout_size,
                                         std::uint64_t seed, double temperature = 1.0, std::size_t workers = 1);

/// Sets `success` on every trajectory and returns the accepted ones in order.
std::vector<Trajectory> filter_successful(std::vector<Trajectory>& trajectories, const std::vector<env::Task>& tasks,
                                          const evalkit::Evaluator& evaluator);

struct UpdateReport {
    double loss_before = 0.0;
    double loss_after = 0.0;
    std::size_t steps = 0;
    int optimizer_steps = 0;
};

/// Mean per-step cross-entropy over the batch.
double batch_loss(const policy::PolicyParams& params, const std::vector<Trajectory>& batch);

/// actor_epochs passes of mean-step cross-entropy descent. Each pass takes one
/// optimizer step over the batch, or one per minibatch when minibatch_size > 0.
/// Throws UnfilteredTrajectory unless every success flag is true.
UpdateReport train_iteration(policy::PolicyParams& params, policy::OptimizerState& state,
                             const std::vector<Trajectory>& batch, int actor_epochs, int minibatch_size = 0);

using AgentFactory = std::function<std::unique_ptr<inference::Agent>(const policy::PolicyParams&)>;

struct RunOptions {
    /// When set, checkpoints, rollout logs and the iteration CSV go here.
    std::optional<std::filesystem::path> output_dir;
    /// Embedded in every output file.
    nlohmann::json header = nlohmann::json::object();
    std::optional<policy::PolicyParams> initial_params;
    /// Agent used for collection; defaults to the linear policy.
    AgentFactory agent_factory;
    std::function<void(const std::string&)> warn;
};

struct RunResult {
    policy::PolicyParams params;
    std::vector<IterationReport> reports;
};

/// Throws ConfigError, TooFewTasks, InvalidArgument (overlapping task ids)
/// and Io errors.
RunResult run_tti(const TrainConfig& config, const World& world, const std::vector<env::Task>& train_tasks,
                  const std::vector<env::Task>& eval_tasks, const RunOptions& options = {});

/// Seeds used by run_tti for per-iteration evaluation.
std::vector<std::uint64_t> eval_seeds(const TrainConfig& config);

std::string iteration_csv_header();
std::string iteration_csv_row(const IterationReport& report);

/// One JSONL record: task_id, seed, horizon, actions, h_stop, answer, success,
/// compute_queries.
nlohmann::json trajectory_to_json(const Trajectory& trajectory, const env::Vocabulary& vocabulary);

} // namespace tti::trainer
