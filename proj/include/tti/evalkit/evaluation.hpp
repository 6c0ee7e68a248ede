#pragma once

#include "tti/env/task.hpp"
#include "tti/env/webgraph.hpp"
#include "tti/inference/strategy.hpp"
#include "tti/trainer/trajectory.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tti::evalkit {

enum class VerdictSource : std::uint8_t { GroundTruth, Noisy };

struct Verdict {
    bool success = false;
    VerdictSource source = VerdictSource::GroundTruth;

    bool operator==(const Verdict&) const = default;
};

/// Success iff the episode ended with an answer equal to the correct one.
/// Throws TaskMismatch if the trajectory belongs to another task.
Verdict gt_evaluate(const trainer::Trajectory& trajectory, const env::Task& task);

/// Agrees with ground truth with probability `accuracy`, flipping it
/// otherwise. Optional class-conditional rates override the symmetric flip.
struct NoisyVerifier {
    double accuracy = 0.889;
    std::uint64_t seed = 0;
    std::optional<double> false_positive_rate;
    std::optional<double> false_negative_rate;

    void validate() const;
};

/// Deterministic in (verifier.seed, task_id, trajectory seed, horizon, strategy).
Verdict noisy_evaluate(const NoisyVerifier& verifier, const trainer::Trajectory& trajectory, const env::Task& task);

/// Reward labeler used for filtering during training.
struct Evaluator {
    enum class Kind : std::uint8_t { GroundTruth, Noisy };
    Kind kind = Kind::GroundTruth;
    NoisyVerifier verifier;

    Verdict evaluate(const trainer::Trajectory& trajectory, const env::Task& task) const;
};

nlohmann::json to_json(const Evaluator& evaluator);
Evaluator evaluator_from_json(const nlohmann::json& doc);

struct EpisodeSummary {
    std::uint64_t task_id = 0;
    std::uint64_t seed = 0;
    env::TaskFamily family = env::TaskFamily::Lookup;
    bool success = false;
    int h_stop = 0;
    int policy_queries = 0;
    int rechecks_used = 0;
    int answer_changes = 0;
    std::array<int, env::kActionKindCount> action_counts{};

    bool operator==(const EpisodeSummary&) const = default;
};

struct MetricsRecord {
    double success_rate = 0.0;
    std::map<env::TaskFamily, double> family_success;
    std::map<env::TaskFamily, int> family_episodes;
    double mean_h_stop = 0.0;
    /// Fraction of executed actions per variant (click, scroll, back, search, stop).
    std::array<double, env::kActionKindCount> action_frequencies{};
    double mean_policy_queries = 0.0;
    std::size_t episodes = 0;
    std::vector<std::uint64_t> seeds;
    int rechecks = 0;
    /// Fraction of re-check passes after which the answer changed (0 if none).
    double recheck_change_rate = 0.0;

    double rate(env::ActionKind kind) const { return action_frequencies[static_cast<std::size_t>(kind)]; }

    bool operator==(const MetricsRecord&) const = default;
};

MetricsRecord aggregate(const std::vector<EpisodeSummary>& episodes, std::vector<std::uint64_t> seeds);

EpisodeSummary summarize(const trainer::Trajectory& trajectory, const env::Task& task, bool success);

struct EvaluationRun {
    MetricsRecord metrics;
    std::vector<EpisodeSummary> episodes;  // ordered by (task index, seed index)
};

struct EvalOptions {
    double temperature = 1.0;
    std::size_t workers = 1;
};

/// Runs every (task, seed) pair at the given horizon with ground-truth scoring.
EvaluationRun evaluate_policy(const inference::Agent& agent, const policy::Encoder& encoder,
                              const policy::ActionSpace& space, const env::WebGraph& graph,
                              const std::vector<env::Task>& tasks, int eval_horizon,
                              const inference::InferenceStrategy& strategy, const std::vector<std::uint64_t>& seeds,
                              const EvalOptions& options = {});

/// One CSV row per run; the column order is fixed by metrics_csv_header().
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& label, const MetricsRecord& record);
nlohmann::json metrics_to_json(const MetricsRecord& record);

} // namespace tti::evalkit
