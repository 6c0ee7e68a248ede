#pragma once

#include "tti/core/rng.hpp"
#include "tti/env/task.hpp"
#include "tti/env/webgraph.hpp"
#include "tti/inference/agent.hpp"
#include "tti/policy/features.hpp"
#include "tti/trainer/trajectory.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace tti::inference {

struct Plain {
    bool operator==(const Plain&) const = default;
};
/// Intercepts up to max_rechecks Stop actions and lets the agent keep going.
struct CheckAgain {
    int max_rechecks = 1;
    bool operator==(const CheckAgain&) const = default;
};
/// Per step: n samples from the same distribution, execute the majority slot.
struct BestOfN {
    int n = 3;
    bool operator==(const BestOfN&) const = default;
};
/// Per step: k sequential samples, temperature multiplied by gamma after each;
/// the k-th sample is executed.
struct BudgetForce {
    int k = 2;
    double gamma = 1.0;
    bool operator==(const BudgetForce&) const = default;
};

using InferenceStrategy = std::variant<Plain, CheckAgain, BestOfN, BudgetForce>;

/// Throws InvalidArgument when parameters are out of bounds.
void validate(const InferenceStrategy& strategy);
std::string describe(const InferenceStrategy& strategy);
nlohmann::json to_json(const InferenceStrategy& strategy);
InferenceStrategy strategy_from_json(const nlohmann::json& doc);

struct ComputeLedger {
    int policy_queries = 0;
    int steps_taken = 0;
    int rechecks_used = 0;

    bool operator==(const ComputeLedger&) const = default;
};

struct RolloutResult {
    trainer::Trajectory trajectory;
    ComputeLedger ledger;
};

/// Runs one episode under the strategy. temperature == 0 means greedy
/// (argmax, ties to the lowest slot). The sampling stream is derived from
/// (seed, task_id), independent of the environment's own stream.
RolloutResult rollout_with_strategy(const Agent& agent, const policy::Encoder& encoder,
                                    const policy::ActionSpace& space, const env::WebGraph& graph,
                                    const env::Task& task, int horizon, const InferenceStrategy& strategy,
                                    double temperature, std::uint64_t seed);

} // namespace tti::inference
