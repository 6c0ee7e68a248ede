#pragma once

#include "tti/env/episode.hpp"
#include "tti/env/task.hpp"
#include "tti/policy/policy.hpp"

#include <span>

namespace tti::inference {

/// Everything available when choosing one action. `task` is exposed for
/// scripted reference agents; learned agents must only read the observations.
struct DecisionContext {
    std::span<const env::Observation> recent;
    std::span<const env::Action> history;
    const policy::FeatureVector& features;
    const policy::Mask& mask;
    int horizon;
    const env::Task& task;
};

/// Anything that maps a decision context to an action distribution. Agents are
/// shared read-only across concurrent rollouts.
class Agent {
public:
    virtual ~Agent() = default;
    virtual policy::ActionDistribution distribution(const DecisionContext& ctx, double temperature) const = 0;
};

class LinearAgent final : public Agent {
public:
    explicit LinearAgent(const policy::PolicyParams& params) : params_(&params) {}

    policy::ActionDistribution distribution(const DecisionContext& ctx, double temperature) const override {
        return policy::action_distribution(*params_, ctx.features, ctx.mask, temperature);
    }

private:
    const policy::PolicyParams* params_;
};

/// Follows the task certificate, dismissing pop-ups with GoBack first.
class GoldPathAgent final : public Agent {
public:
    explicit GoldPathAgent(const policy::ActionSpace& space) : space_(&space) {}

    policy::ActionDistribution distribution(const DecisionContext& ctx, double temperature) const override;

private:
    const policy::ActionSpace* space_;
};

/// A distribution with all mass on one slot (must be valid under mask).
policy::ActionDistribution one_hot(std::size_t slot, const policy::Mask& mask);

} // namespace tti::inference
