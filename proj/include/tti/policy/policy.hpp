#pragma once

#include "tti/core/rng.hpp"
#include "tti/policy/action_space.hpp"
#include "tti/policy/features.hpp"

#include <span>
#include <vector>

namespace tti::policy {

/// Linear-softmax policy weights, row-major (slot x feature).
struct PolicyParams {
    ActionSpace layout;
    std::size_t feature_dim = kDefaultFeatureDim;
    std::vector<double> weights;

    PolicyParams() = default;
    PolicyParams(ActionSpace layout, std::size_t feature_dim);

    std::size_t slots() const noexcept { return layout.size(); }
    std::span<double> row(std::size_t slot);
    std::span<const double> row(std::size_t slot) const;

    bool operator==(const PolicyParams&) const = default;
};

struct ActionDistribution {
    std::vector<double> probs;
    Mask mask;
};

std::vector<double> logits(const PolicyParams& params, const FeatureVector& features);

/// Softmax of logits / temperature over the valid slots; invalid slots get
/// exactly 0. Throws EmptyMask or InvalidArgument (temperature <= 0).
ActionDistribution action_distribution(const PolicyParams& params, const FeatureVector& features, const Mask& mask,
                                       double temperature = 1.0);

std::size_t sample_slot(const ActionDistribution& dist, Rng& rng);

/// Highest-probability valid slot; ties go to the lowest index.
std::size_t argmax_slot(const ActionDistribution& dist);

struct NllGradient {
    double loss = 0.0;
    std::vector<double> gradient;  // same shape as params.weights
};

/// -log pi(taken | features) and its gradient. For valid slot j the gradient
/// row is (p_j - [j == taken]) * features; rows of invalid slots are zero.
NllGradient nll_gradient(const PolicyParams& params, const FeatureVector& features, std::size_t taken_slot,
                         const Mask& mask);

/// Adds scale * gradient into `gradient` and returns the unscaled loss.
double accumulate_nll_gradient(const PolicyParams& params, const FeatureVector& features, std::size_t taken_slot,
                               const Mask& mask, double scale, std::span<double> gradient);

struct AdamConfig {
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Decoupled (AdamW-style) decay; 0 gives plain Adam.
    double weight_decay = 0.0;
};

struct OptimizerState {
    AdamConfig config;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::int64_t step = 0;

    OptimizerState() = default;
    OptimizerState(AdamConfig config, std::size_t n_params);
};

/// One adaptive-moment descent step. Throws ShapeMismatch.
void apply_update(PolicyParams& params, OptimizerState& state, std::span<const double> gradient);

} // namespace tti::policy
