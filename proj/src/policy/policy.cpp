#include "tti/policy/policy.hpp"

#include "tti/core/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tti::policy {

PolicyParams::PolicyParams(ActionSpace layout_, std::size_t feature_dim_)
    : layout(std::move(layout_)), feature_dim(feature_dim_), weights(layout.size() * feature_dim_, 0.0) {}

std::span<double> PolicyParams::row(std::size_t slot) {
    return std::span<double>(weights).subspan(slot * feature_dim, feature_dim);
}

std::span<const double> PolicyParams::row(std::size_t slot) const {
    return std::span<const double>(weights).subspan(slot * feature_dim, feature_dim);
}

std::vector<double> logits(const PolicyParams& params, const FeatureVector& features) {
    if (features.dim != params.feature_dim) {
        throw Error(ErrorCode::ShapeMismatch, "feature dimension " + std::to_string(features.dim) +
                                                  " does not match policy dimension " +
                                                  std::to_string(params.feature_dim));
    }
    std::vector<double> out(params.slots());
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s] = features.dot(params.row(s));
    }
    return out;
}

namespace {

ActionDistribution softmax(const std::vector<double>& z, const Mask& mask, double temperature) {
    if (!(temperature > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "temperature must be > 0");
    }
    if (mask.size() != z.size()) {
        throw Error(ErrorCode::ShapeMismatch, "mask size does not match the action space");
    }
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < z.size(); ++s) {
        if (mask[s]) top = std::max(top, z[s]);
    }
    if (top == -std::numeric_limits<double>::infinity()) {
        throw Error(ErrorCode::EmptyMask, "no valid action");
    }
    ActionDistribution dist{std::vector<double>(z.size(), 0.0), mask};
    double total = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) {
        if (mask[s]) {
            dist.probs[s] = std::exp((z[s] - top) / temperature);
            total += dist.probs[s];
        }
    }
    for (double& p : dist.probs) p /= total;
    return dist;
}

} // namespace

ActionDistribution action_distribution(const PolicyParams& params, const FeatureVector& features, const Mask& mask,
                                       double temperature) {
    return softmax(logits(params, features), mask, temperature);
}

std::size_t sample_slot(const ActionDistribution& dist, Rng& rng) {
    return sample_weighted(rng, dist.probs);
}

std::size_t argmax_slot(const ActionDistribution& dist) {
    std::size_t best = dist.probs.size();
    for (std::size_t s = 0; s < dist.probs.size(); ++s) {
        if (dist.mask[s] && (best == dist.probs.size() || dist.probs[s] > dist.probs[best])) best = s;
    }
    if (best == dist.probs.size()) {
        throw Error(ErrorCode::EmptyMask, "no valid action");
    }
    return best;
}

double accumulate_nll_gradient(const PolicyParams& params, const FeatureVector& features, std::size_t taken_slot,
                               const Mask& mask, double scale, std::span<double> gradient) {
    if (gradient.size() != params.weights.size()) {
        throw Error(ErrorCode::ShapeMismatch, "gradient buffer does not match parameter shape");
    }
    if (taken_slot >= mask.size() || !mask[taken_slot]) {
        throw Error(ErrorCode::InvalidAction, "taken action slot " + std::to_string(taken_slot) + " is masked out");
    }
    const ActionDistribution dist = action_distribution(params, features, mask, 1.0);
    for (std::size_t s = 0; s < dist.probs.size(); ++s) {
        if (!mask[s]) continue;
        const double coeff = scale * (dist.probs[s] - (s == taken_slot ? 1.0 : 0.0));
        if (coeff == 0.0) continue;
        double* row = gradient.data() + s * params.feature_dim;
        for (std::size_t k = 0; k < features.indices.size(); ++k) {
            row[features.indices[k]] += coeff * features.values[k];
        }
    }
    return -std::log(dist.probs[taken_slot]);
}

NllGradient nll_gradient(const PolicyParams& params, const FeatureVector& features, std::size_t taken_slot,
                         const Mask& mask) {
    NllGradient out;
    out.gradient.assign(params.weights.size(), 0.0);
    out.loss = accumulate_nll_gradient(params, features, taken_slot, mask, 1.0, out.gradient);
    return out;
}

OptimizerState::OptimizerState(AdamConfig config_, std::size_t n_params)
    : config(config_), first_moment(n_params, 0.0), second_moment(n_params, 0.0) {
    if (!(config.learning_rate >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "learning rate must be >= 0");
    }
}

void apply_update(PolicyParams& params, OptimizerState& state, std::span<const double> gradient) {
    const std::size_t n = params.weights.size();
    if (gradient.size() != n || state.first_moment.size() != n || state.second_moment.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "gradient/optimizer state shape does not match parameters");
    }
    const AdamConfig& c = state.config;
    ++state.step;
    const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gradient[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g * g;
        if (m == 0.0 && c.weight_decay == 0.0) continue;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params.weights[i] -= c.learning_rate * (m_hat / (std::sqrt(v_hat) + c.epsilon) + c.weight_decay * params.weights[i]);
    }
}

} // namespace tti::policy
