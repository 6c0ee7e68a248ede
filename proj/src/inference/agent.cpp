#include "tti/inference/agent.hpp"

#include "tti/core/error.hpp"

namespace tti::inference {

policy::ActionDistribution one_hot(std::size_t slot, const policy::Mask& mask) {
    if (slot >= mask.size() || !mask[slot]) {
        throw Error(ErrorCode::InvalidAction, "scripted action is not valid here");
    }
    policy::ActionDistribution d{std::vector<double>(mask.size(), 0.0), mask};
    d.probs[slot] = 1.0;
    return d;
}

policy::ActionDistribution GoldPathAgent::distribution(const DecisionContext& ctx, double) const {
    if (!ctx.recent.empty() && ctx.recent.back().popup_active) {
        return one_hot(space_->go_back_slot(), ctx.mask);
    }
    // Certificates never contain GoBack, so every GoBack in the history was a dismissal.
    std::size_t done = 0;
    for (const env::Action& a : ctx.history) {
        if (!std::holds_alternative<env::GoBack>(a)) ++done;
    }
    const auto& cert = ctx.task.certificate;
    const env::Action next = done < cert.size() ? cert[done] : env::Action{env::Stop{ctx.task.correct_answer}};
    return one_hot(space_->slot_of(next), ctx.mask);
}

} // namespace tti::inference
