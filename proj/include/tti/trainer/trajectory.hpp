#pragma once

#include "tti/env/action.hpp"
#include "tti/env/episode.hpp"
#include "tti/policy/action_space.hpp"
#include "tti/policy/features.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tti::trainer {

struct StepRecord {
    env::Observation observation;
    policy::FeatureVector features;
    policy::Mask mask;
    env::Action action;
    std::size_t action_slot = 0;
    /// Log-probability of the executed action under the acting distribution.
    double log_prob = 0.0;
    /// Policy queries spent choosing this action (including intercepted stops).
    int queries = 1;
};

/// One episode. steps.size() == h_stop; intercepted stops are not steps.
struct Trajectory {
    std::uint64_t task_id = 0;
    std::uint64_t seed = 0;
    int horizon = 0;
    std::string strategy = "plain";
    std::vector<StepRecord> steps;
    int h_stop = 0;
    std::optional<env::TokenId> final_answer;
    std::optional<bool> success;
    /// 1-based position in the replay buffer; 0 outside a buffer.
    std::uint64_t insertion_index = 0;
    int compute_queries = 0;
    int rechecks_used = 0;
    /// Re-check passes whose next answer differed from the intercepted one.
    int answer_changes = 0;
    std::vector<env::TokenId> intercepted_answers;
};

} // namespace tti::trainer
