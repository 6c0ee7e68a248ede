#pragma once

#include "tti/env/action.hpp"
#include "tti/env/webgraph.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace tti::env {

enum class TaskFamily : std::uint8_t { Lookup, MultiHop, Compare, PopupNoise };
inline constexpr std::size_t kTaskFamilyCount = 4;
inline constexpr std::array<TaskFamily, kTaskFamilyCount> kAllTaskFamilies{
    TaskFamily::Lookup, TaskFamily::MultiHop, TaskFamily::Compare, TaskFamily::PopupNoise};

std::string_view to_string(TaskFamily family) noexcept;
TaskFamily task_family_from_string(std::string_view text);

/// What the agent is asked for. Descriptor layout by family:
///   lookup / popup-noise: {name, qualifier}
///   multi-hop:            {name, qualifier, relation}
///   compare:              {name_a, qualifier_a, name_b, qualifier_b}
struct Goal {
    TokenId attribute = 0;
    std::vector<TokenId> descriptors;

    bool operator==(const Goal&) const = default;
};

struct Task {
    std::uint64_t task_id = 0;
    TaskFamily family = TaskFamily::Lookup;
    Goal goal;
    TokenId correct_answer = 0;
    /// Pages holding the evidence for the answer.
    std::vector<PageId> evidence;
    /// Gold action sequence from reset, ending in Stop(correct_answer).
    std::vector<Action> certificate;
    int certificate_len = 0;
    /// Popups fire only for tasks tagged with this flag.
    bool popups = false;

    bool operator==(const Task&) const = default;
};

/// Throws UnknownTask if the task references tokens or pages absent from graph.
void validate_task(const Task& task, const WebGraph& graph);

} // namespace tti::env
