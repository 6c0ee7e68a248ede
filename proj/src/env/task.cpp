#include "tti/env/task.hpp"

#include "tti/core/error.hpp"

#include <string>

namespace tti::env {

std::string_view to_string(TaskFamily family) noexcept {
    switch (family) {
    case TaskFamily::Lookup: return "lookup";
    case TaskFamily::MultiHop: return "multi-hop";
    case TaskFamily::Compare: return "compare";
    case TaskFamily::PopupNoise: return "popup-noise";
    }
    return "lookup";
}

TaskFamily task_family_from_string(std::string_view text) {
    if (text == "lookup") return TaskFamily::Lookup;
    if (text == "multi-hop") return TaskFamily::MultiHop;
    if (text == "compare") return TaskFamily::Compare;
    if (text == "popup-noise") return TaskFamily::PopupNoise;
    throw Error(ErrorCode::InvalidArgument, "unknown task family '" + std::string(text) + "'");
}

void validate_task(const Task& task, const WebGraph& graph) {
    const auto vocab_size = graph.vocabulary().size();
    auto bad = [&](const std::string& what) {
        throw Error(ErrorCode::UnknownTask, "task " + std::to_string(task.task_id) + ": " + what);
    };
    if (task.goal.attribute >= vocab_size || task.correct_answer >= vocab_size) {
        bad("goal tokens are not in the graph vocabulary");
    }
    for (TokenId d : task.goal.descriptors) {
        if (d >= vocab_size) {
            bad("descriptor token is not in the graph vocabulary");
        }
    }
    for (PageId p : task.evidence) {
        if (p < 0 || !graph.has_page(p)) {
            bad("evidence page " + std::to_string(p) + " is absent");
        }
    }
}

} // namespace tti::env
