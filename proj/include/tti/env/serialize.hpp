#pragma once

#include "tti/env/task.hpp"
#include "tti/env/webgraph.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace tti::env {

inline constexpr int kGraphFormatVersion = 1;

/// {version, vocabulary, pages:[{id, kind, descriptors, links:[[label,target]..],
///  facts:{attr:value}, window_size, popup_prob}], start_page, search_index, results_window}
nlohmann::json graph_to_json(const WebGraph& graph);
WebGraph graph_from_json(const nlohmann::json& doc);

nlohmann::json task_to_json(const Task& task, const Vocabulary& vocabulary);
Task task_from_json(const nlohmann::json& doc, const Vocabulary& vocabulary);

/// JSON lines, one task per line. Lines starting with '#' are header lines.
void write_tasks_jsonl(std::ostream& out, const std::vector<Task>& tasks, const Vocabulary& vocabulary);
std::vector<Task> read_tasks_jsonl(std::istream& in, const Vocabulary& vocabulary);

WebGraph load_graph(const std::filesystem::path& path);
std::vector<Task> load_tasks(const std::filesystem::path& path, const WebGraph& graph);

} // namespace tti::env
