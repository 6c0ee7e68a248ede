#pragma once

#include "tti/env/task.hpp"
#include "tti/env/webgraph.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace tti::taskgen {

/// Shape of a generated world. Page 0 is the home page, followed by one hub
/// page per qualifier and then the entity pages.
struct WorldConfig {
    int n_pages = 64;
    /// Mean number of outgoing links per page (tree links plus relation links).
    double mean_branching = 2.5;
    int n_attributes = 4;
    int n_values = 12;
    int n_qualifiers = 4;
    int n_relations = 3;
    /// Fraction of entity pages that reuse another page's name with a different
    /// qualifier and conflicting facts.
    double distractor_rate = 0.2;
    /// Fraction of entity pages carrying a pop-up, and that pop-up's probability.
    double popup_rate = 0.3;
    double popup_prob = 0.6;
    int window_size = 4;
    /// When false, entity names are left out of the search index, so a page
    /// can only be reached by browsing or by searching its qualifier.
    bool index_names = true;

    void validate() const;
};

nlohmann::json to_json(const WorldConfig& config);
WorldConfig world_config_from_json(const nlohmann::json& doc);

/// Deterministic per (config, seed). Throws InfeasibleConfig when the config
/// cannot yield a graph whose pages are all reachable from the start page.
env::WebGraph generate_graph(const WorldConfig& config, std::uint64_t seed);

struct TaskGenOptions {
    int h_max = 30;
    /// Proposals whose shortest certificate is shorter than this are rejected.
    int min_certificate_len = 1;
    /// Upper bound on proposals per requested task before giving up.
    int max_attempts_per_task = 50;
};

using FamilyMix = std::map<env::TaskFamily, double>;

/// Exactly n tasks with BFS certificates of length in
/// [min_certificate_len, h_max]. Throws
/// ExhaustedProposals if the graph cannot support n distinct solvable tasks.
std::vector<env::Task> generate_tasks(const env::WebGraph& graph, int n, const FamilyMix& family_mix,
                                      std::uint64_t seed, const TaskGenOptions& options = {});

/// Shortest certificate (with pop-ups disabled) for the task's goal, using only
/// searches over the goal's own tokens. Empty when none fits within h_max.
std::optional<std::vector<env::Action>> find_certificate(const env::WebGraph& graph, const env::Task& task,
                                                          int h_max);

/// Disjoint, exhaustive, seed-deterministic partition. Each side keeps the
/// input order. Throws TooFewTasks for fewer than two tasks.
std::pair<std::vector<env::Task>, std::vector<env::Task>> split(const std::vector<env::Task>& tasks,
                                                                double test_fraction, std::uint64_t seed);

} // namespace tti::taskgen
