#pragma once

#include "tti/core/rng.hpp"
#include "tti/env/action.hpp"
#include "tti/env/task.hpp"
#include "tti/env/webgraph.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace tti::env {

/// What the agent sees at step t. While a pop-up is active the page content
/// (links and facts) is covered.
struct Observation {
    Goal goal;
    PageId page_id = 0;
    PageKind page_kind = PageKind::Home;
    std::vector<TokenId> page_descriptors;
    std::vector<Link> visible_links;
    std::vector<Fact> facts;
    int scroll_position = 0;
    int max_scroll = 0;
    int step = 0;
    int recheck_pass = 0;
    bool popup_active = false;
    /// Values shown on any page so far this episode, sorted ascending.
    std::vector<TokenId> revealed_values;

    bool operator==(const Observation&) const = default;
};

struct StepOutcome {
    Observation observation;
    bool terminated = false;
};

/// One episode of interaction. Holds references to the graph and task, which
/// must outlive it.
class EpisodeState {
public:
    const WebGraph& graph() const noexcept { return *graph_; }
    const Task& task() const noexcept { return *task_; }
    int horizon() const noexcept { return horizon_; }
    int t() const noexcept { return t_; }
    bool terminated() const noexcept { return terminated_; }
    /// Defined once terminated.
    std::optional<int> h_stop() const noexcept { return h_stop_; }
    std::optional<TokenId> final_answer() const noexcept { return final_answer_; }
    PageId current_page() const noexcept { return page_; }
    bool popup_active() const noexcept { return popup_; }
    const std::vector<PageId>& back_stack() const noexcept { return back_stack_; }

    Observation observe(int recheck_pass = 0) const;

    StepOutcome step(const Action& action);

private:
    friend std::pair<EpisodeState, Observation> reset(const WebGraph&, const Task&, int, std::uint64_t);

    EpisodeState(const WebGraph& graph, const Task& task, int horizon, std::uint64_t seed);
    void enter(PageId page);
    void reveal_current();

    const WebGraph* graph_;
    const Task* task_;
    int horizon_;
    int t_ = 0;
    PageId page_;
    int scroll_ = 0;
    bool popup_ = false;
    std::vector<PageId> back_stack_;
    std::vector<TokenId> revealed_;
    Rng rng_;
    bool terminated_ = false;
    std::optional<int> h_stop_;
    std::optional<TokenId> final_answer_;
};

/// Starts an episode at the graph's start page. The episode rng is derived
/// from (seed, task_id), so identical inputs give identical episodes.
std::pair<EpisodeState, Observation> reset(const WebGraph& graph, const Task& task, int horizon,
                                           std::uint64_t seed);

/// Replays the task's certificate with pop-ups disabled; returns the final answer
/// (empty if the episode ran out of steps).
std::optional<TokenId> replay_certificate(const WebGraph& graph, const Task& task, int horizon);

} // namespace tti::env
