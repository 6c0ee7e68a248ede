#include "tti/env/episode.hpp"

#include "tti/core/error.hpp"

#include <algorithm>
#include <string>

namespace tti::env {

EpisodeState::EpisodeState(const WebGraph& graph, const Task& task, int horizon, std::uint64_t seed)
    : graph_(&graph), task_(&task), horizon_(horizon), page_(graph.start_page()),
      rng_(derive_seed(seed, {task.task_id})) {}

std::pair<EpisodeState, Observation> reset(const WebGraph& graph, const Task& task, int horizon,
                                           std::uint64_t seed) {
    if (horizon < 1) {
        throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1, got " + std::to_string(horizon));
    }
    validate_task(task, graph);
    EpisodeState state(graph, task, horizon, seed);
    state.enter(graph.start_page());
    Observation obs = state.observe();
    return {std::move(state), std::move(obs)};
}

void EpisodeState::enter(PageId page) {
    page_ = page;
    scroll_ = 0;
    // The draw happens on every entry so the stream does not depend on popup settings.
    const double u = uniform01(rng_);
    popup_ = task_->popups && u < graph_->page(page).popup_prob;
    reveal_current();
}

void EpisodeState::reveal_current() {
    if (popup_) {
        return;
    }
    for (const Fact& f : graph_->page(page_).facts) {
        auto it = std::lower_bound(revealed_.begin(), revealed_.end(), f.value);
        if (it == revealed_.end() || *it != f.value) {
            revealed_.insert(it, f.value);
        }
    }
}

Observation EpisodeState::observe(int recheck_pass) const {
    const Page& p = graph_->page(page_);
    Observation obs;
    obs.goal = task_->goal;
    obs.page_id = page_;
    obs.page_kind = p.kind;
    obs.page_descriptors = p.descriptors;
    obs.scroll_position = scroll_;
    obs.max_scroll = p.max_scroll();
    obs.step = t_;
    obs.recheck_pass = recheck_pass;
    obs.popup_active = popup_;
    obs.revealed_values = revealed_;
    if (!popup_) {
        const auto begin = static_cast<std::size_t>(scroll_) * static_cast<std::size_t>(p.window_size);
        const auto end = std::min(p.links.size(), begin + static_cast<std::size_t>(p.window_size));
        if (begin < end) {
            obs.visible_links.assign(p.links.begin() + static_cast<std::ptrdiff_t>(begin),
                                     p.links.begin() + static_cast<std::ptrdiff_t>(end));
        }
        obs.facts = p.facts;
    }
    return obs;
}

StepOutcome EpisodeState::step(const Action& action) {
    if (terminated_) {
        throw Error(ErrorCode::EpisodeOver, "step called on a terminated episode");
    }
    const Page& p = graph_->page(page_);
    if (!popup_) {
        if (const auto* click = std::get_if<Click>(&action)) {
            const auto begin = static_cast<std::size_t>(scroll_) * static_cast<std::size_t>(p.window_size);
            const auto visible = std::min(p.links.size(), begin + static_cast<std::size_t>(p.window_size)) -
                                 std::min(p.links.size(), begin);
            if (click->slot < 0 || static_cast<std::size_t>(click->slot) >= visible) {
                throw Error(ErrorCode::InvalidSlot, "click slot " + std::to_string(click->slot) +
                                                        " outside visible window of " + std::to_string(visible));
            }
        }
    }

    ++t_;
    if (popup_) {
        // Everything except GoBack is swallowed by the pop-up.
        if (std::holds_alternative<GoBack>(action)) {
            popup_ = false;
            reveal_current();
        }
    } else {
        std::visit(
            [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, Click>) {
                    const auto index = static_cast<std::size_t>(scroll_) * static_cast<std::size_t>(p.window_size) +
                                       static_cast<std::size_t>(a.slot);
                    back_stack_.push_back(page_);
                    enter(p.links[index].target);
                } else if constexpr (std::is_same_v<A, Scroll>) {
                    scroll_ = std::clamp(scroll_ + (a.direction == ScrollDirection::Down ? 1 : -1), 0,
                                         p.max_scroll());
                } else if constexpr (std::is_same_v<A, GoBack>) {
                    if (!back_stack_.empty()) {
                        const PageId previous = back_stack_.back();
                        back_stack_.pop_back();
                        enter(previous);
                    }
                } else if constexpr (std::is_same_v<A, Search>) {
                    const PageId results = WebGraph::results_page_id(a.query);
                    if (!graph_->has_page(results)) {
                        throw Error(ErrorCode::InvalidAction, "search query is not in the query vocabulary");
                    }
                    back_stack_.push_back(page_);
                    enter(results);
                } else if constexpr (std::is_same_v<A, Stop>) {
                    terminated_ = true;
                    h_stop_ = t_;
                    final_answer_ = a.answer;
                }
            },
            action);
    }

    if (!terminated_ && t_ >= horizon_) {
        terminated_ = true;
        h_stop_ = t_;
    }
    return {observe(), terminated_};
}

std::optional<TokenId> replay_certificate(const WebGraph& graph, const Task& task, int horizon) {
    Task quiet = task;
    quiet.popups = false;
    auto [state, obs] = reset(graph, quiet, horizon, 0);
    for (const Action& a : quiet.certificate) {
        if (state.terminated()) {
            break;
        }
        state.step(a);
    }
    return state.terminated() ? state.final_answer() : std::nullopt;
}

} // namespace tti::env
