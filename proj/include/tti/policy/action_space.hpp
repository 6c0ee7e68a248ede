#pragma once

#include "tti/env/action.hpp"
#include "tti/env/episode.hpp"
#include "tti/env/webgraph.hpp"

#include <cstdint>
#include <vector>

namespace tti::policy {

using Mask = std::vector<std::uint8_t>;

/// Fixed slot enumeration:
///   [0, max_window)             Click(slot)
///   max_window, max_window + 1  Scroll(up), Scroll(down)
///   max_window + 2              GoBack
///   then one Search slot per query token, then one Stop slot per value token.
class ActionSpace {
public:
    ActionSpace() = default;
    ActionSpace(int max_window, std::vector<env::TokenId> queries, std::vector<env::TokenId> values);

    static ActionSpace for_graph(const env::WebGraph& graph);

    std::size_t size() const noexcept { return size_; }
    int max_window() const noexcept { return max_window_; }
    const std::vector<env::TokenId>& queries() const noexcept { return queries_; }
    const std::vector<env::TokenId>& values() const noexcept { return values_; }

    std::size_t scroll_up_slot() const noexcept { return static_cast<std::size_t>(max_window_); }
    std::size_t scroll_down_slot() const noexcept { return scroll_up_slot() + 1; }
    std::size_t go_back_slot() const noexcept { return scroll_up_slot() + 2; }
    std::size_t first_search_slot() const noexcept { return scroll_up_slot() + 3; }
    std::size_t first_stop_slot() const noexcept { return first_search_slot() + queries_.size(); }

    /// Throws InvalidAction if the action has no slot.
    std::size_t slot_of(const env::Action& action) const;
    env::Action action_at(std::size_t slot) const;

    /// Valid slots for an observation: visible clicks, scrolls that move,
    /// GoBack, searches for tokens the agent can read (goal tokens, visible
    /// link labels, current page descriptors), and Stop for every value
    /// revealed so far.
    Mask mask(const env::Observation& observation) const;

    bool operator==(const ActionSpace&) const = default;

private:
    int max_window_ = 0;
    std::vector<env::TokenId> queries_;
    std::vector<env::TokenId> values_;
    std::size_t size_ = 0;
};

} // namespace tti::policy
