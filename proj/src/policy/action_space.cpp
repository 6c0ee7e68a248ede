#include "tti/policy/action_space.hpp"

#include "tti/core/error.hpp"

#include <algorithm>
#include <string>

namespace tti::policy {

ActionSpace::ActionSpace(int max_window, std::vector<env::TokenId> queries, std::vector<env::TokenId> values)
    : max_window_(max_window), queries_(std::move(queries)), values_(std::move(values)) {
    if (max_window_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_window must be >= 1");
    }
    if (!std::is_sorted(queries_.begin(), queries_.end()) || !std::is_sorted(values_.begin(), values_.end())) {
        throw Error(ErrorCode::InvalidArgument, "query and value tokens must be sorted");
    }
    size_ = static_cast<std::size_t>(max_window_) + 3 + queries_.size() + values_.size();
}

ActionSpace ActionSpace::for_graph(const env::WebGraph& graph) {
    return ActionSpace(graph.max_window(), graph.query_tokens(), graph.value_tokens());
}

namespace {

std::size_t index_in(const std::vector<env::TokenId>& tokens, env::TokenId t) {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), t);
    if (it == tokens.end() || *it != t) {
        return tokens.size();
    }
    return static_cast<std::size_t>(it - tokens.begin());
}

} // namespace

std::size_t ActionSpace::slot_of(const env::Action& action) const {
    struct Visitor {
        const ActionSpace& s;
        std::size_t operator()(const env::Click& a) const {
            if (a.slot < 0 || a.slot >= s.max_window_) {
                throw Error(ErrorCode::InvalidAction, "click slot " + std::to_string(a.slot) + " has no action slot");
            }
            return static_cast<std::size_t>(a.slot);
        }
        std::size_t operator()(const env::Scroll& a) const {
            return a.direction == env::ScrollDirection::Up ? s.scroll_up_slot() : s.scroll_down_slot();
        }
        std::size_t operator()(const env::GoBack&) const { return s.go_back_slot(); }
        std::size_t operator()(const env::Search& a) const {
            const std::size_t i = index_in(s.queries_, a.query);
            if (i == s.queries_.size()) throw Error(ErrorCode::InvalidAction, "query token has no action slot");
            return s.first_search_slot() + i;
        }
        std::size_t operator()(const env::Stop& a) const {
            const std::size_t i = index_in(s.values_, a.answer);
            if (i == s.values_.size()) throw Error(ErrorCode::InvalidAction, "answer token has no action slot");
            return s.first_stop_slot() + i;
        }
    };
    return std::visit(Visitor{*this}, action);
}

env::Action ActionSpace::action_at(std::size_t slot) const {
    if (slot < static_cast<std::size_t>(max_window_)) return env::Click{static_cast<int>(slot)};
    if (slot == scroll_up_slot()) return env::Scroll{env::ScrollDirection::Up};
    if (slot == scroll_down_slot()) return env::Scroll{env::ScrollDirection::Down};
    if (slot == go_back_slot()) return env::GoBack{};
    if (slot < first_stop_slot()) return env::Search{queries_[slot - first_search_slot()]};
    if (slot < size_) return env::Stop{values_[slot - first_stop_slot()]};
    throw Error(ErrorCode::InvalidAction, "slot " + std::to_string(slot) + " out of range");
}

Mask ActionSpace::mask(const env::Observation& obs) const {
    Mask m(size_, 0);
    const auto clicks = std::min<std::size_t>(obs.visible_links.size(), static_cast<std::size_t>(max_window_));
    for (std::size_t k = 0; k < clicks; ++k) m[k] = 1;
    if (!obs.popup_active) {
        if (obs.scroll_position > 0) m[scroll_up_slot()] = 1;
        if (obs.scroll_position < obs.max_scroll) m[scroll_down_slot()] = 1;
    }
    m[go_back_slot()] = 1;
    auto allow_search = [&](env::TokenId q) {
        const std::size_t i = index_in(queries_, q);
        if (i < queries_.size()) m[first_search_slot() + i] = 1;
    };
    allow_search(obs.goal.attribute);
    for (env::TokenId d : obs.goal.descriptors) allow_search(d);
    if (!obs.popup_active) {
        for (const env::Link& l : obs.visible_links) allow_search(l.label);
        for (env::TokenId d : obs.page_descriptors) allow_search(d);
    }
    for (env::TokenId v : obs.revealed_values) {
        const std::size_t i = index_in(values_, v);
        if (i < values_.size()) m[first_stop_slot() + i] = 1;
    }
    return m;
}

} // namespace tti::policy
