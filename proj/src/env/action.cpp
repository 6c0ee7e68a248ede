#include "tti/env/action.hpp"

#include "tti/core/error.hpp"
#include "tti/env/vocabulary.hpp"

#include <charconv>

namespace tti::env {

ActionKind kind_of(const Action& action) noexcept {
    return static_cast<ActionKind>(action.index());
}

std::string_view to_string(ActionKind kind) noexcept {
    switch (kind) {
    case ActionKind::Click: return "click";
    case ActionKind::Scroll: return "scroll";
    case ActionKind::GoBack: return "back";
    case ActionKind::Search: return "search";
    case ActionKind::Stop: return "stop";
    }
    return "click";
}

std::string format_action(const Action& action, const Vocabulary& vocabulary) {
    struct Visitor {
        const Vocabulary& vocab;
        std::string operator()(const Click& a) const { return "click:" + std::to_string(a.slot); }
        std::string operator()(const Scroll& a) const {
            return a.direction == ScrollDirection::Up ? "scroll:up" : "scroll:down";
        }
        std::string operator()(const GoBack&) const { return "back"; }
        std::string operator()(const Search& a) const { return "search:" + vocab.text(a.query); }
        std::string operator()(const Stop& a) const { return "stop:" + vocab.text(a.answer); }
    };
    return std::visit(Visitor{vocabulary}, action);
}

Action parse_action(std::string_view text, const Vocabulary& vocabulary) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "back" && colon == std::string_view::npos) {
        return GoBack{};
    }
    if (head == "click") {
        int slot = 0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), slot);
        if (ec == std::errc{} && ptr == arg.data() + arg.size() && slot >= 0) {
            return Click{slot};
        }
    } else if (head == "scroll") {
        if (arg == "up") return Scroll{ScrollDirection::Up};
        if (arg == "down") return Scroll{ScrollDirection::Down};
    } else if (head == "search" && !arg.empty()) {
        return Search{vocabulary.id(arg)};
    } else if (head == "stop" && !arg.empty()) {
        return Stop{vocabulary.id(arg)};
    }
    throw Error(ErrorCode::InvalidAction, "cannot parse action '" + std::string(text) + "'");
}

} // namespace tti::env
