#pragma once

#include "tti/env/vocabulary.hpp"

#include <array>
#include <string>
#include <variant>

namespace tti::env {

enum class ScrollDirection : std::uint8_t { Up, Down };

struct Click {
    int slot = 0;
    bool operator==(const Click&) const = default;
};
struct Scroll {
    ScrollDirection direction = ScrollDirection::Down;
    bool operator==(const Scroll&) const = default;
};
struct GoBack {
    bool operator==(const GoBack&) const = default;
};
struct Search {
    TokenId query = 0;
    bool operator==(const Search&) const = default;
};
struct Stop {
    TokenId answer = 0;
    bool operator==(const Stop&) const = default;
};

using Action = std::variant<Click, Scroll, GoBack, Search, Stop>;

enum class ActionKind : std::uint8_t { Click, Scroll, GoBack, Search, Stop };
inline constexpr std::size_t kActionKindCount = 5;
inline constexpr std::array<ActionKind, kActionKindCount> kAllActionKinds{
    ActionKind::Click, ActionKind::Scroll, ActionKind::GoBack, ActionKind::Search, ActionKind::Stop};

ActionKind kind_of(const Action& action) noexcept;
std::string_view to_string(ActionKind kind) noexcept;

class Vocabulary;

/// Compact text form used in logs and task files: "click:2", "scroll:down",
/// "back", "search:<token>", "stop:<token>".
std::string format_action(const Action& action, const Vocabulary& vocabulary);
Action parse_action(std::string_view text, const Vocabulary& vocabulary);

} // namespace tti::env
