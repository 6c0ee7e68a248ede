#include "tti/policy/features.hpp"

#include "tti/core/rng.hpp"

#include <algorithm>
#include <optional>

namespace tti::policy {

using env::Observation;
using env::TokenId;
using env::TokenKind;

namespace {
// Identity features (page ids, goal tokens) are down-weighted so the shared
// structural features dominate early updates and memorization of single
// tasks is slower.
constexpr double kIdentityScale = 0.1;
} // namespace

std::vector<double> FeatureVector::to_dense() const {
    std::vector<double> dense(dim, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        dense[indices[k]] = values[k];
    }
    return dense;
}

double FeatureVector::dot(std::span<const double> row) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        acc += row[indices[k]] * values[k];
    }
    return acc;
}

FeatureVector FeatureBuilder::finish() {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    FeatureVector fv;
    fv.dim = dim_;
    for (const auto& [index, value] : entries_) {
        if (!fv.indices.empty() && fv.indices.back() == index) {
            fv.values.back() += value;
        } else {
            fv.indices.push_back(index);
            fv.values.push_back(value);
        }
    }
    entries_.clear();
    return fv;
}

namespace {

enum class Tag : std::uint64_t {
    Bias = 1,
    GoalAttribute,
    GoalToken,
    GoalTokenUnseen,
    PageKind,
    Popup,
    PageMatch,
    PageNameOnly,
    PageNoMatch,
    AtRelationSource,
    HopTarget,
    SlotPresent,
    SlotName,
    SlotNameSeen,
    SlotQualifier,
    SlotRelation,
    SlotSeen,
    AnyTargetVisible,
    CanScrollUp,
    CanScrollDown,
    AttributeHere,
    AttributeHereAny,
    Candidate,
    HasCandidate,
    Recheck,
    RecheckPass,
    StepFraction,
    History,
    RecentPage,
    LastAction,
};

std::uint32_t index_of(Tag tag, std::uint64_t a = 0, std::uint64_t b = 0) {
    const std::uint64_t h = splitmix64(splitmix64(static_cast<std::uint64_t>(tag) * 0x100000001b3ULL + a) ^ (b + 1));
    return static_cast<std::uint32_t>(h >> 32);
}

struct EntityRef {
    TokenId name;
    std::optional<TokenId> qualifier;
};

struct ParsedGoal {
    TokenId attribute = 0;
    std::vector<EntityRef> entities;
    std::optional<TokenId> relation;
};

ParsedGoal parse_goal(const env::Goal& goal, const env::Vocabulary& vocab) {
    ParsedGoal g;
    g.attribute = goal.attribute;
    for (TokenId d : goal.descriptors) {
        switch (vocab.kind(d)) {
        case TokenKind::Name: g.entities.push_back({d, std::nullopt}); break;
        case TokenKind::Qualifier:
            if (!g.entities.empty() && !g.entities.back().qualifier) g.entities.back().qualifier = d;
            break;
        case TokenKind::Relation: g.relation = d; break;
        default: break;
        }
    }
    return g;
}

bool matches(const Observation& obs, const EntityRef& ref) {
    if (obs.page_kind != env::PageKind::Entity || obs.page_descriptors.empty()) return false;
    if (obs.page_descriptors[0] != ref.name) return false;
    return !ref.qualifier || (obs.page_descriptors.size() > 1 && obs.page_descriptors[1] == *ref.qualifier);
}

std::optional<TokenId> fact_value(const Observation& obs, TokenId attribute) {
    for (const env::Fact& f : obs.facts) {
        if (f.attribute == attribute) return f.value;
    }
    return std::nullopt;
}

} // namespace

Encoder::Encoder(const env::Vocabulary& vocabulary, std::size_t dim) : vocabulary_(&vocabulary), dim_(dim) {}

FeatureVector Encoder::encode(std::span<const Observation> recent, std::span<const env::Action> history,
                              int horizon) const {
    FeatureBuilder fb(dim_);
    fb.add(index_of(Tag::Bias));

    std::array<double, env::kActionKindCount> counts{};
    for (const env::Action& a : history) counts[static_cast<std::size_t>(env::kind_of(a))] += 1.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] != 0.0) fb.add(index_of(Tag::History, k), counts[k]);
    }
    if (!history.empty()) fb.add(index_of(Tag::LastAction, static_cast<std::uint64_t>(env::kind_of(history.back()))));

    if (recent.size() > 3) recent = recent.subspan(recent.size() - 3);
    if (recent.empty()) {
        return fb.finish();
    }
    const Observation& cur = recent.back();
    if (horizon > 0) fb.add(index_of(Tag::StepFraction), static_cast<double>(cur.step) / horizon);
    if (cur.recheck_pass > 0) {
        fb.add(index_of(Tag::Recheck), static_cast<double>(cur.recheck_pass));
        fb.add(index_of(Tag::RecheckPass, static_cast<std::uint64_t>(std::min(cur.recheck_pass, 3))));
    }
    for (std::size_t back = 0; back < recent.size(); ++back) {
        const auto& o = recent[recent.size() - 1 - back];
        fb.add(index_of(Tag::RecentPage, back, static_cast<std::uint64_t>(static_cast<std::int64_t>(o.page_id))), kIdentityScale);
    }

    const ParsedGoal goal = parse_goal(cur.goal, *vocabulary_);
    fb.add(index_of(Tag::GoalAttribute, goal.attribute), kIdentityScale);
    for (TokenId d : cur.goal.descriptors) fb.add(index_of(Tag::GoalToken, d), kIdentityScale);

    // Which goal entities have a visible page among the recent observations.
    std::vector<std::optional<TokenId>> seen_value(goal.entities.size());
    std::vector<bool> seen(goal.entities.size(), false);
    for (const Observation& o : recent) {
        if (o.popup_active) continue;
        for (std::size_t e = 0; e < goal.entities.size(); ++e) {
            if (matches(o, goal.entities[e])) {
                seen[e] = true;
                seen_value[e] = fact_value(o, goal.attribute);
            }
        }
    }
    for (std::size_t e = 0; e < goal.entities.size(); ++e) {
        if (seen[e]) continue;
        fb.add(index_of(Tag::GoalTokenUnseen, goal.entities[e].name));
        if (goal.entities[e].qualifier) fb.add(index_of(Tag::GoalTokenUnseen, *goal.entities[e].qualifier));
    }

    fb.add(index_of(Tag::PageKind, static_cast<std::uint64_t>(cur.page_kind)));
    if (cur.popup_active) {
        fb.add(index_of(Tag::Popup));
        return fb.finish();
    }

    bool at_relation_source = false;
    if (cur.page_kind == env::PageKind::Entity) {
        bool any_match = false;
        bool name_only = false;
        for (std::size_t e = 0; e < goal.entities.size(); ++e) {
            if (matches(cur, goal.entities[e])) {
                any_match = true;
                fb.add(index_of(Tag::PageMatch, e));
                if (e == 0 && goal.relation) at_relation_source = true;
            } else if (!cur.page_descriptors.empty() && cur.page_descriptors[0] == goal.entities[e].name) {
                name_only = true;
            }
        }
        if (name_only && !any_match) fb.add(index_of(Tag::PageNameOnly));
        if (!any_match && !name_only) fb.add(index_of(Tag::PageNoMatch));
    }
    if (at_relation_source) fb.add(index_of(Tag::AtRelationSource));

    // Multi-hop: the current page was reached through the goal relation from the
    // first goal entity's page.
    bool hop_target = false;
    if (goal.relation && !goal.entities.empty() && recent.size() >= 2) {
        const Observation& prev = recent[recent.size() - 2];
        if (!prev.popup_active && matches(prev, goal.entities[0])) {
            for (const env::Link& l : prev.visible_links) {
                if (l.label == *goal.relation && l.target == cur.page_id) hop_target = true;
            }
        }
    }
    if (hop_target) fb.add(index_of(Tag::HopTarget));

    auto recently_seen = [&](env::PageId p) {
        for (std::size_t k = 0; k + 1 < recent.size(); ++k) {
            if (recent[k].page_id == p) return true;
        }
        return false;
    };
    bool any_target = false;
    for (std::size_t j = 0; j < cur.visible_links.size(); ++j) {
        const env::Link& l = cur.visible_links[j];
        fb.add(index_of(Tag::SlotPresent, j));
        const bool was_seen = recently_seen(l.target);
        if (was_seen) fb.add(index_of(Tag::SlotSeen, j));
        for (std::size_t e = 0; e < goal.entities.size(); ++e) {
            if (seen[e]) continue;
            if (l.label == goal.entities[e].name) {
                fb.add(index_of(was_seen ? Tag::SlotNameSeen : Tag::SlotName, j));
                any_target = any_target || !was_seen;
            }
            if (cur.page_kind == env::PageKind::Home && goal.entities[e].qualifier &&
                l.label == *goal.entities[e].qualifier) {
                fb.add(index_of(Tag::SlotQualifier, j));
                any_target = true;
            }
        }
        if (at_relation_source && l.label == *goal.relation) {
            fb.add(index_of(Tag::SlotRelation, j));
            any_target = true;
        }
    }
    if (any_target) fb.add(index_of(Tag::AnyTargetVisible));
    if (cur.scroll_position > 0) fb.add(index_of(Tag::CanScrollUp));
    if (cur.scroll_position < cur.max_scroll) fb.add(index_of(Tag::CanScrollDown));

    if (auto v = fact_value(cur, goal.attribute)) {
        fb.add(index_of(Tag::AttributeHere, *v));
        fb.add(index_of(Tag::AttributeHereAny));
    }

    std::optional<TokenId> candidate;
    if (goal.relation) {
        if (hop_target) candidate = fact_value(cur, goal.attribute);
    } else if (goal.entities.size() >= 2) {
        if (seen_value[0] && seen_value[1]) candidate = std::max(*seen_value[0], *seen_value[1]);
    } else if (goal.entities.size() == 1) {
        if (matches(cur, goal.entities[0])) candidate = fact_value(cur, goal.attribute);
    }
    if (candidate) {
        fb.add(index_of(Tag::Candidate, *candidate));
        fb.add(index_of(Tag::HasCandidate));
    }
    return fb.finish();
}

} // namespace tti::policy
