#pragma once

#include "tti/env/vocabulary.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace tti::env {

using PageId = std::int32_t;

enum class PageKind : std::uint8_t { Home, Hub, Entity, Results };

std::string_view to_string(PageKind kind) noexcept;
PageKind page_kind_from_string(std::string_view text);

struct Link {
    TokenId label = 0;
    PageId target = 0;

    bool operator==(const Link&) const = default;
};

struct Fact {
    TokenId attribute = 0;
    TokenId value = 0;

    bool operator==(const Fact&) const = default;
};

struct Page {
    PageId id = 0;
    PageKind kind = PageKind::Entity;
    /// Entity pages: {name, qualifier}. Hubs: {qualifier}. Home: {}.
    std::vector<TokenId> descriptors;
    std::vector<Link> links;
    /// Attribute -> value, kept sorted by attribute with unique attributes.
    std::vector<Fact> facts;
    int window_size = 1;
    double popup_prob = 0.0;

    const Fact* find_fact(TokenId attribute) const;
    int max_scroll() const;

    bool operator==(const Page&) const = default;
};

/// Immutable web graph. Real pages have ids 0..n-1; every query token also
/// owns a synthesized search-results page with id results_page_id(query).
class WebGraph {
public:
    WebGraph(Vocabulary vocabulary, std::vector<Page> pages, PageId start_page,
             std::map<TokenId, std::vector<PageId>> search_index, int results_window);

    const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
    PageId start_page() const noexcept { return start_page_; }
    const std::vector<Page>& pages() const noexcept { return pages_; }
    const std::map<TokenId, std::vector<PageId>>& search_index() const noexcept { return search_index_; }
    int results_window() const noexcept { return results_window_; }

    bool has_page(PageId id) const noexcept;
    const Page& page(PageId id) const;

    static PageId results_page_id(TokenId query) noexcept { return -1 - static_cast<PageId>(query); }
    static bool is_results_page(PageId id) noexcept { return id < 0; }

    /// Query vocabulary: attribute, name and qualifier tokens in id order.
    const std::vector<TokenId>& query_tokens() const noexcept { return queries_; }
    const std::vector<TokenId>& value_tokens() const noexcept { return values_; }
    int max_window() const noexcept { return max_window_; }

    bool operator==(const WebGraph& other) const {
        return vocabulary_ == other.vocabulary_ && pages_ == other.pages_ &&
               start_page_ == other.start_page_ && search_index_ == other.search_index_ &&
               results_window_ == other.results_window_;
    }

private:
    Vocabulary vocabulary_;
    std::vector<Page> pages_;
    PageId start_page_;
    std::map<TokenId, std::vector<PageId>> search_index_;
    int results_window_;
    std::vector<TokenId> queries_;
    std::vector<TokenId> values_;
    std::map<TokenId, Page> results_pages_;
    int max_window_ = 1;
};

/// Pages reachable from the start page by following links only.
std::vector<bool> reachable_from_start(const WebGraph& graph);

} // namespace tti::env
