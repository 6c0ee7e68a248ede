#include "tti/env/webgraph.hpp"

#include "tti/core/error.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace tti::env {

std::string_view to_string(PageKind kind) noexcept {
    switch (kind) {
    case PageKind::Home: return "home";
    case PageKind::Hub: return "hub";
    case PageKind::Entity: return "entity";
    case PageKind::Results: return "results";
    }
    return "entity";
}

PageKind page_kind_from_string(std::string_view text) {
    if (text == "home") return PageKind::Home;
    if (text == "hub") return PageKind::Hub;
    if (text == "entity") return PageKind::Entity;
    if (text == "results") return PageKind::Results;
    throw Error(ErrorCode::InvalidGraph, "unknown page kind '" + std::string(text) + "'");
}

const Fact* Page::find_fact(TokenId attribute) const {
    auto it = std::lower_bound(facts.begin(), facts.end(), attribute,
                               [](const Fact& f, TokenId a) { return f.attribute < a; });
    if (it != facts.end() && it->attribute == attribute) {
        return &*it;
    }
    return nullptr;
}

int Page::max_scroll() const {
    if (links.empty()) {
        return 0;
    }
    return static_cast<int>((links.size() - 1) / static_cast<std::size_t>(window_size));
}

namespace {

void fail(const std::string& what) { throw Error(ErrorCode::InvalidGraph, what); }

} // namespace

WebGraph::WebGraph(Vocabulary vocabulary, std::vector<Page> pages, PageId start_page,
                   std::map<TokenId, std::vector<PageId>> search_index, int results_window)
    : vocabulary_(std::move(vocabulary)), pages_(std::move(pages)), start_page_(start_page),
      search_index_(std::move(search_index)), results_window_(results_window) {
    if (pages_.empty()) {
        fail("graph has no pages");
    }
    if (results_window_ < 1) {
        fail("results window must be >= 1");
    }
    const auto n = static_cast<PageId>(pages_.size());
    for (PageId i = 0; i < n; ++i) {
        Page& p = pages_[static_cast<std::size_t>(i)];
        if (p.id != i) {
            fail("page ids must be contiguous from 0 (page at index " + std::to_string(i) + ")");
        }
        if (p.window_size < 1) {
            fail("page " + std::to_string(i) + " has window_size < 1");
        }
        if (!(p.popup_prob >= 0.0 && p.popup_prob <= 1.0)) {
            fail("page " + std::to_string(i) + " has popup_prob outside [0,1]");
        }
        if (p.kind == PageKind::Results) {
            fail("results pages are synthesized, not stored");
        }
        for (const Link& l : p.links) {
            if (l.target < 0 || l.target >= n) {
                fail("page " + std::to_string(i) + " links to missing page " + std::to_string(l.target));
            }
            if (l.label >= vocabulary_.size()) {
                fail("link label outside vocabulary");
            }
        }
        std::sort(p.facts.begin(), p.facts.end(),
                  [](const Fact& a, const Fact& b) { return a.attribute < b.attribute; });
        for (std::size_t k = 1; k < p.facts.size(); ++k) {
            if (p.facts[k].attribute == p.facts[k - 1].attribute) {
                fail("page " + std::to_string(i) + " repeats an attribute");
            }
        }
        max_window_ = std::max(max_window_, p.window_size);
    }
    max_window_ = std::max(max_window_, results_window_);
    if (start_page_ < 0 || start_page_ >= n) {
        fail("start page does not exist");
    }
    for (TokenId t = 0; t < vocabulary_.size(); ++t) {
        const TokenKind k = vocabulary_.kind(t);
        if (k == TokenKind::Attribute || k == TokenKind::Name || k == TokenKind::Qualifier) {
            queries_.push_back(t);
        } else if (k == TokenKind::Value) {
            values_.push_back(t);
        }
    }
    for (const auto& [query, results] : search_index_) {
        if (query >= vocabulary_.size()) {
            fail("search index query outside vocabulary");
        }
        for (PageId r : results) {
            if (r < 0 || r >= n) {
                fail("search result " + std::to_string(r) + " does not exist");
            }
        }
    }
    for (TokenId q : queries_) {
        Page results;
        results.id = results_page_id(q);
        results.kind = PageKind::Results;
        results.descriptors = {q};
        results.window_size = results_window_;
        if (auto it = search_index_.find(q); it != search_index_.end()) {
            for (PageId target : it->second) {
                const Page& tp = pages_[static_cast<std::size_t>(target)];
                const TokenId label = tp.descriptors.empty() ? q : tp.descriptors.front();
                results.links.push_back({label, target});
            }
        }
        results_pages_.emplace(q, std::move(results));
    }
}

bool WebGraph::has_page(PageId id) const noexcept {
    if (id >= 0) {
        return static_cast<std::size_t>(id) < pages_.size();
    }
    return results_pages_.contains(static_cast<TokenId>(-1 - id));
}

const Page& WebGraph::page(PageId id) const {
    if (id >= 0) {
        if (static_cast<std::size_t>(id) >= pages_.size()) {
            fail("no page " + std::to_string(id));
        }
        return pages_[static_cast<std::size_t>(id)];
    }
    auto it = results_pages_.find(static_cast<TokenId>(-1 - id));
    if (it == results_pages_.end()) {
        fail("no results page " + std::to_string(id));
    }
    return it->second;
}

std::vector<bool> reachable_from_start(const WebGraph& graph) {
    std::vector<bool> seen(graph.pages().size(), false);
    std::deque<PageId> frontier{graph.start_page()};
    seen[static_cast<std::size_t>(graph.start_page())] = true;
    while (!frontier.empty()) {
        const PageId p = frontier.front();
        frontier.pop_front();
        for (const Link& l : graph.page(p).links) {
            if (!seen[static_cast<std::size_t>(l.target)]) {
                seen[static_cast<std::size_t>(l.target)] = true;
                frontier.push_back(l.target);
            }
        }
    }
    return seen;
}

} // namespace tti::env
