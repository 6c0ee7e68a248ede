#include "tti/taskgen/generator.hpp"

#include "tti/core/error.hpp"
#include "tti/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <string>
#include <tuple>

namespace tti::taskgen {

using env::Action;
using env::Page;
using env::PageId;
using env::PageKind;
using env::Task;
using env::TaskFamily;
using env::TokenId;
using env::TokenKind;
using env::WebGraph;
using nlohmann::json;

void WorldConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigError, "world config: " + what); };
    if (n_pages < 1) bad("n_pages must be >= 1");
    if (n_attributes < 1) bad("n_attributes must be >= 1");
    if (n_values < 1) bad("n_values must be >= 1");
    if (n_qualifiers < 1) bad("n_qualifiers must be >= 1");
    if (n_relations < 1) bad("n_relations must be >= 1");
    if (window_size < 1) bad("window_size must be >= 1");
    if (!(mean_branching >= 0.0)) bad("mean_branching must be >= 0");
    for (double r : {distractor_rate, popup_rate, popup_prob}) {
        if (!(r >= 0.0 && r <= 1.0)) bad("rates must lie in [0,1]");
    }
}

json to_json(const WorldConfig& c) {
    return json{{"n_pages", c.n_pages},
                {"mean_branching", c.mean_branching},
                {"n_attributes", c.n_attributes},
                {"n_values", c.n_values},
                {"n_qualifiers", c.n_qualifiers},
                {"n_relations", c.n_relations},
                {"distractor_rate", c.distractor_rate},
                {"popup_rate", c.popup_rate},
                {"popup_prob", c.popup_prob},
                {"window_size", c.window_size},
                {"index_names", c.index_names}};
}

WorldConfig world_config_from_json(const json& doc) {
    WorldConfig c;
    try {
        c.n_pages = doc.value("n_pages", c.n_pages);
        c.mean_branching = doc.value("mean_branching", c.mean_branching);
        c.n_attributes = doc.value("n_attributes", c.n_attributes);
        c.n_values = doc.value("n_values", c.n_values);
        c.n_qualifiers = doc.value("n_qualifiers", c.n_qualifiers);
        c.n_relations = doc.value("n_relations", c.n_relations);
        c.distractor_rate = doc.value("distractor_rate", c.distractor_rate);
        c.popup_rate = doc.value("popup_rate", c.popup_rate);
        c.popup_prob = doc.value("popup_prob", c.popup_prob);
        c.window_size = doc.value("window_size", c.window_size);
        c.index_names = doc.value("index_names", c.index_names);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("world config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

std::string numbered(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
    return buf;
}

struct EntitySpec {
    int name = 0;
    int qualifier = 0;
    std::vector<int> values;  // one per attribute
};

} // namespace

WebGraph generate_graph(const WorldConfig& config, std::uint64_t seed) {
    config.validate();
    if (config.n_pages < 3) {
        throw Error(ErrorCode::InfeasibleConfig, "need at least 3 pages (home, hub, entity)");
    }
    const int n = config.n_pages;
    const int tree_links = n - 1;
    const auto total_links = static_cast<int>(std::lround(config.mean_branching * n));
    if (total_links < tree_links) {
        throw Error(ErrorCode::InfeasibleConfig, "mean_branching " + std::to_string(config.mean_branching) +
                                                     " cannot connect " + std::to_string(n) + " pages");
    }
    Rng rng(derive_seed(seed, {0x6772617068ULL}));

    const int hubs = std::min(config.n_qualifiers, n - 2);
    const int n_entities = n - 1 - hubs;

    env::Vocabulary vocab;
    const TokenId home_token = vocab.intern("home", TokenKind::Other);
    std::vector<TokenId> qualifiers, attributes, values, relations, names;
    for (int i = 0; i < hubs; ++i) qualifiers.push_back(vocab.intern(numbered("q", i), TokenKind::Qualifier));
    for (int i = 0; i < config.n_attributes; ++i)
        attributes.push_back(vocab.intern(numbered("a", i), TokenKind::Attribute));
    for (int i = 0; i < config.n_values; ++i) values.push_back(vocab.intern(numbered("v", i), TokenKind::Value));
    for (int i = 0; i < config.n_relations; ++i)
        relations.push_back(vocab.intern(numbered("r", i), TokenKind::Relation));

    // Originals have unique names; distractors reuse a name under another
    // qualifier, so one name supports at most `hubs` pages.
    int n_distractors = hubs >= 2 ? static_cast<int>(std::floor(config.distractor_rate * n_entities)) : 0;
    n_distractors = std::min(n_distractors, n_entities * (hubs - 1) / std::max(hubs, 1));
    const int n_originals = n_entities - n_distractors;
    for (int i = 0; i < n_originals; ++i) names.push_back(vocab.intern(numbered("e", i), TokenKind::Name));

    auto random_values = [&] {
        std::vector<int> v(static_cast<std::size_t>(config.n_attributes));
        for (int& x : v) x = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.n_values)));
        return v;
    };
    std::vector<EntitySpec> specs;
    std::vector<std::vector<int>> used_qualifiers(static_cast<std::size_t>(n_originals));
    for (int i = 0; i < n_originals; ++i) {
        specs.push_back({i, i % hubs, random_values()});
        used_qualifiers[static_cast<std::size_t>(i)].push_back(i % hubs);
    }
    std::vector<int> originals(static_cast<std::size_t>(n_originals));
    for (int i = 0; i < n_originals; ++i) originals[static_cast<std::size_t>(i)] = i;
    shuffle(std::span<int>(originals), rng);
    for (int d = 0; d < n_distractors; ++d) {
        const int original = originals[static_cast<std::size_t>(d % n_originals)];
        const EntitySpec base = specs[static_cast<std::size_t>(original)];
        auto& used = used_qualifiers[static_cast<std::size_t>(original)];
        std::vector<int> free;
        for (int q = 0; q < hubs; ++q) {
            if (std::find(used.begin(), used.end(), q) == used.end()) free.push_back(q);
        }
        EntitySpec copy;
        copy.name = base.name;
        copy.qualifier = free[uniform_index(rng, free.size())];
        used.push_back(copy.qualifier);
        copy.values = random_values();
        for (std::size_t a = 0; a < copy.values.size() && config.n_values > 1; ++a) {
            while (copy.values[a] == base.values[a]) {
                copy.values[a] = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.n_values)));
            }
        }
        specs.push_back(std::move(copy));
    }
    shuffle(std::span<EntitySpec>(specs), rng);

    std::vector<Page> pages(static_cast<std::size_t>(n));
    pages[0].id = 0;
    pages[0].kind = PageKind::Home;
    pages[0].descriptors = {};
    for (int h = 0; h < hubs; ++h) {
        Page& hub = pages[static_cast<std::size_t>(1 + h)];
        hub.id = 1 + h;
        hub.kind = PageKind::Hub;
        hub.descriptors = {qualifiers[static_cast<std::size_t>(h)]};
        pages[0].links.push_back({qualifiers[static_cast<std::size_t>(h)], hub.id});
    }
    (void)home_token;
    const PageId first_entity = 1 + hubs;
    for (int e = 0; e < n_entities; ++e) {
        const EntitySpec& s = specs[static_cast<std::size_t>(e)];
        Page& p = pages[static_cast<std::size_t>(first_entity + e)];
        p.id = first_entity + e;
        p.kind = PageKind::Entity;
        p.descriptors = {names[static_cast<std::size_t>(s.name)], qualifiers[static_cast<std::size_t>(s.qualifier)]};
        for (int a = 0; a < config.n_attributes; ++a) {
            p.facts.push_back({attributes[static_cast<std::size_t>(a)],
                               values[static_cast<std::size_t>(s.values[static_cast<std::size_t>(a)])]});
        }
    }
    for (int h = 0; h < hubs; ++h) {
        std::vector<PageId> members;
        for (int e = 0; e < n_entities; ++e) {
            if (specs[static_cast<std::size_t>(e)].qualifier == h) members.push_back(first_entity + e);
        }
        shuffle(std::span<PageId>(members), rng);
        Page& hub = pages[static_cast<std::size_t>(1 + h)];
        for (PageId m : members) {
            hub.links.push_back({pages[static_cast<std::size_t>(m)].descriptors[0], m});
        }
    }

    // Relation links between entity pages, at most one per relation label per page.
    int extra = total_links - tree_links;
    if (n_entities >= 2) {
        std::vector<std::pair<PageId, TokenId>> free_slots;
        for (int e = 0; e < n_entities; ++e) {
            for (TokenId r : relations) free_slots.emplace_back(first_entity + e, r);
        }
        shuffle(std::span<std::pair<PageId, TokenId>>(free_slots), rng);
        for (std::size_t k = 0; k < free_slots.size() && extra > 0; ++k, --extra) {
            const auto [from, label] = free_slots[k];
            PageId to = from;
            while (to == from) {
                to = first_entity + static_cast<PageId>(uniform_index(rng, static_cast<std::size_t>(n_entities)));
            }
            pages[static_cast<std::size_t>(from)].links.push_back({label, to});
        }
        for (int e = 0; e < n_entities; ++e) {
            auto& links = pages[static_cast<std::size_t>(first_entity + e)].links;
            shuffle(std::span<env::Link>(links), rng);
        }
    }

    for (Page& p : pages) {
        p.window_size = config.window_size;
    }
    const auto n_popups = static_cast<int>(std::lround(config.popup_rate * n_entities));
    std::vector<PageId> entity_ids;
    for (int e = 0; e < n_entities; ++e) entity_ids.push_back(first_entity + e);
    shuffle(std::span<PageId>(entity_ids), rng);
    for (int k = 0; k < n_popups && config.popup_prob > 0.0; ++k) {
        pages[static_cast<std::size_t>(entity_ids[static_cast<std::size_t>(k)])].popup_prob = config.popup_prob;
    }

    std::map<TokenId, std::vector<PageId>> index;
    for (const Page& p : pages) {
        if (p.kind == PageKind::Hub) {
            index[p.descriptors[0]].push_back(p.id);
        } else if (p.kind == PageKind::Entity) {
            for (TokenId d : p.descriptors) {
                if (config.index_names || d != p.descriptors[0]) index[d].push_back(p.id);
            }
            for (const env::Fact& f : p.facts) index[f.attribute].push_back(p.id);
        }
    }
    for (auto& [q, results] : index) {
        std::sort(results.begin(), results.end());
        results.erase(std::unique(results.begin(), results.end()), results.end());
    }

    WebGraph graph(std::move(vocab), std::move(pages), 0, std::move(index), config.window_size);
    const auto reach = env::reachable_from_start(graph);
    if (std::find(reach.begin(), reach.end(), false) != reach.end()) {
        throw Error(ErrorCode::InfeasibleConfig, "generated graph is not connected from the start page");
    }
    return graph;
}

namespace {

struct SearchState {
    PageId page;
    int scroll;
    unsigned mask;
    auto operator<=>(const SearchState&) const = default;
};

class EvidenceTracker {
public:
    explicit EvidenceTracker(const Task& task) : task_(task) {
        full_ = task.evidence.size() >= 2 ? 3u : 1u;
    }

    unsigned full() const { return full_; }

    unsigned on_enter(unsigned mask, PageId from, PageId to, const env::Link* via) const {
        const auto& ev = task_.evidence;
        if (task_.family == TaskFamily::MultiHop) {
            if (to == ev[0]) mask |= 1u;
            if ((mask & 1u) && from == ev[0] && via != nullptr && to == ev[1] &&
                via->label == task_.goal.descriptors[2]) {
                mask |= 2u;
            }
            return mask;
        }
        for (std::size_t i = 0; i < ev.size() && i < 2; ++i) {
            if (to == ev[i]) mask |= 1u << i;
        }
        return mask;
    }

private:
    const Task& task_;
    unsigned full_ = 1;
};

} // namespace

std::optional<std::vector<Action>> find_certificate(const WebGraph& graph, const Task& task, int h_max) {
    if (h_max < 1 || task.evidence.empty()) {
        return std::nullopt;
    }
    const EvidenceTracker tracker(task);
    const auto& vocab = graph.vocabulary();
    std::vector<TokenId> queries;
    auto add_query = [&](TokenId t) {
        const TokenKind k = vocab.kind(t);
        if ((k == TokenKind::Attribute || k == TokenKind::Name || k == TokenKind::Qualifier) &&
            std::find(queries.begin(), queries.end(), t) == queries.end()) {
            queries.push_back(t);
        }
    };
    add_query(task.goal.attribute);
    for (TokenId d : task.goal.descriptors) add_query(d);

    struct Parent {
        SearchState prev;
        Action action;
        int depth;
    };
    std::map<SearchState, Parent> parents;
    const SearchState start{graph.start_page(), 0, tracker.on_enter(0u, -1, graph.start_page(), nullptr)};
    parents.emplace(start, Parent{start, env::GoBack{}, 0});
    std::deque<SearchState> frontier{start};
    std::optional<SearchState> goal;
    if (start.mask == tracker.full()) goal = start;

    while (!frontier.empty() && !goal) {
        const SearchState s = frontier.front();
        frontier.pop_front();
        const int depth = parents.at(s).depth;
        if (depth + 1 >= h_max) {
            continue;  // no room left for the final Stop
        }
        const Page& p = graph.page(s.page);
        std::vector<std::pair<Action, SearchState>> moves;
        const auto begin = static_cast<std::size_t>(s.scroll) * static_cast<std::size_t>(p.window_size);
        for (std::size_t k = begin; k < std::min(p.links.size(), begin + static_cast<std::size_t>(p.window_size)); ++k) {
            const env::Link& l = p.links[k];
            moves.push_back({env::Click{static_cast<int>(k - begin)},
                             {l.target, 0, tracker.on_enter(s.mask, s.page, l.target, &l)}});
        }
        if (s.scroll < p.max_scroll()) {
            moves.push_back({env::Scroll{env::ScrollDirection::Down}, {s.page, s.scroll + 1, s.mask}});
        }
        if (s.scroll > 0) {
            moves.push_back({env::Scroll{env::ScrollDirection::Up}, {s.page, s.scroll - 1, s.mask}});
        }
        for (TokenId q : queries) {
            const PageId r = WebGraph::results_page_id(q);
            moves.push_back({env::Search{q}, {r, 0, tracker.on_enter(s.mask, s.page, r, nullptr)}});
        }
        for (auto& [action, next] : moves) {
            if (parents.contains(next)) continue;
            parents.emplace(next, Parent{s, action, depth + 1});
            if (next.mask == tracker.full()) {
                goal = next;
                break;
            }
            frontier.push_back(next);
        }
    }
    if (!goal) {
        return std::nullopt;
    }
    std::vector<Action> path;
    for (SearchState s = *goal; !(s == start);) {
        const Parent& par = parents.at(s);
        path.push_back(par.action);
        s = par.prev;
    }
    std::reverse(path.begin(), path.end());
    path.push_back(env::Stop{task.correct_answer});
    if (static_cast<int>(path.size()) > h_max) {
        return std::nullopt;
    }
    return path;
}

namespace {

struct Candidate {
    TaskFamily family;
    env::Goal goal;
    TokenId answer;
    std::vector<PageId> evidence;
};

std::vector<Candidate> enumerate_candidates(const WebGraph& graph, TaskFamily family) {
    std::vector<Candidate> out;
    const auto& pages = graph.pages();
    const auto& vocab = graph.vocabulary();
    std::vector<const Page*> entities;
    for (const Page& p : pages) {
        if (p.kind == PageKind::Entity && p.descriptors.size() >= 2) entities.push_back(&p);
    }
    switch (family) {
    case TaskFamily::Lookup:
    case TaskFamily::PopupNoise:
        for (const Page* p : entities) {
            const bool has_popup = p->popup_prob > 0.0;
            if (has_popup != (family == TaskFamily::PopupNoise)) continue;
            for (const env::Fact& f : p->facts) {
                out.push_back({family, {f.attribute, {p->descriptors[0], p->descriptors[1]}}, f.value, {p->id}});
            }
        }
        break;
    case TaskFamily::MultiHop:
        for (const Page* p : entities) {
            for (const env::Link& l : p->links) {
                if (vocab.kind(l.label) != TokenKind::Relation || l.target == p->id) continue;
                const Page& target = graph.page(l.target);
                for (const env::Fact& f : target.facts) {
                    out.push_back({family,
                                   {f.attribute, {p->descriptors[0], p->descriptors[1], l.label}},
                                   f.value,
                                   {p->id, target.id}});
                }
            }
        }
        break;
    case TaskFamily::Compare:
        for (std::size_t i = 0; i < entities.size(); ++i) {
            for (std::size_t j = i + 1; j < entities.size(); ++j) {
                const Page* a = entities[i];
                const Page* b = entities[j];
                if (a->descriptors[0] == b->descriptors[0]) continue;
                for (const env::Fact& fa : a->facts) {
                    const env::Fact* fb = b->find_fact(fa.attribute);
                    if (fb == nullptr || fb->value == fa.value) continue;
                    out.push_back({family,
                                   {fa.attribute, {a->descriptors[0], a->descriptors[1], b->descriptors[0], b->descriptors[1]}},
                                   std::max(fa.value, fb->value),
                                   {a->id, b->id}});
                }
            }
        }
        break;
    }
    return out;
}

} // namespace

std::vector<Task> generate_tasks(const WebGraph& graph, int n, const FamilyMix& family_mix, std::uint64_t seed,
                                 const TaskGenOptions& options) {
    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "task count must be nonnegative");
    }
    if (options.min_certificate_len > options.h_max) {
        throw Error(ErrorCode::InvalidArgument, "min_certificate_len exceeds h_max");
    }
    std::vector<double> weights;
    double total = 0.0;
    for (TaskFamily f : env::kAllTaskFamilies) {
        auto it = family_mix.find(f);
        const double w = it == family_mix.end() ? 0.0 : it->second;
        if (!(w >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "family weights must be nonnegative");
        }
        weights.push_back(w);
        total += w;
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "family weights must not all be zero");
    }

    Rng rng(derive_seed(seed, {0x7461736b73ULL}));
    std::vector<std::vector<Candidate>> pools(env::kTaskFamilyCount);
    std::vector<std::size_t> cursor(env::kTaskFamilyCount, 0);
    for (std::size_t f = 0; f < env::kTaskFamilyCount; ++f) {
        if (weights[f] > 0.0) {
            pools[f] = enumerate_candidates(graph, env::kAllTaskFamilies[f]);
            shuffle(std::span<Candidate>(pools[f]), rng);
        }
    }

    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(n));
    long attempts = 0;
    const long max_attempts = static_cast<long>(std::max(1, n)) * options.max_attempts_per_task;
    while (static_cast<int>(tasks.size()) < n) {
        if (++attempts > max_attempts) {
            throw Error(ErrorCode::ExhaustedProposals, "too many rejected proposals");
        }
        const std::size_t f = sample_weighted(rng, weights);
        if (cursor[f] >= pools[f].size()) {
            throw Error(ErrorCode::ExhaustedProposals,
                        "graph cannot support more " + std::string(to_string(env::kAllTaskFamilies[f])) +
                            " tasks (" + std::to_string(tasks.size()) + " of " + std::to_string(n) + " generated)");
        }
        const Candidate& c = pools[f][cursor[f]++];
        Task task;
        task.task_id = tasks.size();
        task.family = c.family;
        task.goal = c.goal;
        task.correct_answer = c.answer;
        task.evidence = c.evidence;
        task.popups = c.family == TaskFamily::PopupNoise;
        auto certificate = find_certificate(graph, task, options.h_max);
        if (!certificate || static_cast<int>(certificate->size()) < options.min_certificate_len) {
            continue;
        }
        if (c.family == TaskFamily::MultiHop && certificate->size() < 3) {
            continue;
        }
        task.certificate = std::move(*certificate);
        task.certificate_len = static_cast<int>(task.certificate.size());
        tasks.push_back(std::move(task));
    }
    return tasks;
}

std::pair<std::vector<Task>, std::vector<Task>> split(const std::vector<Task>& tasks, double test_fraction,
                                                      std::uint64_t seed) {
    if (tasks.size() < 2) {
        throw Error(ErrorCode::TooFewTasks, "need at least two tasks to split");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0,1)");
    }
    const std::size_t n = tasks.size();
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, {0x73706c6974ULL}));
    shuffle(std::span<std::size_t>(order), rng);
    std::vector<bool> is_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;
    std::pair<std::vector<Task>, std::vector<Task>> out;
    for (std::size_t i = 0; i < n; ++i) {
        (is_test[i] ? out.second : out.first).push_back(tasks[i]);
    }
    return out;
}

} // namespace tti::taskgen
