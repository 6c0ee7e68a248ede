#include "support/fixtures.hpp"
#include "tti/env/episode.hpp"
#include "tti/taskgen/generator.hpp"

#include <doctest.h>

#include <deque>
#include <set>

using namespace tti;
using namespace tti::env;
using namespace tti::taskgen;
using tti::testing::all_families;
using tti::testing::error_code_of;
using tti::testing::make_g3;
using tti::testing::small_world_config;

namespace {

// Independent breadth-first reachability over links only.
std::set<PageId> bfs(const WebGraph& g) {
    std::set<PageId> seen{g.start_page()};
    std::deque<PageId> q{g.start_page()};
    while (!q.empty()) {
        const PageId p = q.front();
        q.pop_front();
        for (const Link& l : g.pages()[static_cast<std::size_t>(p)].links) {
            if (seen.insert(l.target).second) q.push_back(l.target);
        }
    }
    return seen;
}

} // namespace

TEST_CASE("tiny graphs are deterministic per seed") {
    WorldConfig c;
    c.n_pages = 3;
    c.mean_branching = 1.0;
    CHECK(generate_graph(c, 1) == generate_graph(c, 1));
}

TEST_CASE("every generated page is reachable from the start page") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        WorldConfig c = small_world_config();
        c.n_pages = 16 + static_cast<int>(seed) * 6;
        const WebGraph g = generate_graph(c, seed);
        CHECK(bfs(g).size() == g.pages().size());
    }
}

TEST_CASE("without distractors no two entities share a name") {
    WorldConfig c = small_world_config();
    c.distractor_rate = 0.0;
    const WebGraph g = generate_graph(c, 4);
    std::set<TokenId> names;
    for (const Page& p : g.pages()) {
        if (p.kind == PageKind::Entity) CHECK(names.insert(p.descriptors[0]).second);
    }
}

TEST_CASE("distractors reuse a name under another qualifier with conflicting facts") {
    WorldConfig c = small_world_config();
    c.distractor_rate = 0.5;
    const WebGraph g = generate_graph(c, 4);
    std::map<TokenId, std::vector<const Page*>> by_name;
    for (const Page& p : g.pages()) {
        if (p.kind == PageKind::Entity) by_name[p.descriptors[0]].push_back(&p);
    }
    int shared = 0;
    for (const auto& [name, ps] : by_name) {
        std::set<TokenId> quals;
        for (const Page* p : ps) CHECK(quals.insert(p->descriptors[1]).second);
        if (ps.size() >= 2) {
            ++shared;
            for (std::size_t k = 0; k < ps[0]->facts.size(); ++k) CHECK(ps[0]->facts[k] != ps[1]->facts[k]);
        }
    }
    CHECK(shared > 0);
}

TEST_CASE("infeasible world configs are rejected") {
    WorldConfig c;
    c.n_pages = 2;
    CHECK(error_code_of([&] { generate_graph(c, 1); }) == ErrorCode::InfeasibleConfig);
    c.n_pages = 20;
    c.mean_branching = 0.5;
    CHECK(error_code_of([&] { generate_graph(c, 1); }) == ErrorCode::InfeasibleConfig);
    c.mean_branching = 2.0;
    c.popup_rate = 1.5;
    CHECK(error_code_of([&] { generate_graph(c, 1); }) == ErrorCode::ConfigError);
}

TEST_CASE("world configs round-trip through json") {
    WorldConfig c = small_world_config();
    c.index_names = false;
    const WorldConfig back = world_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
}

TEST_CASE("unindexed names are absent from search results") {
    WorldConfig c = small_world_config();
    c.index_names = false;
    const WebGraph g = generate_graph(c, 2);
    for (const auto& [q, results] : g.search_index()) {
        CHECK(g.vocabulary().kind(q) != TokenKind::Name);
    }
}

TEST_CASE("G3 lookup tasks come with replayable certificates") {
    const WebGraph g = make_g3();
    const auto tasks = generate_tasks(g, 2, {{TaskFamily::Lookup, 1.0}}, 3);
    REQUIRE(tasks.size() == 2);
    for (const Task& t : tasks) {
        CHECK(t.certificate_len == static_cast<int>(t.certificate.size()));
        CHECK(replay_certificate(g, t, t.certificate_len) == t.correct_answer);
    }
}

TEST_CASE("asking for more tasks than the graph supports fails") {
    const WebGraph g = make_g3();
    CHECK(error_code_of([&] { generate_tasks(g, 3, {{TaskFamily::Lookup, 1.0}}, 3); }) ==
          ErrorCode::ExhaustedProposals);
    CHECK(error_code_of([&] { generate_tasks(g, 1, {{TaskFamily::Lookup, 0.0}}, 3); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("generated tasks are deterministic and certified for every family") {
    const WebGraph g = generate_graph(small_world_config(), 9);
    const auto a = generate_tasks(g, 40, all_families(), 5);
    CHECK(a == generate_tasks(g, 40, all_families(), 5));
    std::set<TaskFamily> families;
    for (const Task& t : a) {
        families.insert(t.family);
        CHECK(t.certificate_len <= 30);
        CHECK(t.popups == (t.family == TaskFamily::PopupNoise));
        CHECK(replay_certificate(g, t, 30) == t.correct_answer);
    }
    CHECK(families.size() == kTaskFamilyCount);
}

TEST_CASE("certificate length bounds are honored") {
    const WebGraph g = generate_graph(small_world_config(), 9);
    TaskGenOptions o;
    o.min_certificate_len = 4;
    o.h_max = 12;
    for (const Task& t : generate_tasks(g, 10, all_families(), 5, o)) {
        CHECK(t.certificate_len >= 4);
        CHECK(t.certificate_len <= 12);
    }
    o.min_certificate_len = 13;
    CHECK(error_code_of([&] { generate_tasks(g, 1, all_families(), 5, o); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("split is disjoint, exhaustive and seeded") {
    const WebGraph g = generate_graph(small_world_config(), 9);
    const auto tasks = generate_tasks(g, 10, all_families(), 5);
    const auto [train, test] = split(tasks, 0.2, 1);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
    std::set<std::uint64_t> ids;
    for (const Task& t : train) ids.insert(t.task_id);
    for (const Task& t : test) CHECK(ids.insert(t.task_id).second);
    CHECK(ids.size() == 10);
    CHECK(split(tasks, 0.2, 1) == std::pair{train, test});
    CHECK(error_code_of([&] { split({tasks[0]}, 0.2, 1); }) == ErrorCode::TooFewTasks);
}
