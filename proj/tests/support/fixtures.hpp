#pragma once

#include "tti/core/error.hpp"
#include "tti/env/serialize.hpp"
#include "tti/env/webgraph.hpp"
#include "tti/taskgen/generator.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace tti::testing {

/// Code of the tti::Error thrown by fn, or nullopt if it returns normally.
template <class Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// G3: home -> e00 -> e01, a three-page chain with one attribute.
///   page 0 (home):  link q00 -> 1
///   page 1 (e00):   a00 = v00, link r00 -> 2
///   page 2 (e01):   a00 = v01
/// Every name, qualifier and attribute is indexed for search.
inline env::WebGraph make_g3(double popup_prob = 0.0) {
    env::Vocabulary v;
    const auto q = v.intern("q00", env::TokenKind::Qualifier);
    const auto e0 = v.intern("e00", env::TokenKind::Name);
    const auto e1 = v.intern("e01", env::TokenKind::Name);
    const auto a = v.intern("a00", env::TokenKind::Attribute);
    const auto v0 = v.intern("v00", env::TokenKind::Value);
    const auto v1 = v.intern("v01", env::TokenKind::Value);
    const auto r = v.intern("r00", env::TokenKind::Relation);

    std::vector<env::Page> pages(3);
    pages[0] = {0, env::PageKind::Home, {}, {{q, 1}}, {}, 2, 0.0};
    pages[1] = {1, env::PageKind::Entity, {e0, q}, {{r, 2}}, {{a, v0}}, 2, popup_prob};
    pages[2] = {2, env::PageKind::Entity, {e1, q}, {}, {{a, v1}}, 2, popup_prob};
    std::map<env::TokenId, std::vector<env::PageId>> index{{q, {1, 2}}, {e0, {1}}, {e1, {2}}, {a, {1, 2}}};
    return env::WebGraph(std::move(v), std::move(pages), 0, std::move(index), 2);
}

/// Lookup of a00 on e01 with its shortest certificate.
inline env::Task g3_lookup(const env::WebGraph& g, int h_max = 5) {
    const auto& v = g.vocabulary();
    env::Task t;
    t.task_id = 0;
    t.family = env::TaskFamily::Lookup;
    t.goal = {v.id("a00"), {v.id("e01"), v.id("q00")}};
    t.correct_answer = v.id("v01");
    t.evidence = {2};
    t.certificate = *taskgen::find_certificate(g, t, h_max);
    t.certificate_len = static_cast<int>(t.certificate.size());
    return t;
}

/// Small mixed-family world used by trainer and CLI tests.
inline taskgen::WorldConfig small_world_config() {
    taskgen::WorldConfig c;
    c.n_pages = 24;
    c.n_values = 8;
    c.popup_rate = 0.3;
    return c;
}

inline taskgen::FamilyMix all_families() {
    taskgen::FamilyMix mix;
    for (env::TaskFamily f : env::kAllTaskFamilies) mix[f] = 1.0;
    return mix;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tti_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace tti::testing
