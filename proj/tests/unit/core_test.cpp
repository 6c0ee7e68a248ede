#include "support/fixtures.hpp"
#include "tti/core/csv.hpp"
#include "tti/core/hash.hpp"
#include "tti/core/parallel.hpp"
#include "tti/core/rng.hpp"

#include <doctest.h>

#include <array>
#include <set>

using namespace tti;
using tti::testing::error_code_of;

TEST_CASE("error codes carry their name in the message") {
    const Error e(ErrorCode::EmptyBuffer, "nothing to sample");
    CHECK(e.code() == ErrorCode::EmptyBuffer);
    CHECK(std::string(e.what()) == "EmptyBuffer: nothing to sample");
    CHECK(to_string(ErrorCode::CorruptCheckpoint) == "CorruptCheckpoint");
}

TEST_CASE("derive_seed is deterministic and separates streams") {
    CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
    CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
    CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, {i}));
    CHECK(seen.size() == 1000);
}

TEST_CASE("uniform draws stay in range") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform01(rng);
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(uniform_index(rng, 7) < 7);
        const double h = hash_uniform01(static_cast<std::uint64_t>(i));
        CHECK((h >= 0.0 && h < 1.0));
    }
    CHECK(error_code_of([&] { uniform_index(rng, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sample_weighted follows the weights and skips zeros") {
    Rng rng(11);
    const std::array<double, 3> w{1.0, 0.0, 3.0};
    std::array<int, 3> counts{};
    const int n = 40000;
    for (int i = 0; i < n; ++i) ++counts[sample_weighted(rng, w)];
    CHECK(counts[1] == 0);
    CHECK(static_cast<double>(counts[0]) / n == doctest::Approx(0.25).epsilon(0.05));
    const std::array<double, 2> zero{0.0, 0.0};
    CHECK(error_code_of([&] { sample_weighted(rng, zero); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("shuffle yields a permutation and is seed-deterministic") {
    std::vector<int> a{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<int> b = a;
    Rng r1(5), r2(5);
    shuffle(std::span<int>(a), r1);
    shuffle(std::span<int>(b), r2);
    CHECK(a == b);
    std::sort(a.begin(), a.end());
    CHECK(a == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("fnv1a matches the published 64-bit test vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("parallel_for covers every index once for any worker count") {
    for (std::size_t workers : {1u, 2u, 5u}) {
        std::vector<int> hits(100, 0);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
}

TEST_CASE("parallel_for rethrows the first failure") {
    auto boom = [] {
        parallel_for(10, 3, [](std::size_t i) {
            if (i == 4) throw Error(ErrorCode::Io, "disk");
        });
    };
    CHECK(error_code_of(boom) == ErrorCode::Io);
}

TEST_CASE("csv_cell quotes only when needed") {
    CHECK(csv_cell("plain") == "plain");
    CHECK(csv_cell("budget_force(2,0.8)") == "\"budget_force(2,0.8)\"");
    CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
