#include <algorithm>

#include "doctest.h"
#include "rics/truss.hpp"
#include "test_helpers.hpp"

using namespace rics;

namespace {

Subgraph complete(int n) {
    Subgraph sg;
    for (int v = 0; v < n; ++v) sg.vertices.push_back(v);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) sg.edges.emplace_back(u, v);
    return sg;
}

Subgraph induced(const SocialNetwork& g, const std::vector<VertexId>& verts) {
    Subgraph sg;
    sg.vertices = verts;
    std::sort(sg.vertices.begin(), sg.vertices.end());
    for (VertexId u : sg.vertices)
        for (const auto& nb : g.neighbors(u))
            if (nb.to > u && std::binary_search(sg.vertices.begin(), sg.vertices.end(), nb.to))
                sg.edges.emplace_back(u, nb.to);
    std::sort(sg.edges.begin(), sg.edges.end());
    return sg;
}

}  // namespace

TEST_CASE("edge_support counts triangles in the subgraph") {
    CHECK(edge_support(complete(3), 0, 1) == 1);
    CHECK(edge_support(complete(4), 2, 3) == 2);

    Subgraph star;
    star.vertices = {0, 1, 2, 3};
    star.edges = {{0, 1}, {0, 2}, {0, 3}};
    CHECK(edge_support(star, 0, 1) == 0);
    CHECK_THROWS_AS(edge_support(star, 1, 2), ValidationError);
}

TEST_CASE("support_upper_bound dominates induced supports") {
    // K4 in isolation: bound 2 on each edge
    auto k4 = testing::simple_graph(4, {{0, 1, .5}, {0, 2, .5}, {0, 3, .5},
                                        {1, 2, .5}, {1, 3, .5}, {2, 3, .5}});
    CHECK(support_upper_bound(k4, 0, 1) == 2);

    // bridge edge: no common neighbors
    auto bridge = testing::simple_graph(4, {{0, 1, .5}, {1, 2, .5}, {2, 3, .5}});
    CHECK(support_upper_bound(bridge, 1, 2) == 0);

    // random subgraphs never exceed the full-graph bound
    auto g = testing::random_connected_graph(30, 60, 77);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<VertexId> verts;
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (rng.next_unit() < 0.5) verts.push_back(v);
        auto sg = induced(g, verts);
        for (const auto& [u, v] : sg.edges)
            CHECK(edge_support(sg, u, v) <= support_upper_bound(g, u, v));
    }
}

TEST_CASE("is_k_truss") {
    CHECK(is_k_truss(complete(3), 3));
    CHECK_FALSE(is_k_truss(complete(3), 4));

    // K5 minus one edge is still a 4-truss
    Subgraph k5m = complete(5);
    k5m.edges.erase(std::remove(k5m.edges.begin(), k5m.edges.end(),
                                std::pair<VertexId, VertexId>{0, 1}),
                    k5m.edges.end());
    for (const auto& [u, v] : k5m.edges) CHECK(edge_support(k5m, u, v) >= 2);
    CHECK(is_k_truss(k5m, 4));
    CHECK_FALSE(is_k_truss(k5m, 5));

    // disconnected pair of triangles is not a truss
    Subgraph two;
    two.vertices = {0, 1, 2, 3, 4, 5};
    two.edges = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}};
    CHECK_FALSE(is_k_truss(two, 3));
}

TEST_CASE("maximal_k_truss peels pendants") {
    // K4 plus a pendant vertex 4
    Subgraph sg = complete(4);
    sg.vertices.push_back(4);
    sg.edges.emplace_back(0, 4);

    auto inside = maximal_k_truss(sg, 4, 1);
    REQUIRE(inside.has_value());
    CHECK(inside->vertices == std::vector<VertexId>{0, 1, 2, 3});
    CHECK(inside->edges.size() == 6);

    CHECK_FALSE(maximal_k_truss(sg, 4, 4).has_value());
}

TEST_CASE("maximal_k_truss output is maximal: every induced k-truss is contained") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        auto g = testing::random_connected_graph(9, 14, seed);
        Subgraph whole = induced(g, [&] {
            std::vector<VertexId> all;
            for (VertexId v = 0; v < g.vertex_count(); ++v) all.push_back(v);
            return all;
        }());
        for (int k : {3, 4}) {
            for (VertexId anchor = 0; anchor < g.vertex_count(); ++anchor) {
                auto result = maximal_k_truss(whole, k, anchor);
                if (result) {
                    CHECK(is_k_truss(*result, k));
                    CHECK(result->contains(anchor));
                }
                // oracle: enumerate all vertex subsets containing the anchor
                std::size_t n = g.vertex_count();
                for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                    if (!(mask & (1u << anchor))) continue;
                    if (__builtin_popcount(mask) < 3) continue;
                    std::vector<VertexId> verts;
                    for (std::size_t v = 0; v < n; ++v)
                        if (mask & (1u << v)) verts.push_back(static_cast<VertexId>(v));
                    auto sub = induced(g, verts);
                    if (sub.edges.size() < 3) continue;
                    if (is_k_truss(sub, k)) {
                        REQUIRE(result.has_value());
                        CHECK(std::includes(result->vertices.begin(), result->vertices.end(),
                                            verts.begin(), verts.end()));
                    }
                }
            }
        }
    }
}

TEST_CASE("peeling is confluent under randomized edge orders") {
    // shuffling the input edge order never changes the maximal truss
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = testing::random_connected_graph(10, 16, seed);
        std::vector<VertexId> all;
        for (VertexId v = 0; v < g.vertex_count(); ++v) all.push_back(v);
        auto base = induced(g, all);
        auto expect = maximal_k_truss(base, 3, 0);
        Rng rng(seed * 31);
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            Subgraph alt = base;
            for (std::size_t i = alt.edges.size(); i > 1; --i)
                std::swap(alt.edges[i - 1], alt.edges[rng.next_index(i)]);
            auto got = maximal_k_truss(alt, 3, 0);
            CHECK(got.has_value() == expect.has_value());
            if (got && expect) {
                CHECK(got->vertices == expect->vertices);
                auto ge = got->edges;
                std::sort(ge.begin(), ge.end());
                CHECK(ge == expect->edges);
            }
        }
    }
}

TEST_CASE("trim_to_size is the identity under the cap") {
    auto k4 = complete(4);
    auto out = trim_to_size(k4, 5, 4, 0, [](VertexId) { return 1.0; });
    REQUIRE(out.has_value());
    CHECK(out->vertices == k4.vertices);
}

TEST_CASE("trim_to_size drops the lowest-ranked vertex from K5") {
    auto k5 = complete(5);
    // equal ranks: ties break by ascending id, so vertex 1 goes first
    auto out = trim_to_size(k5, 4, 3, 0, [](VertexId) { return 1.0; });
    REQUIRE(out.has_value());
    CHECK(out->vertices == std::vector<VertexId>{0, 2, 3, 4});
    CHECK(is_k_truss(*out, 3));

    // oracle: every 4-subset of K5 containing the anchor is a K4, so any
    // removal works; the deterministic choice removes the smallest id
    auto ranked = trim_to_size(k5, 4, 3, 0, [](VertexId v) { return v == 2 ? 0.0 : 1.0; });
    REQUIRE(ranked.has_value());
    CHECK(ranked->vertices == std::vector<VertexId>{0, 1, 3, 4});
}

TEST_CASE("trim_to_size fails when no removal keeps the truss") {
    auto k4 = complete(4);
    CHECK_FALSE(trim_to_size(k4, 3, 4, 0, [](VertexId) { return 1.0; }).has_value());
}

TEST_CASE("trim_to_size keeps the anchor and satisfies the truss on random graphs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = testing::random_connected_graph(14, 30, seed);
        std::vector<VertexId> all;
        for (VertexId v = 0; v < g.vertex_count(); ++v) all.push_back(v);
        auto base = induced(g, all);
        auto truss = maximal_k_truss(base, 3, 2);
        if (!truss || truss->vertices.size() <= 4) continue;
        auto out = trim_to_size(*truss, 4, 3, 2, [](VertexId v) { return static_cast<double>(v); });
        if (out) {
            CHECK(out->vertices.size() <= 4);
            CHECK(out->contains(2));
            CHECK(is_k_truss(*out, 3));
        }
    }
}
