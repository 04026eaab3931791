#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "rics/index.hpp"
#include "rics/influence.hpp"
#include "test_helpers.hpp"

using namespace rics;

namespace {

Index build_test_index(const SocialNetwork& g, int r_max, int d, int m, int fanout,
                       std::uint64_t seed = 1) {
    IndexParams params;
    params.r_max = r_max;
    params.bits_width = 64;
    params.pivot_count = d;
    params.fanout = fanout;
    params.iter_max = 10;
    params.pivot_seed = seed;
    params.partition_seed = seed;
    auto pivots = select_pivots(g, d, seed);
    auto aux = build_vertex_aux(g, r_max, pivots, 64);
    auto parts = partition_graph(g, m, params.iter_max, r_max, seed);
    return build_index(g, std::move(aux), parts, params);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("calculate_cost basics") {
    // single partition costs nothing
    auto g = testing::random_connected_graph(20, 20, 3);
    Partitioning whole;
    whole.owner.assign(20, 0);
    whole.parts.resize(1);
    for (VertexId v = 0; v < 20; ++v) whole.parts[0].push_back(v);
    CHECK(calculate_cost(g, whole, 2) == 0);

    // 4-cycle split into opposite pairs: each vertex sees one external
    // neighbor in its 1-ball, sizes balance out
    auto c4 = testing::simple_graph(4, {{0, 1, .5}, {1, 2, .5}, {2, 3, .5}, {0, 3, .5}});
    Partitioning halves;
    halves.owner = {0, 0, 1, 1};
    halves.parts = {{0, 1}, {2, 3}};
    CHECK(calculate_cost(c4, halves, 1) == 4);

    // singleton partitions: every neighbor is external
    Partitioning singles;
    singles.owner = {0, 1, 2, 3};
    singles.parts = {{0}, {1}, {2}, {3}};
    CHECK(calculate_cost(c4, singles, 1) >= 2 * 4);  // both endpoints count each edge
}

TEST_CASE("partition_graph produces a disjoint cover and never worsens the cost") {
    auto g = testing::random_connected_graph(30, 40, 9);
    auto with_iters = partition_graph(g, 3, 50, 1, 4);
    auto without = partition_graph(g, 3, 0, 1, 4);
    CHECK(with_iters.cost <= without.cost);
    CHECK(with_iters.cost == calculate_cost(g, with_iters, 1));

    std::vector<char> covered(30, 0);
    for (const auto& part : with_iters.parts)
        for (VertexId v : part) {
            CHECK_FALSE(covered[v]);
            covered[v] = 1;
        }
    for (char c : covered) CHECK(c == 1);

    // m=1 degenerates to the whole graph at cost 0
    auto single = partition_graph(g, 1, 5, 1, 4);
    CHECK(single.cost == 0);
    CHECK(single.parts.size() == 1);

    // determinism
    auto again = partition_graph(g, 3, 50, 1, 4);
    CHECK(again.owner == with_iters.owner);
    CHECK(again.cost == with_iters.cost);
}

TEST_CASE("build_index shapes") {
    auto g = testing::random_connected_graph(64, 80, 21);

    // single partition: depth-2 tree, root over one leaf
    auto idx1 = build_test_index(g, 1, 2, 1, 16);
    CHECK(idx1.nodes.size() == 2);
    CHECK(idx1.nodes[idx1.root].entries.size() == 1);
    CHECK(idx1.nodes[idx1.nodes[idx1.root].entries[0].child].leaf);

    // fanout 2 over 4 partitions: 4 leaves, 2 mid nodes, 1 root
    auto idx4 = build_test_index(g, 1, 2, 4, 2);
    CHECK(idx4.nodes.size() == 7);
    CHECK(idx4.nodes[idx4.root].entries.size() == 2);

    // leaf members cover the vertex set
    std::size_t total = 0;
    for (const auto& node : idx4.nodes)
        if (node.leaf) total += node.members.size();
    CHECK(total == g.vertex_count());
}

TEST_CASE("index aggregates dominate every descendant") {
    auto g = testing::random_connected_graph(120, 180, 33);
    auto idx = build_test_index(g, 2, 4, 8, 3);
    CHECK(audit_index(idx));
}

TEST_CASE("aux mismatch is rejected") {
    auto g = testing::random_connected_graph(20, 20, 5);
    auto pivots = select_pivots(g, 2, 1);
    auto aux = build_vertex_aux(g, 1, pivots, 64);
    auto parts = partition_graph(g, 2, 5, 1, 1);
    IndexParams params;
    params.r_max = 2;  // differs from the aux table
    params.bits_width = 64;
    CHECK_THROWS_AS(build_index(g, std::move(aux), parts, params), ParamError);
}

TEST_CASE("index round trip is byte-identical and checks fingerprints") {
    auto g = testing::random_connected_graph(50, 70, 11);
    auto idx = build_test_index(g, 2, 3, 4, 4);

    save_index(idx, "/tmp/rics_idx_a.bin");
    auto loaded = load_index("/tmp/rics_idx_a.bin");
    save_index(loaded, "/tmp/rics_idx_b.bin");
    CHECK(slurp("/tmp/rics_idx_a.bin") == slurp("/tmp/rics_idx_b.bin"));
    CHECK(loaded.graph_fingerprint == g.fingerprint());
    CHECK(audit_index(loaded));
    CHECK_NOTHROW(check_index_fingerprint(loaded, g));

    auto other = testing::random_connected_graph(50, 70, 12);
    CHECK_THROWS_AS(check_index_fingerprint(loaded, other), StaleIndexError);

    std::remove("/tmp/rics_idx_b.bin");

    // truncation is a format error
    auto bytes = slurp("/tmp/rics_idx_a.bin");
    std::ofstream cut("/tmp/rics_idx_cut.bin", std::ios::binary);
    cut.write(bytes.data(), bytes.size() / 2);
    cut.close();
    CHECK_THROWS_AS(load_index("/tmp/rics_idx_cut.bin"), FormatError);
    std::remove("/tmp/rics_idx_cut.bin");

    // bad magic
    std::ofstream bad("/tmp/rics_idx_bad.bin", std::ios::binary);
    bad << "NOTANIDXfile with content";
    bad.close();
    CHECK_THROWS_AS(load_index("/tmp/rics_idx_bad.bin"), FormatError);
    std::remove("/tmp/rics_idx_bad.bin");
    std::remove("/tmp/rics_idx_a.bin");
}

TEST_CASE("pivot lower bounds never exceed true distances") {
    auto g = testing::random_connected_graph(100, 160, 13);
    auto pivots = select_pivots(g, 5, 3);
    auto aux = build_vertex_aux(g, 1, pivots, 64);
    Rng rng(77);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        VertexId u = static_cast<VertexId>(rng.next_index(g.vertex_count()));
        VertexId v = static_cast<VertexId>(rng.next_index(g.vertex_count()));
        int lb = pivot_lower_bound(aux.vertex[u].pivot_dist, aux.vertex[v].pivot_dist);
        if (lb > hop_distance(g, u, v)) ++violations;
    }
    CHECK(violations == 0);

    // collinear case: a path graph with the pivot at one end gives exact bounds
    auto path = testing::simple_graph(6, {{0, 1, .5}, {1, 2, .5}, {2, 3, .5}, {3, 4, .5},
                                          {4, 5, .5}});
    auto paux = build_vertex_aux(path, 1, {0}, 64);
    CHECK(pivot_lower_bound(paux.vertex[1].pivot_dist, paux.vertex[5].pivot_dist) == 4);
}
