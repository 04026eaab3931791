#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rics/precompute.hpp"

namespace rics {

struct Partitioning {
    std::vector<std::int32_t> owner;              // vertex -> partition id
    std::vector<std::vector<VertexId>> parts;     // members, ascending
    std::vector<VertexId> part_pivots;            // clustering pivot per partition
    long long cost = 0;
};

// Cross_Par_Size + (|P_max| - |P_min|): for every vertex, the number of
// vertices of its r_max-ball that fall outside its home partition, plus the
// partition size imbalance.
long long calculate_cost(const SocialNetwork& g, const Partitioning& p, int r_max);

// Random pivot seeds, multi-source BFS clustering (ties to the lowest pivot
// index), then iter_max single-pivot-swap proposals accepting strictly
// improving costs. Deterministic per seed.
Partitioning partition_graph(const SocialNetwork& g, int m, int iter_max, int r_max,
                             std::uint64_t seed);

// Aggregates over every vertex beneath a child node. Radius-indexed arrays run
// r = 1..r_max at slot r-1.
struct IndexEntry {
    std::uint32_t child = 0;
    std::vector<KeywordBitVector> bits;        // OR of member bits per radius
    std::vector<std::int32_t> lb_dist;         // elementwise min of member pivot distances
    std::vector<std::int32_t> ub_dist;         // elementwise max
    std::vector<std::int32_t> support_bound;   // max of member support bounds per radius
    std::vector<double> boundary_inf_max;      // max of member boundary maxima per radius
    std::vector<double> boundary_inf_sum;      // max of member boundary sums per radius
    std::vector<std::int32_t> ball_size;       // max of member ball sizes per radius
    std::uint32_t vertex_total = 0;            // vertices beneath the child
};

struct IndexNode {
    bool leaf = false;
    std::vector<VertexId> members;   // leaf only, ascending
    std::vector<IndexEntry> entries; // non-leaf only
};

struct IndexParams {
    int r_max = 2;
    int bits_width = 64;
    int pivot_count = 5;
    int fanout = 16;
    int partitions = 0;
    int iter_max = 20;
    std::uint64_t pivot_seed = 1;
    std::uint64_t partition_seed = 1;
};

struct Index {
    IndexParams params;
    std::uint64_t graph_fingerprint = 0;
    AuxTable aux;
    std::vector<IndexNode> nodes;
    std::uint32_t root = 0;
};

// Leaves mirror the partitions; parents group up to fanout children ordered by
// the generating pivot's BFS discovery order. Throws on r_max mismatch with aux.
Index build_index(const SocialNetwork& g, AuxTable aux, const Partitioning& parts,
                  const IndexParams& params);

void save_index(const Index& index, const std::string& path);
Index load_index(const std::string& path);
// Throws StaleIndexError when the index was built over different graph inputs.
void check_index_fingerprint(const Index& index, const SocialNetwork& g);

// Full-tree audit: every non-leaf aggregate must dominate the corresponding
// values of all vertices beneath it.
bool audit_index(const Index& index);

}  // namespace rics
