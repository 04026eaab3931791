#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rics/bitvector.hpp"
#include "rics/graph.hpp"

namespace rics {

// Per-vertex pre-computed bundle. Radius-indexed arrays run r = 1..r_max and
// are stored at slot r-1.
struct VertexAux {
    KeywordBitVector bits0;               // hashed own keywords
    std::vector<std::int32_t> pivot_dist; // hop distance to each pivot
    std::vector<KeywordBitVector> bits;   // OR over the r-ball
    std::vector<std::int32_t> support_bound;   // max full-graph common-neighbor count over ball edges
    std::vector<double> boundary_inf_max;      // max boundary influence aggregate
    std::vector<double> boundary_inf_sum;      // sum of boundary influence aggregates
    std::vector<std::int32_t> ball_size;       // |r-ball|
};

struct AuxTable {
    int r_max = 0;
    int bits_width = 0;
    std::vector<VertexId> pivots;
    std::vector<VertexAux> vertex;
};

// Deterministic keyword hashing: FNV-1a over the keyword string, mod width.
KeywordBitVector hash_keywords(const std::vector<std::string>& keywords, int width);
int keyword_bit(const std::string& keyword, int width);

// Highest-degree vertex first, then farthest-point traversal; seed breaks ties
// among equally far candidates.
std::vector<VertexId> select_pivots(const SocialNetwork& g, int d, std::uint64_t seed);

AuxTable build_vertex_aux(const SocialNetwork& g, int r_max,
                          const std::vector<VertexId>& pivots, int bits_width);

}  // namespace rics
