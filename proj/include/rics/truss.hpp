#pragma once

#include <functional>
#include <optional>

#include "rics/graph.hpp"

namespace rics {

// Triangle count of edge (u,v) within the subgraph's own edge set.
int edge_support(const Subgraph& sg, VertexId u, VertexId v);

// Full-graph common-neighbor count: an upper bound on the support of (u,v)
// inside any subgraph containing the edge.
int support_upper_bound(const SocialNetwork& g, VertexId u, VertexId v);

// Connected and every edge sits in at least k-2 triangles.
bool is_k_truss(const Subgraph& sg, int k);

// Peels edges with support below k-2 to a fixed point, drops isolated
// vertices, and returns the connected component containing anchor. The result
// is the unique maximal k-truss of sg containing anchor, or nullopt when the
// anchor is eliminated.
std::optional<Subgraph> maximal_k_truss(const Subgraph& sg, int k, VertexId anchor);

// Greedy size trimming: repeatedly remove the non-anchor vertex with the
// smallest rank whose removal (after re-peeling) keeps a k-truss containing
// anchor. Ties break by ascending vertex id. Returns the first subgraph with
// at most max_size vertices, or nullopt when no removal sequence reaches it.
std::optional<Subgraph> trim_to_size(const Subgraph& community, int max_size, int k,
                                     VertexId anchor,
                                     const std::function<double(VertexId)>& rank);

}  // namespace rics
