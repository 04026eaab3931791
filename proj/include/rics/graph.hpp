#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rics/common.hpp"

namespace rics {

struct Neighbor {
    VertexId to;
    double prob;             // activation probability along this direction
    std::int32_t common;     // |N(u) ∩ N(v)| in the full graph, shared by both directions
};

struct EdgeSpec {
    VertexId u, v;
    double p_uv, p_vu;
};

// Connected, keyword-attributed social network. Activation probabilities are
// directed: prob(u,v) and prob(v,u) are stored independently on the same
// undirected edge. Immutable after construction.
class SocialNetwork {
public:
    SocialNetwork(std::size_t n, const std::vector<EdgeSpec>& edges,
                  const std::vector<std::vector<std::string>>& keywords);

    std::size_t vertex_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    const std::vector<Neighbor>& neighbors(VertexId v) const { return adj_[v]; }
    int degree(VertexId v) const { return static_cast<int>(adj_[v].size()); }

    bool has_edge(VertexId u, VertexId v) const { return find_neighbor(u, v) != nullptr; }
    // activation probability u -> v; throws if the edge is absent
    double prob(VertexId u, VertexId v) const;
    // full-graph common-neighbor count of an edge; throws if absent
    int edge_common_neighbors(VertexId u, VertexId v) const;

    const std::vector<std::int32_t>& keyword_ids(VertexId v) const { return vertex_keywords_[v]; }
    const std::string& keyword_name(std::int32_t id) const { return keyword_names_[id]; }
    std::int32_t keyword_id(const std::string& name) const;  // -1 when unknown
    std::size_t keyword_domain_size() const { return keyword_names_.size(); }

    // true when v carries at least one keyword from the sorted id list
    bool qualified(VertexId v, const std::vector<std::int32_t>& sorted_ids) const;

    double max_probability() const { return max_prob_; }
    std::uint64_t fingerprint() const { return fingerprint_; }

private:
    const Neighbor* find_neighbor(VertexId u, VertexId v) const;

    std::vector<std::vector<Neighbor>> adj_;                 // sorted by .to
    std::vector<std::vector<std::int32_t>> vertex_keywords_; // sorted, interned
    std::vector<std::string> keyword_names_;
    std::unordered_map<std::string, std::int32_t> keyword_lookup_;
    std::size_t edge_count_ = 0;
    double max_prob_ = 0.0;
    std::uint64_t fingerprint_ = 0;
};

// Vertex set plus an explicit edge set (not necessarily induced once truss
// peeling has removed edges). Vertices and edges are kept sorted.
struct Subgraph {
    std::vector<VertexId> vertices;                       // ascending
    std::vector<std::pair<VertexId, VertexId>> edges;     // u < v, ascending
    std::optional<VertexId> center;
    std::optional<int> radius;

    bool contains(VertexId v) const;
};

struct TargetCommunity {
    VertexId center = 0;
    int radius = 0;
    std::vector<VertexId> members;            // ascending
    std::vector<std::int32_t> query_keywords; // sorted interned ids (unknown keywords dropped)

    std::size_t size() const { return members.size(); }
    bool contains(VertexId v) const;
};

// ---- file ingestion / emission ----------------------------------------------

SocialNetwork load_graph(const std::string& edge_path, const std::string& keyword_path);
void write_graph_files(const SocialNetwork& g, const std::string& edge_path,
                       const std::string& keyword_path);

// ---- synthetic generation ----------------------------------------------------

enum class KeywordDistribution { Uniform, Gaussian, Zipf };

struct SmallWorldParams {
    std::uint32_t n = 50000;
    int m = 5;                 // ring neighbors per side
    double mu = 0.251;         // shortcut probability per ring edge
    KeywordDistribution dist = KeywordDistribution::Uniform;
    int sigma = 20;            // keyword domain size
    int keywords_per_vertex = 3;
    double prob_lo = 0.5;
    double prob_hi = 0.6;
    std::uint64_t seed = 1;
};

SocialNetwork generate_small_world(const SmallWorldParams& params);

// ---- distance / neighborhood primitives --------------------------------------

int hop_distance(const SocialNetwork& g, VertexId u, VertexId v);

// distances from source to all vertices
std::vector<std::int32_t> bfs_distances(const SocialNetwork& g, VertexId source);

// vertices within hop distance r of center, ascending
std::vector<VertexId> ball_vertices(const SocialNetwork& g, VertexId center, int r);

// induced subgraph on the r-ball around center
Subgraph r_hop(const SocialNetwork& g, VertexId center, int r);

// Maximal connected set of keyword-qualified vertices reachable from center
// within r hops through qualified vertices. Throws QueryError when the center
// itself does not qualify.
TargetCommunity extract_target_community(const SocialNetwork& g, VertexId center, int r,
                                         const std::vector<std::string>& query_keywords);

}  // namespace rics
