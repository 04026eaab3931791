#pragma once

#include <span>
#include <vector>

#include "rics/graph.hpp"
#include "rics/precompute.hpp"

namespace rics {

// Product of activation probabilities along an explicit path. Rejects
// non-adjacent steps and repeated vertices.
double path_probability(const SocialNetwork& g, std::span<const VertexId> path);

// Maximum-influence-path score from u to v: best-first max-product search.
// Extending a path multiplies by a factor <= 1, so finalized vertices are
// optimal without explicit acyclicity checks.
double influence_score(const SocialNetwork& g, VertexId u, VertexId v);

// Scores from source to every vertex along outgoing probabilities.
std::vector<double> influence_scores_from(const SocialNetwork& g, VertexId source);

// Scores from every vertex to target along incoming probabilities.
std::vector<double> influence_scores_to(const SocialNetwork& g, VertexId target);

// Sum of influence_score(u, t) over t in Q; one multi-target search.
double vertex_to_community_influence(const SocialNetwork& g, VertexId u,
                                     const TargetCommunity& q);

// Exact community-to-community score: sum over source vertices of their
// vertex-to-community influence.
double calculate_influence(const SocialNetwork& g, std::span<const VertexId> sources,
                           const TargetCommunity& q);

// For every vertex u, the sum over t in targets of influence_score(u, t);
// one reverse search per target.
std::vector<double> reverse_influence_field(const SocialNetwork& g,
                                            std::span<const VertexId> targets);

// Aggregated influence of a vertex set through each external boundary vertex.
// Values follow paths that stay inside the set until the final hop.
struct BoundaryInfluence {
    std::vector<std::pair<VertexId, double>> scores;  // sorted by vertex id

    double max_value() const;
    double sum_values() const;
};

BoundaryInfluence collapse_calculate(const SocialNetwork& g, std::span<const VertexId> members);
BoundaryInfluence collapse_calculate(const SocialNetwork& g, VertexId center, int r);

// Upper bound on inf_score(C, Q) for any candidate community C centered at v
// with radius r, from pre-computed aggregates and the pivot distance lower
// bound. Combines a pair-count cap with hop-decay terms; see README notes on
// bound construction.
double influence_upper_bound(const AuxTable& aux, VertexId v, int r, const TargetCommunity& q,
                             double maxp);

// Pivot-based distance lower bound between two distance vectors.
int pivot_lower_bound(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

}  // namespace rics
