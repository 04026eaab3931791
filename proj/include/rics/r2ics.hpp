#pragma once

#include <vector>

#include "rics/query.hpp"

namespace rics {

// Relaxed answer: at most N keyword-qualified vertices, no connectivity or
// truss constraint; scored by the sum of member vertex-to-community influences.
struct RelaxedAnswer {
    std::vector<VertexId> vertices;  // ascending
    double score = 0.0;
};

struct RelaxedResultList {
    std::vector<RelaxedAnswer> answers;
    bool truncated = false;  // fewer qualified vertices than N + M - 1
};

// Ranked head of the qualified vertex list: (vertex, exact score) descending
// by score, ties by ascending id. Shared by the indexed engine and the
// Optimal oracle so window extraction is bit-identical.
RelaxedResultList windows_from_ranking(const std::vector<std::pair<VertexId, double>>& ranked,
                                       int max_size, int top_m);

// Online TopM-R2ICS: index traversal with keyword pruning, vertex influence
// upper bounds for the refinement cutoff, sliding-window answers.
RelaxedResultList topm_r2ics(const Index& index, const SocialNetwork& g, const Query& q,
                             const PruningOptions& opts = {}, QueryStats* stats = nullptr);

}  // namespace rics
