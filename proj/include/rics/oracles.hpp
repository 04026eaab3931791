#pragma once

#include "rics/query.hpp"
#include "rics/r2ics.hpp"

namespace rics {

// Index-free reference engine: visits every vertex in BFS order from the query
// center, runs the shared candidate canonicalization, scores every surviving
// candidate exactly, returns the top-M list. The aux table is used only for
// the canonical trim ranking.
ResultList baseline_rics(const SocialNetwork& g, const AuxTable& aux, const Query& q,
                         QueryStats* stats = nullptr);

// Exact maximum-influence-path score by exhaustive simple-path enumeration.
// Guarded by a vertex-count cap against factorial blowup.
double brute_force_influence(const SocialNetwork& g, VertexId u, VertexId v,
                             std::size_t max_vertices = 10);

// Exact per-vertex scores for all qualified vertices, full searches, then the
// same sliding-window extraction as the online variant.
RelaxedResultList optimal_r2ics(const SocialNetwork& g, const AuxTable& aux, const Query& q,
                                QueryStats* stats = nullptr);

}  // namespace rics
