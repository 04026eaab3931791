#include "rics/oracles.hpp"

#include <algorithm>
#include <deque>

namespace rics {

ResultList baseline_rics(const SocialNetwork& g, const AuxTable& aux, const Query& q,
                         QueryStats* stats) {
    QueryContext ctx = prepare_query(g, aux, q);

    // every vertex is reachable (connected graph); visit in BFS order from v_q
    std::vector<char> seen(g.vertex_count(), 0);
    std::deque<VertexId> queue{q.center};
    seen[q.center] = 1;

    CommunityScorer scorer(g, ctx.target);
    std::vector<CommunityAnswer> scored;
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        for (const auto& nb : g.neighbors(v))
            if (!seen[nb.to]) {
                seen[nb.to] = 1;
                queue.push_back(nb.to);
            }

        auto cand = candidate_community(ctx, v);
        if (!cand) continue;
        if (stats) stats->candidates++;
        cand->score = scorer.community_score(cand->vertices);
        if (stats) stats->refined++;
        scored.push_back(std::move(*cand));
    }

    std::sort(scored.begin(), scored.end(), [](const CommunityAnswer& a, const CommunityAnswer& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.center < b.center;
    });
    ResultList out;
    out.truncated = static_cast<int>(scored.size()) < q.top_m;
    if (static_cast<int>(scored.size()) > q.top_m) scored.resize(q.top_m);
    out.answers = std::move(scored);
    out.theta = out.truncated ? 0.0 : out.answers.back().score;
    return out;
}

namespace {

void enumerate_paths(const SocialNetwork& g, VertexId current, VertexId goal, double product,
                     std::vector<char>& on_path, double& best) {
    if (current == goal) {
        best = std::max(best, product);
        return;
    }
    for (const auto& nb : g.neighbors(current)) {
        if (on_path[nb.to]) continue;
        on_path[nb.to] = 1;
        enumerate_paths(g, nb.to, goal, product * nb.prob, on_path, best);
        on_path[nb.to] = 0;
    }
}

}  // namespace

double brute_force_influence(const SocialNetwork& g, VertexId u, VertexId v,
                             std::size_t max_vertices) {
    if (g.vertex_count() > max_vertices)
        throw ParamError("graph too large for exhaustive path enumeration");
    if (u == v) return 1.0;
    std::vector<char> on_path(g.vertex_count(), 0);
    on_path[u] = 1;
    double best = 0.0;
    enumerate_paths(g, u, v, 1.0, on_path, best);
    return best;
}

RelaxedResultList optimal_r2ics(const SocialNetwork& g, const AuxTable& aux, const Query& q,
                                QueryStats* stats) {
    QueryContext ctx = prepare_query(g, aux, q, /*relaxed=*/true);

    std::vector<std::pair<VertexId, double>> ranked;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (!ctx.is_qualified[v]) continue;
        ranked.emplace_back(v, vertex_to_community_influence(g, v, ctx.target));
        if (stats) stats->refined++;
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const std::pair<VertexId, double>& a, const std::pair<VertexId, double>& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    return windows_from_ranking(ranked, q.max_size, q.top_m);
}

}  // namespace rics
