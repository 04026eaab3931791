#include "rics/influence.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace rics {

double path_probability(const SocialNetwork& g, std::span<const VertexId> path) {
    if (path.empty()) throw ParamError("empty path");
    std::unordered_set<VertexId> seen;
    for (VertexId v : path)
        if (!seen.insert(v).second)
            throw ValidationError("path revisits vertex " + std::to_string(v));
    double p = 1.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) p *= g.prob(path[i], path[i + 1]);
    return p;
}

namespace {

// Max-product Dijkstra. direction=false follows incoming edges (prob(to, from)).
// When targets is non-null the search stops once all target vertices are
// finalized; finalized scores are exact either way.
std::vector<double> max_product_search(const SocialNetwork& g, VertexId source, bool forward,
                                       const std::vector<char>* targets = nullptr,
                                       std::size_t target_count = 0) {
    std::vector<double> score(g.vertex_count(), 0.0);
    std::vector<char> done(g.vertex_count(), 0);
    std::priority_queue<std::pair<double, VertexId>> heap;
    score[source] = 1.0;
    heap.push({1.0, source});
    std::size_t remaining = target_count;
    while (!heap.empty()) {
        auto [s, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (targets) {
            if ((*targets)[u] && --remaining == 0) break;
        }
        if (s == 0.0) continue;
        for (const auto& nb : g.neighbors(u)) {
            double p = forward ? nb.prob : g.prob(nb.to, u);
            double cand = s * p;
            if (cand > score[nb.to] && !done[nb.to]) {
                score[nb.to] = cand;
                heap.push({cand, nb.to});
            }
        }
    }
    return score;
}

}  // namespace

double influence_score(const SocialNetwork& g, VertexId u, VertexId v) {
    if (u == v) return 1.0;
    std::vector<char> targets(g.vertex_count(), 0);
    targets[v] = 1;
    auto scores = max_product_search(g, u, true, &targets, 1);
    return scores[v];
}

std::vector<double> influence_scores_from(const SocialNetwork& g, VertexId source) {
    return max_product_search(g, source, true);
}

std::vector<double> influence_scores_to(const SocialNetwork& g, VertexId target) {
    return max_product_search(g, target, false);
}

double vertex_to_community_influence(const SocialNetwork& g, VertexId u,
                                     const TargetCommunity& q) {
    if (q.members.empty()) throw ParamError("empty target community");
    std::vector<char> targets(g.vertex_count(), 0);
    for (VertexId t : q.members) targets[t] = 1;
    auto scores = max_product_search(g, u, true, &targets, q.members.size());
    double total = 0.0;
    for (VertexId t : q.members) total += scores[t];
    return total;
}

double calculate_influence(const SocialNetwork& g, std::span<const VertexId> sources,
                           const TargetCommunity& q) {
    if (sources.empty()) throw ParamError("empty source community");
    double total = 0.0;
    for (VertexId u : sources) total += vertex_to_community_influence(g, u, q);
    return total;
}

std::vector<double> reverse_influence_field(const SocialNetwork& g,
                                            std::span<const VertexId> targets) {
    std::vector<double> field(g.vertex_count(), 0.0);
    for (VertexId t : targets) {
        auto scores = influence_scores_to(g, t);
        for (std::size_t v = 0; v < field.size(); ++v) field[v] += scores[v];
    }
    return field;
}

double BoundaryInfluence::max_value() const {
    double m = 0.0;
    for (const auto& [v, s] : scores) m = std::max(m, s);
    return m;
}

double BoundaryInfluence::sum_values() const {
    double m = 0.0;
    for (const auto& [v, s] : scores) m += s;
    return m;
}

BoundaryInfluence collapse_calculate(const SocialNetwork& g, std::span<const VertexId> members) {
    // local ids inside the member set
    std::vector<VertexId> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    std::unordered_map<VertexId, int> local;
    local.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) local[sorted[i]] = static_cast<int>(i);

    // boundary = external neighbors of the set
    std::unordered_map<VertexId, double> agg;
    std::vector<double> inside(sorted.size());
    std::vector<char> done(sorted.size());
    std::unordered_map<VertexId, double> exit_best;

    for (std::size_t s = 0; s < sorted.size(); ++s) {
        // max-product search from sorted[s], restricted to the member set
        std::fill(inside.begin(), inside.end(), 0.0);
        std::fill(done.begin(), done.end(), 0);
        std::priority_queue<std::pair<double, int>> heap;
        inside[s] = 1.0;
        heap.push({1.0, static_cast<int>(s)});
        while (!heap.empty()) {
            auto [sc, li] = heap.top();
            heap.pop();
            if (done[li]) continue;
            done[li] = 1;
            if (sc == 0.0) continue;
            for (const auto& nb : g.neighbors(sorted[li])) {
                auto it = local.find(nb.to);
                if (it == local.end()) continue;
                double cand = sc * nb.prob;
                if (!done[it->second] && cand > inside[it->second]) {
                    inside[it->second] = cand;
                    heap.push({cand, it->second});
                }
            }
        }
        // best exit per boundary vertex for this source
        exit_best.clear();
        for (std::size_t w = 0; w < sorted.size(); ++w) {
            if (inside[w] == 0.0) continue;
            for (const auto& nb : g.neighbors(sorted[w])) {
                if (local.count(nb.to)) continue;
                double cand = inside[w] * nb.prob;
                auto [it, inserted] = exit_best.emplace(nb.to, cand);
                if (!inserted && cand > it->second) it->second = cand;
            }
        }
        for (const auto& [b, sc] : exit_best) agg[b] += sc;
    }

    // boundary vertices with zero aggregate still count as keys
    for (VertexId u : sorted)
        for (const auto& nb : g.neighbors(u))
            if (!local.count(nb.to)) agg.emplace(nb.to, 0.0);

    BoundaryInfluence out;
    out.scores.assign(agg.begin(), agg.end());
    std::sort(out.scores.begin(), out.scores.end());
    return out;
}

BoundaryInfluence collapse_calculate(const SocialNetwork& g, VertexId center, int r) {
    if (r < 1) throw ParamError("collapse radius must be >= 1");
    auto members = ball_vertices(g, center, r);
    return collapse_calculate(g, members);
}

int pivot_lower_bound(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    if (a.size() != b.size()) throw ParamError("pivot distance vectors differ in length");
    std::int32_t best = 0;
    for (std::size_t j = 0; j < a.size(); ++j) best = std::max(best, std::abs(a[j] - b[j]));
    return best;
}

double influence_upper_bound(const AuxTable& aux, VertexId v, int r, const TargetCommunity& q,
                             double maxp) {
    if (r < 1 || r > aux.r_max) throw ParamError("radius outside the pre-computed range");
    const VertexAux& va = aux.vertex[v];
    const VertexAux& qa = aux.vertex[q.center];
    int lbd = pivot_lower_bound(va.pivot_dist, qa.pivot_dist);
    double nq = static_cast<double>(q.size());
    double ball = static_cast<double>(va.ball_size[r - 1]);

    // pair-count cap: every pair score is at most 1
    double bound = nq * ball;
    if (maxp >= 1.0) return bound;

    // hop-decay on the pair cap: every source sits within r of v, every target
    // within r of the query center
    int pair_exp = std::max(0, lbd - 2 * r);
    bound = std::min(bound, nq * ball * std::pow(maxp, pair_exp));

    // boundary-flow term, valid only when the target cannot overlap the ball:
    // each source's best path exits through some boundary vertex at distance
    // r+1, then needs at least lbd - 2r - 1 further hops
    if (lbd > 2 * r) {
        double flow = va.boundary_inf_sum[r - 1] * std::pow(maxp, lbd - 2 * r - 1);
        bound = std::min(bound, nq * flow);
    }
    return bound;
}

}  // namespace rics
