#include "rics/r2ics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace rics {

namespace {

double theta_margin(double theta) { return 1e-7 * (1.0 + std::abs(theta)); }

int entry_lb_dist(const IndexEntry& entry, const std::vector<std::int32_t>& qdist) {
    int best = 0;
    for (std::size_t j = 0; j < qdist.size(); ++j) {
        int lo = entry.lb_dist[j] - qdist[j];
        int hi = qdist[j] - entry.ub_dist[j];
        best = std::max({best, lo, hi});
    }
    return best;
}

bool rank_better(const std::pair<VertexId, double>& a, const std::pair<VertexId, double>& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
}

}  // namespace

RelaxedResultList windows_from_ranking(const std::vector<std::pair<VertexId, double>>& ranked,
                                       int max_size, int top_m) {
    RelaxedResultList out;
    const int total = static_cast<int>(ranked.size());
    out.truncated = total < max_size + top_m - 1;
    // answer l holds ranks l .. l+N-1; partial tail windows are emitted when
    // the qualified set runs out
    for (int l = 0; l < top_m && l < total; ++l) {
        RelaxedAnswer ans;
        int hi = std::min(total, l + max_size);
        for (int i = l; i < hi; ++i) {
            ans.vertices.push_back(ranked[i].first);
            ans.score += ranked[i].second;
        }
        std::sort(ans.vertices.begin(), ans.vertices.end());
        out.answers.push_back(std::move(ans));
    }
    return out;
}

RelaxedResultList topm_r2ics(const Index& index, const SocialNetwork& g, const Query& q,
                             const PruningOptions& opts, QueryStats* stats) {
    check_index_fingerprint(index, g);
    QueryContext ctx = prepare_query(g, index.aux, q, /*relaxed=*/true);
    const int r = ctx.query.radius;
    const std::size_t need =
        static_cast<std::size_t>(ctx.query.max_size) + ctx.query.top_m - 1;

    // reverse field: near-exact ordering and a sound bound for the cutoff
    std::vector<double> field;
    if (opts.influence) field = reverse_influence_field(g, ctx.target.members);

    // index traversal with keyword pruning collects qualified vertices; near
    // ones (first arrivals in distance order) are scored inline, the rest are
    // deferred with their influence upper bounds
    struct Pending {
        VertexId v;
        double bound;
    };
    std::vector<std::pair<VertexId, double>> visited;  // exact forward scores
    std::vector<Pending> pending;

    auto exact = [&](VertexId v) {
        if (stats) stats->refined++;
        return vertex_to_community_influence(g, v, ctx.target);
    };
    auto vertex_bound = [&](VertexId v) {
        double b = vertex_influence_upper_bound(ctx, v);
        if (!field.empty()) b = std::min(b, field[v] + theta_margin(field[v]));
        return b;
    };

    const auto& qdist = index.aux.vertex[ctx.query.center].pivot_dist;
    using HeapItem = std::tuple<int, std::uint32_t, const IndexEntry*>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;
    const IndexNode& root = index.nodes[index.root];
    for (const auto& entry : root.entries)
        heap.push({entry_lb_dist(entry, qdist), entry.child, &entry});

    while (!heap.empty()) {
        auto [key, node_id, entry] = heap.top();
        heap.pop();
        const IndexNode& node = index.nodes[node_id];
        if (node.leaf) {
            for (VertexId v : node.members) {
                if (opts.keyword && !ctx.is_qualified[v]) {
                    if (stats) stats->pruned_keyword++;
                    continue;
                }
                if (!ctx.is_qualified[v]) continue;  // definitional, not a prune
                if (visited.size() < need) {
                    visited.emplace_back(v, exact(v));
                } else {
                    pending.push_back({v, vertex_bound(v)});
                }
            }
        } else {
            for (const auto& child : node.entries) {
                if (stats) stats->entries_visited++;
                if (opts.keyword && !child.bits[r - 1].intersects(ctx.query_bits)) {
                    if (stats) stats->pruned_index_keyword += child.vertex_total;
                    continue;
                }
                heap.push({entry_lb_dist(child, qdist), child.child, &child});
            }
        }
    }

    // refinement: keep the best `need` exact scores; a pending vertex whose
    // bound falls below the current bar cannot enter the head of the ranking
    std::sort(visited.begin(), visited.end(), rank_better);

    std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.v < b.v;
    });
    for (std::size_t i = 0; i < pending.size(); ++i) {
        double bar = visited.size() >= need ? visited.back().second : 0.0;
        if (opts.influence && visited.size() >= need &&
            pending[i].bound < bar - theta_margin(bar)) {
            if (stats) stats->pruned_influence += static_cast<long long>(pending.size() - i);
            break;
        }
        auto scored = std::make_pair(pending[i].v, exact(pending[i].v));
        auto pos = std::upper_bound(visited.begin(), visited.end(), scored, rank_better);
        visited.insert(pos, scored);
        if (visited.size() > need) visited.pop_back();
    }

    return windows_from_ranking(visited, ctx.query.max_size, ctx.query.top_m);
}

}  // namespace rics
