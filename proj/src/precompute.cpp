#include "rics/precompute.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <mutex>
#include <queue>

#include "rics/influence.hpp"

namespace rics {

int keyword_bit(const std::string& keyword, int width) {
    return static_cast<int>(fnv1a(keyword) % static_cast<std::uint64_t>(width));
}

KeywordBitVector hash_keywords(const std::vector<std::string>& keywords, int width) {
    if (width < 1) throw ParamError("bit vector width must be >= 1");
    KeywordBitVector bv(width);
    for (const auto& kw : keywords) bv.set(keyword_bit(kw, width));
    return bv;
}

std::vector<VertexId> select_pivots(const SocialNetwork& g, int d, std::uint64_t seed) {
    const std::size_t n = g.vertex_count();
    if (d < 1 || static_cast<std::size_t>(d) > n)
        throw ParamError("pivot count must lie in [1, |V|]");
    Rng rng(seed);

    // first pivot: highest degree, ties by lowest id
    VertexId first = 0;
    for (VertexId v = 1; v < n; ++v)
        if (g.degree(v) > g.degree(first)) first = v;

    std::vector<VertexId> pivots{first};
    std::vector<std::int32_t> min_dist = bfs_distances(g, first);
    std::vector<char> chosen(n, 0);
    chosen[first] = 1;

    while (static_cast<int>(pivots.size()) < d) {
        // farthest-point: maximize the minimum distance to chosen pivots
        std::int32_t best = -1;
        std::vector<VertexId> candidates;
        for (VertexId v = 0; v < n; ++v) {
            if (chosen[v]) continue;
            if (min_dist[v] > best) {
                best = min_dist[v];
                candidates.assign(1, v);
            } else if (min_dist[v] == best) {
                candidates.push_back(v);
            }
        }
        VertexId next = candidates[rng.next_index(candidates.size())];
        chosen[next] = 1;
        pivots.push_back(next);
        auto dist = bfs_distances(g, next);
        for (VertexId v = 0; v < n; ++v) min_dist[v] = std::min(min_dist[v], dist[v]);
    }
    return pivots;
}

namespace {

// Scratch for one in-flight vertex; pooled and reused to keep the parallel
// pre-computation allocation-free on the hot path.
struct CollapseScratch {
    std::vector<std::int32_t> dist;      // BFS distance from the current center
    std::vector<std::int32_t> local_id;  // graph vertex -> ball-local id, -1 outside
    std::vector<VertexId> ball;          // ball members in BFS order
    std::vector<double> inside;          // per-local-id best inside score
    std::vector<char> done;
    std::vector<double> exit_best;       // per-source best exit, graph-vertex indexed
    std::vector<double> boundary_agg;    // summed exits, graph-vertex indexed
    std::vector<char> in_list;           // membership flag for boundary_list
    std::vector<VertexId> boundary_list; // unique boundary vertices for this radius

    explicit CollapseScratch(std::size_t n)
        : dist(n, -1), local_id(n, -1), exit_best(n, -1.0), boundary_agg(n, 0.0), in_list(n, 0) {}
};

struct ScratchPool {
    std::mutex mu;
    std::vector<std::unique_ptr<CollapseScratch>> free_list;
    std::size_t n;

    explicit ScratchPool(std::size_t n) : n(n) {}

    std::unique_ptr<CollapseScratch> acquire() {
        std::lock_guard<std::mutex> lock(mu);
        if (free_list.empty()) return std::make_unique<CollapseScratch>(n);
        auto s = std::move(free_list.back());
        free_list.pop_back();
        return s;
    }
    void release(std::unique_ptr<CollapseScratch> s) {
        std::lock_guard<std::mutex> lock(mu);
        free_list.push_back(std::move(s));
    }
};

}  // namespace

AuxTable build_vertex_aux(const SocialNetwork& g, int r_max,
                          const std::vector<VertexId>& pivots, int bits_width) {
    if (r_max < 1) throw ParamError("r_max must be >= 1");
    const std::size_t n = g.vertex_count();

    AuxTable table;
    table.r_max = r_max;
    table.bits_width = bits_width;
    table.pivots = pivots;
    table.vertex.resize(n);

    // keyword bit vectors
    for (VertexId v = 0; v < n; ++v) {
        std::vector<std::string> names;
        for (auto id : g.keyword_ids(v)) names.push_back(g.keyword_name(id));
        table.vertex[v].bits0 = hash_keywords(names, bits_width);
    }

    // pivot distance vectors: one BFS per pivot
    for (VertexId v = 0; v < n; ++v) table.vertex[v].pivot_dist.resize(pivots.size());
    for (std::size_t j = 0; j < pivots.size(); ++j) {
        auto dist = bfs_distances(g, pivots[j]);
        for (VertexId v = 0; v < n; ++v) table.vertex[v].pivot_dist[j] = dist[v];
    }

    ScratchPool pool(n);

    auto process_vertex = [&](std::size_t vi) {
        auto scratch = pool.acquire();
        CollapseScratch& s = *scratch;
        VertexId center = static_cast<VertexId>(vi);
        VertexAux& va = table.vertex[vi];
        va.bits.assign(r_max, KeywordBitVector(bits_width));
        va.support_bound.assign(r_max, 0);
        va.boundary_inf_max.assign(r_max, 0.0);
        va.boundary_inf_sum.assign(r_max, 0.0);
        va.ball_size.assign(r_max, 0);

        // one BFS to depth r_max; members arrive in distance order
        s.ball.clear();
        s.ball.push_back(center);
        s.dist[center] = 0;
        for (std::size_t head = 0; head < s.ball.size(); ++head) {
            VertexId u = s.ball[head];
            if (s.dist[u] == r_max) break;
            for (const auto& nb : g.neighbors(u)) {
                if (s.dist[nb.to] < 0) {
                    s.dist[nb.to] = s.dist[u] + 1;
                    s.ball.push_back(nb.to);
                }
            }
        }

        for (int r = 1; r <= r_max; ++r) {
            // prefix of the BFS order with distance <= r
            std::size_t count = 0;
            while (count < s.ball.size() && s.dist[s.ball[count]] <= r) ++count;
            va.ball_size[r - 1] = static_cast<std::int32_t>(count);

            KeywordBitVector bits(bits_width);
            std::int32_t sup = 0;
            for (std::size_t i = 0; i < count; ++i) {
                VertexId u = s.ball[i];
                s.local_id[u] = static_cast<std::int32_t>(i);
                bits.or_with(table.vertex[u].bits0);
            }
            for (std::size_t i = 0; i < count; ++i) {
                VertexId u = s.ball[i];
                for (const auto& nb : g.neighbors(u))
                    if (nb.to > u && s.local_id[nb.to] >= 0) sup = std::max(sup, nb.common);
            }
            va.bits[r - 1] = bits;
            va.support_bound[r - 1] = sup;

            // seed collapse: per boundary vertex, sum over sources of the best
            // inside-ball path extended by the final boundary-crossing hop
            s.boundary_list.clear();
            std::priority_queue<std::pair<double, std::int32_t>> heap;
            std::vector<VertexId> touched;
            for (std::size_t src = 0; src < count; ++src) {
                s.inside.assign(count, 0.0);
                s.done.assign(count, 0);
                s.inside[src] = 1.0;
                heap.push({1.0, static_cast<std::int32_t>(src)});
                while (!heap.empty()) {
                    auto [sc, li] = heap.top();
                    heap.pop();
                    if (s.done[li]) continue;
                    s.done[li] = 1;
                    if (sc == 0.0) continue;
                    for (const auto& nb : g.neighbors(s.ball[li])) {
                        std::int32_t lj = s.local_id[nb.to];
                        if (lj < 0) continue;
                        double cand = sc * nb.prob;
                        if (!s.done[lj] && cand > s.inside[lj]) {
                            s.inside[lj] = cand;
                            heap.push({cand, lj});
                        }
                    }
                }
                touched.clear();
                for (std::size_t i = 0; i < count; ++i) {
                    if (s.inside[i] == 0.0) continue;
                    for (const auto& nb : g.neighbors(s.ball[i])) {
                        if (s.local_id[nb.to] >= 0) continue;
                        double cand = s.inside[i] * nb.prob;
                        if (s.exit_best[nb.to] < 0.0) {
                            s.exit_best[nb.to] = cand;
                            touched.push_back(nb.to);
                        } else if (cand > s.exit_best[nb.to]) {
                            s.exit_best[nb.to] = cand;
                        }
                    }
                }
                for (VertexId b : touched) {
                    if (!s.in_list[b]) {
                        s.in_list[b] = 1;
                        s.boundary_list.push_back(b);
                    }
                    s.boundary_agg[b] += s.exit_best[b];
                    s.exit_best[b] = -1.0;
                }
            }
            double bmax = 0.0, bsum = 0.0;
            for (VertexId b : s.boundary_list) {
                bmax = std::max(bmax, s.boundary_agg[b]);
                bsum += s.boundary_agg[b];
                s.boundary_agg[b] = 0.0;
                s.in_list[b] = 0;
            }
            va.boundary_inf_max[r - 1] = bmax;
            va.boundary_inf_sum[r - 1] = bsum;

            for (std::size_t i = 0; i < count; ++i) s.local_id[s.ball[i]] = -1;
        }
        for (VertexId u : s.ball) s.dist[u] = -1;
        pool.release(std::move(scratch));
    };

    parallel_for(n, process_vertex);
    return table;
}

}  // namespace rics
