#include "rics/query.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "rics/truss.hpp"

namespace rics {

namespace {

// Relative slack applied to upper-bound comparisons against theta. Bounds of
// surviving ties stay above theta - margin, so exact-tie candidates are always
// refined through the same forward scorer as the baseline.
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

double entry_influence_bound(const IndexEntry& entry, int key, const QueryContext& ctx) {
    const int r = ctx.query.radius;
    double nq = static_cast<double>(ctx.target.size());
    double cap = std::min<double>(ctx.query.max_size, entry.ball_size[r - 1]);
    double bound = nq * cap;
    if (ctx.maxp >= 1.0) return bound;
    bound = std::min(bound, nq * cap * std::pow(ctx.maxp, std::max(0, key - 2 * r)));
    if (key > 2 * r) {
        double flow = entry.boundary_inf_sum[r - 1] * std::pow(ctx.maxp, key - 2 * r - 1);
        bound = std::min(bound, nq * flow);
    }
    return bound;
}

}  // namespace

QueryContext prepare_query(const SocialNetwork& g, const AuxTable& aux, const Query& q,
                           bool relaxed) {
    if (q.center >= g.vertex_count()) throw QueryError("query center out of range");
    if (q.radius < 1 || q.radius > aux.r_max)
        throw ParamError("query radius must lie in [1, r_max of the index]");
    if (relaxed) {
        if (q.max_size < 1) throw ParamError("size cap must be >= 1");
    } else {
        if (q.k < 2) throw ParamError("truss parameter must be >= 2");
        if (q.max_size < q.k) throw ParamError("size cap must be >= k");
    }
    if (q.top_m < 1) throw ParamError("result count must be >= 1");
    if (aux.vertex.size() != g.vertex_count()) throw ParamError("aux table does not match graph");

    QueryContext ctx;
    ctx.g = &g;
    ctx.aux = &aux;
    ctx.query = q;
    ctx.target = extract_target_community(g, q.center, q.radius, q.keywords);
    ctx.in_target.assign(g.vertex_count(), 0);
    for (VertexId v : ctx.target.members) ctx.in_target[v] = 1;
    ctx.is_qualified.assign(g.vertex_count(), 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        ctx.is_qualified[v] = g.qualified(v, ctx.target.query_keywords) ? 1 : 0;
    ctx.query_bits = hash_keywords(q.keywords, aux.bits_width);
    ctx.maxp = g.max_probability();
    return ctx;
}

double vertex_influence_upper_bound(const QueryContext& ctx, VertexId v) {
    double nq = static_cast<double>(ctx.target.size());
    if (ctx.in_target[v]) return nq;
    if (ctx.maxp >= 1.0) return nq;
    int lbd = pivot_lower_bound(ctx.aux->vertex[v].pivot_dist,
                                ctx.aux->vertex[ctx.query.center].pivot_dist);
    return nq * std::pow(ctx.maxp, std::max(1, lbd - ctx.query.radius));
}

std::optional<CommunityAnswer> candidate_community(const QueryContext& ctx, VertexId center) {
    const SocialNetwork& g = *ctx.g;
    const Query& q = ctx.query;
    if (!ctx.is_qualified[center]) return std::nullopt;

    auto ball = ball_vertices(g, center, q.radius);
    Subgraph sg;
    sg.center = center;
    sg.radius = q.radius;
    for (VertexId v : ball)
        if (ctx.is_qualified[v]) sg.vertices.push_back(v);
    for (VertexId u : sg.vertices) {
        for (const auto& nb : g.neighbors(u)) {
            if (nb.to <= u) continue;
            if (!std::binary_search(sg.vertices.begin(), sg.vertices.end(), nb.to)) continue;
            if (nb.common < q.k - 2) continue;  // support bound filter
            sg.edges.emplace_back(u, nb.to);
        }
    }
    std::sort(sg.edges.begin(), sg.edges.end());

    auto truss = maximal_k_truss(sg, q.k, center);
    if (!truss) return std::nullopt;
    if (static_cast<int>(truss->vertices.size()) > q.max_size) {
        auto trimmed = trim_to_size(*truss, q.max_size, q.k, center,
                                    [&](VertexId v) { return vertex_influence_upper_bound(ctx, v); });
        if (!trimmed) return std::nullopt;
        truss = std::move(trimmed);
    }

    CommunityAnswer answer;
    answer.center = center;
    answer.vertices = std::move(truss->vertices);
    answer.edges = std::move(truss->edges);
    return answer;
}

double max_inf_ub(const std::vector<FrontierItem>& frontier, const QueryContext& ctx) {
    double best = 0.0;
    for (const auto& item : frontier)
        best = std::max(best, entry_influence_bound(*item.entry, item.key, ctx));
    return best;
}

double CommunityScorer::vertex_score(VertexId v) {
    if (!have_[v]) {
        cache_[v] = vertex_to_community_influence(*g_, v, *target_);
        have_[v] = 1;
    }
    return cache_[v];
}

double CommunityScorer::community_score(std::span<const VertexId> members) {
    double total = 0.0;
    for (VertexId v : members) total += vertex_score(v);
    return total;
}

namespace {

struct TopList {
    int capacity;
    std::vector<CommunityAnswer> items;  // descending score, ties by center id

    explicit TopList(int m) : capacity(m) {}

    static bool better(const CommunityAnswer& a, const CommunityAnswer& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.center < b.center;
    }

    bool full() const { return static_cast<int>(items.size()) >= capacity; }
    double theta() const { return full() ? items.back().score : 0.0; }

    void insert(CommunityAnswer answer) {
        auto pos = std::upper_bound(items.begin(), items.end(), answer, better);
        items.insert(pos, std::move(answer));
        if (static_cast<int>(items.size()) > capacity) items.pop_back();
    }
};

struct Deferred {
    CommunityAnswer answer;
    double bound;
};

struct RicsEngine {
    const Index& index;
    const SocialNetwork& g;
    QueryContext ctx;
    PruningOptions opts;
    QueryStats* stats;
    std::vector<double> field;  // reverse influence field, empty when unused
    CommunityScorer scorer;
    TopList top;
    std::vector<Deferred> deferred;
    std::vector<VertexId> scratch_ball;

    RicsEngine(const Index& index, const SocialNetwork& g, const Query& q,
               const PruningOptions& opts, QueryStats* stats)
        : index(index), g(g), ctx(prepare_query(g, index.aux, q)), opts(opts), stats(stats),
          scorer(g, ctx.target), top(q.top_m) {
        if (opts.influence)
            field = reverse_influence_field(g, ctx.target.members);
    }

    void count(long long QueryStats::* member) {
        if (stats) (stats->*member)++;
    }

    double exact_score(const CommunityAnswer& answer) {
        if (stats) stats->refined++;
        return scorer.community_score(answer.vertices);
    }

    // Sum of the largest max_size field values over qualified ball members;
    // an upper bound on the score of any admissible candidate at this center.
    double field_preselect_bound(VertexId center) {
        scratch_ball = ball_vertices(g, center, ctx.query.radius);
        std::vector<double> values;
        values.reserve(scratch_ball.size());
        for (VertexId v : scratch_ball)
            if (ctx.is_qualified[v]) values.push_back(field[v]);
        std::size_t n = std::min<std::size_t>(values.size(), ctx.query.max_size);
        if (n < values.size())
            std::nth_element(values.begin(), values.begin() + n, values.end(),
                             std::greater<double>());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += values[i];
        return total;
    }

    double center_bound(VertexId center) {
        double bound = influence_upper_bound(index.aux, center, ctx.query.radius, ctx.target,
                                             ctx.maxp);
        // per-pair hop decay with the size cap
        if (ctx.maxp < 1.0) {
            int lbd = pivot_lower_bound(index.aux.vertex[center].pivot_dist,
                                        index.aux.vertex[ctx.query.center].pivot_dist);
            double pair = static_cast<double>(ctx.target.size()) * ctx.query.max_size *
                          std::pow(ctx.maxp, std::max(0, lbd - 2 * ctx.query.radius));
            bound = std::min(bound, pair);
        }
        return bound;
    }

    void process_center(VertexId v) {
        const int r = ctx.query.radius;
        if (opts.keyword && !ctx.is_qualified[v]) {
            count(&QueryStats::pruned_keyword);
            return;
        }
        if (opts.support && index.aux.vertex[v].support_bound[r - 1] < ctx.query.k - 2) {
            count(&QueryStats::pruned_support);
            return;
        }
        if (opts.influence && top.full()) {
            double theta = top.theta();
            double bound = center_bound(v);
            if (bound >= theta - theta_margin(theta) && !field.empty())
                bound = std::min(bound, field_preselect_bound(v));
            if (bound < theta - theta_margin(theta)) {
                count(&QueryStats::pruned_influence);
                return;
            }
        }

        auto cand = candidate_community(ctx, v);
        if (!cand) return;
        if (stats) stats->candidates++;

        if (!top.full()) {
            cand->score = exact_score(*cand);
            top.insert(std::move(*cand));
            return;
        }

        double bound = center_bound(v);
        if (!field.empty()) {
            double exactish = 0.0;
            for (VertexId u : cand->vertices) exactish += field[u];
            bound = std::min(bound, exactish);
        }
        if (opts.influence) {
            double theta = top.theta();
            if (bound < theta - theta_margin(theta)) {
                count(&QueryStats::pruned_influence);
                return;
            }
        }
        deferred.push_back({std::move(*cand), bound});
    }

    ResultList run() {
        const int r = ctx.query.radius;
        const auto& qdist = index.aux.vertex[ctx.query.center].pivot_dist;

        using HeapItem = std::tuple<int, std::uint32_t, const IndexEntry*>;
        std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;
        std::vector<FrontierItem> frontier_view;

        auto frontier_bound = [&] {
            // rebuilt from the heap's underlying storage only at termination checks
            frontier_view.clear();
            std::priority_queue copy = heap;
            while (!copy.empty()) {
                auto [key, id, entry] = copy.top();
                copy.pop();
                frontier_view.push_back({entry, key});
            }
            return max_inf_ub(frontier_view, ctx);
        };

        const IndexNode& root = index.nodes[index.root];
        for (const auto& entry : root.entries)
            heap.push({entry_lb_dist(entry, qdist), entry.child, &entry});

        while (!heap.empty()) {
            if (opts.influence && top.full()) {
                double theta = top.theta();
                if (theta > frontier_bound()) {
                    if (stats) stats->terminated_early = true;
                    break;
                }
            }
            auto [key, node_id, entry] = heap.top();
            heap.pop();
            const IndexNode& node = index.nodes[node_id];
            if (node.leaf) {
                for (VertexId v : node.members) process_center(v);
            } else {
                for (const auto& child : node.entries) {
                    if (stats) stats->entries_visited++;
                    if (opts.keyword && !child.bits[r - 1].intersects(ctx.query_bits)) {
                        if (stats) stats->pruned_index_keyword += child.vertex_total;
                        continue;
                    }
                    if (opts.support && child.support_bound[r - 1] < ctx.query.k) {
                        if (stats) stats->pruned_index_support += child.vertex_total;
                        continue;
                    }
                    heap.push({entry_lb_dist(child, qdist), child.child, &child});
                }
            }
        }

        // refinement in descending bound order, ties by center id
        std::stable_sort(deferred.begin(), deferred.end(), [](const Deferred& a, const Deferred& b) {
            if (a.bound != b.bound) return a.bound > b.bound;
            return a.answer.center < b.answer.center;
        });
        for (std::size_t i = 0; i < deferred.size(); ++i) {
            if (opts.influence && top.full()) {
                double theta = top.theta();
                if (deferred[i].bound < theta - theta_margin(theta)) {
                    if (stats) stats->pruned_influence += static_cast<long long>(deferred.size() - i);
                    break;
                }
            }
            deferred[i].answer.score = exact_score(deferred[i].answer);
            top.insert(std::move(deferred[i].answer));
        }

        ResultList out;
        out.answers = std::move(top.items);
        out.theta = static_cast<int>(out.answers.size()) >= ctx.query.top_m
                        ? out.answers.back().score
                        : 0.0;
        out.truncated = static_cast<int>(out.answers.size()) < ctx.query.top_m;
        return out;
    }
};

}  // namespace

ResultList topm_rics(const Index& index, const SocialNetwork& g, const Query& q,
                     const PruningOptions& opts, QueryStats* stats) {
    check_index_fingerprint(index, g);
    RicsEngine engine(index, g, q, opts, stats);
    return engine.run();
}

bool validate_seed_community(const SocialNetwork& g, const CommunityAnswer& answer,
                             const Query& q) {
    if (answer.vertices.empty()) return false;
    if (static_cast<int>(answer.vertices.size()) > q.max_size) return false;
    if (!std::binary_search(answer.vertices.begin(), answer.vertices.end(), answer.center))
        return false;

    // keyword qualification
    std::vector<std::int32_t> ids;
    for (const auto& kw : q.keywords) {
        auto id = g.keyword_id(kw);
        if (id >= 0) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    for (VertexId v : answer.vertices)
        if (!g.qualified(v, ids)) return false;

    // edges must exist in G with endpoints inside the answer
    for (const auto& [u, v] : answer.edges) {
        if (!g.has_edge(u, v)) return false;
        if (!std::binary_search(answer.vertices.begin(), answer.vertices.end(), u)) return false;
        if (!std::binary_search(answer.vertices.begin(), answer.vertices.end(), v)) return false;
    }

    // radius: every member within q.radius hops of the center in G
    auto dist = bfs_distances(g, answer.center);
    for (VertexId v : answer.vertices)
        if (dist[v] < 0 || dist[v] > q.radius) return false;

    // structure: connected k-truss over the answer's edge set
    Subgraph sg;
    sg.vertices = answer.vertices;
    sg.edges = answer.edges;
    return is_k_truss(sg, q.k);
}

}  // namespace rics
