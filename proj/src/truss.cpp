#include "rics/truss.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace rics {

namespace {

// adjacency sets over the subgraph's explicit edge list
std::unordered_map<VertexId, std::set<VertexId>> build_adjacency(const Subgraph& sg) {
    std::unordered_map<VertexId, std::set<VertexId>> adj;
    for (VertexId v : sg.vertices) adj[v];
    for (const auto& [u, v] : sg.edges) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    return adj;
}

int common_count(const std::set<VertexId>& a, const std::set<VertexId>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    int c = 0;
    for (VertexId v : small)
        if (large.count(v)) ++c;
    return c;
}

Subgraph from_adjacency(const std::unordered_map<VertexId, std::set<VertexId>>& adj,
                        const std::set<VertexId>& keep) {
    Subgraph out;
    out.vertices.assign(keep.begin(), keep.end());
    for (VertexId u : keep)
        for (VertexId v : adj.at(u))
            if (u < v && keep.count(v)) out.edges.emplace_back(u, v);
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

}  // namespace

int edge_support(const Subgraph& sg, VertexId u, VertexId v) {
    auto adj = build_adjacency(sg);
    auto iu = adj.find(u);
    auto iv = adj.find(v);
    if (iu == adj.end() || iv == adj.end() || !iu->second.count(v))
        throw ValidationError("edge not present in subgraph");
    return common_count(iu->second, iv->second);
}

int support_upper_bound(const SocialNetwork& g, VertexId u, VertexId v) {
    return g.edge_common_neighbors(u, v);
}

bool is_k_truss(const Subgraph& sg, int k) {
    if (k < 2) throw ParamError("k must be >= 2");
    if (sg.vertices.empty()) return false;
    auto adj = build_adjacency(sg);

    // connectivity over the explicit edge set
    std::set<VertexId> seen{sg.vertices.front()};
    std::deque<VertexId> q{sg.vertices.front()};
    while (!q.empty()) {
        VertexId x = q.front();
        q.pop_front();
        for (VertexId y : adj.at(x))
            if (seen.insert(y).second) q.push_back(y);
    }
    if (seen.size() != sg.vertices.size()) return false;

    for (const auto& [u, v] : sg.edges)
        if (common_count(adj.at(u), adj.at(v)) < k - 2) return false;
    return true;
}

std::optional<Subgraph> maximal_k_truss(const Subgraph& sg, int k, VertexId anchor) {
    if (k < 2) throw ParamError("k must be >= 2");
    if (!sg.contains(anchor)) throw ParamError("anchor is not in the subgraph");

    auto adj = build_adjacency(sg);

    // peel edges below the support threshold to a fixed point
    std::deque<std::pair<VertexId, VertexId>> queue;
    std::set<std::pair<VertexId, VertexId>> queued;
    auto enqueue_if_low = [&](VertexId u, VertexId v) {
        if (u > v) std::swap(u, v);
        if (!adj.at(u).count(v)) return;
        if (common_count(adj.at(u), adj.at(v)) < k - 2 && queued.insert({u, v}).second)
            queue.push_back({u, v});
    };
    for (const auto& [u, v] : sg.edges) enqueue_if_low(u, v);
    while (!queue.empty()) {
        auto [u, v] = queue.front();
        queue.pop_front();
        queued.erase({u, v});
        if (!adj.at(u).count(v)) continue;
        // removal can only lower supports of edges sharing a triangle with (u,v)
        std::vector<VertexId> commons;
        for (VertexId w : adj.at(u))
            if (adj.at(v).count(w)) commons.push_back(w);
        adj.at(u).erase(v);
        adj.at(v).erase(u);
        for (VertexId w : commons) {
            enqueue_if_low(u, w);
            enqueue_if_low(v, w);
        }
    }

    // drop isolated vertices; anchor must survive
    if (adj.at(anchor).empty()) return std::nullopt;

    // connected component of the anchor
    std::set<VertexId> comp{anchor};
    std::deque<VertexId> bfs{anchor};
    while (!bfs.empty()) {
        VertexId x = bfs.front();
        bfs.pop_front();
        for (VertexId y : adj.at(x))
            if (comp.insert(y).second) bfs.push_back(y);
    }
    Subgraph out = from_adjacency(adj, comp);
    out.center = anchor;
    out.radius = sg.radius;
    return out;
}

std::optional<Subgraph> trim_to_size(const Subgraph& community, int max_size, int k,
                                     VertexId anchor,
                                     const std::function<double(VertexId)>& rank) {
    if (max_size < 1) throw ParamError("size cap must be >= 1");
    Subgraph current = community;
    while (static_cast<int>(current.vertices.size()) > max_size) {
        std::vector<VertexId> order;
        for (VertexId v : current.vertices)
            if (v != anchor) order.push_back(v);
        std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
            double ra = rank(a), rb = rank(b);
            if (ra != rb) return ra < rb;
            return a < b;
        });
        bool removed = false;
        for (VertexId victim : order) {
            Subgraph reduced;
            reduced.center = current.center;
            reduced.radius = current.radius;
            for (VertexId v : current.vertices)
                if (v != victim) reduced.vertices.push_back(v);
            for (const auto& e : current.edges)
                if (e.first != victim && e.second != victim) reduced.edges.push_back(e);
            auto peeled = maximal_k_truss(reduced, k, anchor);
            if (peeled) {
                current = std::move(*peeled);
                removed = true;
                break;
            }
        }
        if (!removed) return std::nullopt;
    }
    return current;
}

}  // namespace rics
