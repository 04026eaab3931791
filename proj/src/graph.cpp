#include "rics/graph.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace rics {

// ---- parallelism helpers (declared in common.hpp) ----------------------------

int worker_threads() {
    static int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("RICS_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
        }
        return hw;
    }();
    return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int threads = worker_threads();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// ---- SocialNetwork ------------------------------------------------------------

SocialNetwork::SocialNetwork(std::size_t n, const std::vector<EdgeSpec>& edges,
                             const std::vector<std::vector<std::string>>& keywords) {
    if (keywords.size() != n)
        throw ValidationError("keyword table size does not match vertex count");
    adj_.resize(n);
    vertex_keywords_.resize(n);

    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::int32_t> ids;
        for (const auto& kw : keywords[v]) {
            if (kw.empty()) throw ValidationError("empty keyword on vertex " + std::to_string(v));
            auto it = keyword_lookup_.find(kw);
            std::int32_t id;
            if (it == keyword_lookup_.end()) {
                id = static_cast<std::int32_t>(keyword_names_.size());
                keyword_names_.push_back(kw);
                keyword_lookup_.emplace(kw, id);
            } else {
                id = it->second;
            }
            ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        vertex_keywords_[v] = std::move(ids);
    }

    std::set<std::pair<VertexId, VertexId>> seen;
    for (const auto& e : edges) {
        if (e.u >= n || e.v >= n)
            throw ValidationError("edge endpoint out of range: " + std::to_string(e.u) + "-" +
                                  std::to_string(e.v));
        if (e.u == e.v) throw ValidationError("self-loop on vertex " + std::to_string(e.u));
        for (double p : {e.p_uv, e.p_vu})
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError("activation probability outside [0,1] on edge " +
                                      std::to_string(e.u) + "-" + std::to_string(e.v));
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second)
            throw ValidationError("parallel edge " + std::to_string(e.u) + "-" +
                                  std::to_string(e.v));
        adj_[e.u].push_back({e.v, e.p_uv, 0});
        adj_[e.v].push_back({e.u, e.p_vu, 0});
        max_prob_ = std::max({max_prob_, e.p_uv, e.p_vu});
    }
    edge_count_ = seen.size();

    for (auto& nbrs : adj_)
        std::sort(nbrs.begin(), nbrs.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });

    // connectivity (vacuously true for the empty graph, required otherwise)
    if (n > 0) {
        std::vector<char> visited(n, 0);
        std::deque<VertexId> q{0};
        visited[0] = 1;
        std::size_t count = 1;
        while (!q.empty()) {
            VertexId u = q.front();
            q.pop_front();
            for (const auto& nb : adj_[u]) {
                if (!visited[nb.to]) {
                    visited[nb.to] = 1;
                    ++count;
                    q.push_back(nb.to);
                }
            }
        }
        if (count != n) throw ConnectivityError("graph is not connected");
    }

    // common-neighbor counts per edge (support upper bounds in the full graph)
    for (VertexId u = 0; u < n; ++u) {
        for (auto& nb : adj_[u]) {
            if (nb.to < u) continue;  // handle each undirected edge once
            const auto& a = adj_[u];
            const auto& b = adj_[nb.to];
            std::int32_t common = 0;
            std::size_t i = 0, j = 0;
            while (i < a.size() && j < b.size()) {
                if (a[i].to == b[j].to) {
                    ++common;
                    ++i;
                    ++j;
                } else if (a[i].to < b[j].to) {
                    ++i;
                } else {
                    ++j;
                }
            }
            nb.common = common;
            // mirror entry
            auto& back = adj_[nb.to];
            auto it = std::lower_bound(back.begin(), back.end(), u,
                                       [](const Neighbor& x, VertexId id) { return x.to < id; });
            it->common = common;
        }
    }

    // fingerprint over canonicalized content: vertex keywords (sorted names) and
    // sorted edges with probability bit patterns
    std::uint64_t h = fnv1a("RICS-G1");
    h = fnv1a_u64(n, h);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::string> names;
        for (auto id : vertex_keywords_[v]) names.push_back(keyword_names_[id]);
        std::sort(names.begin(), names.end());
        h = fnv1a_u64(names.size(), h);
        for (const auto& s : names) h = fnv1a(s, h);
    }
    for (VertexId u = 0; u < n; ++u) {
        for (const auto& nb : adj_[u]) {
            if (nb.to < u) continue;
            std::uint64_t puv_bits, pvu_bits;
            double puv = nb.prob;
            double pvu = prob(nb.to, u);
            std::memcpy(&puv_bits, &puv, 8);
            std::memcpy(&pvu_bits, &pvu, 8);
            h = fnv1a_u64(u, h);
            h = fnv1a_u64(nb.to, h);
            h = fnv1a_u64(puv_bits, h);
            h = fnv1a_u64(pvu_bits, h);
        }
    }
    fingerprint_ = h;
}

const Neighbor* SocialNetwork::find_neighbor(VertexId u, VertexId v) const {
    const auto& nbrs = adj_[u];
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                               [](const Neighbor& x, VertexId id) { return x.to < id; });
    if (it == nbrs.end() || it->to != v) return nullptr;
    return &*it;
}

double SocialNetwork::prob(VertexId u, VertexId v) const {
    const Neighbor* nb = find_neighbor(u, v);
    if (!nb) throw ValidationError("no edge " + std::to_string(u) + "-" + std::to_string(v));
    return nb->prob;
}

int SocialNetwork::edge_common_neighbors(VertexId u, VertexId v) const {
    const Neighbor* nb = find_neighbor(u, v);
    if (!nb) throw ValidationError("no edge " + std::to_string(u) + "-" + std::to_string(v));
    return nb->common;
}

std::int32_t SocialNetwork::keyword_id(const std::string& name) const {
    auto it = keyword_lookup_.find(name);
    return it == keyword_lookup_.end() ? -1 : it->second;
}

bool SocialNetwork::qualified(VertexId v, const std::vector<std::int32_t>& sorted_ids) const {
    const auto& own = vertex_keywords_[v];
    std::size_t i = 0, j = 0;
    while (i < own.size() && j < sorted_ids.size()) {
        if (own[i] == sorted_ids[j]) return true;
        if (own[i] < sorted_ids[j])
            ++i;
        else
            ++j;
    }
    return false;
}

bool Subgraph::contains(VertexId v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
}

bool TargetCommunity::contains(VertexId v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

// ---- file ingestion -----------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t' || c == ' ') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what, int line_no) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(std::string("bad ") + what + " '" + s + "' at line " +
                         std::to_string(line_no));
    return v;
}

double parse_prob(const std::string& s, int line_no) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw ParseError("bad probability '" + s + "' at line " + std::to_string(line_no));
    return v;
}

}  // namespace

SocialNetwork load_graph(const std::string& edge_path, const std::string& keyword_path) {
    std::ifstream kf(keyword_path);
    if (!kf) throw ParseError("cannot open keyword file " + keyword_path);
    std::vector<std::pair<std::uint64_t, std::vector<std::string>>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(kf, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() > 2)
            throw ParseError("keyword file line " + std::to_string(line_no) + ": too many fields");
        std::uint64_t id = parse_u64(fields[0], "vertex id", line_no);
        std::vector<std::string> kws;
        if (fields.size() == 2) {
            std::stringstream ss(fields[1]);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.empty())
                    throw ParseError("empty keyword at line " + std::to_string(line_no));
                kws.push_back(tok);
            }
        }
        rows.emplace_back(id, std::move(kws));
    }
    std::size_t n = rows.size();
    std::vector<std::vector<std::string>> keywords(n);
    std::vector<char> present(n, 0);
    for (auto& [id, kws] : rows) {
        if (id >= n) throw ValidationError("keyword file: vertex ids are not dense");
        if (present[id]) throw ValidationError("keyword file: duplicate vertex " + std::to_string(id));
        present[id] = 1;
        keywords[id] = std::move(kws);
    }

    std::ifstream ef(edge_path);
    if (!ef) throw ParseError("cannot open edge file " + edge_path);
    std::vector<EdgeSpec> edges;
    line_no = 0;
    while (std::getline(ef, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 4)
            throw ParseError("edge file line " + std::to_string(line_no) +
                             ": expected 'u v p_uv p_vu'");
        std::uint64_t u = parse_u64(fields[0], "vertex id", line_no);
        std::uint64_t v = parse_u64(fields[1], "vertex id", line_no);
        double puv = parse_prob(fields[2], line_no);
        double pvu = parse_prob(fields[3], line_no);
        if (u >= n || v >= n)
            throw ValidationError("edge file line " + std::to_string(line_no) +
                                  ": unknown vertex id");
        edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), puv, pvu});
    }
    return SocialNetwork(n, edges, keywords);
}

void write_graph_files(const SocialNetwork& g, const std::string& edge_path,
                       const std::string& keyword_path) {
    auto fmt_double = [](double v) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        return std::string(buf, p);
    };

    std::ofstream ef(edge_path, std::ios::binary);
    if (!ef) throw RicsError("cannot write " + edge_path);
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        for (const auto& nb : g.neighbors(u)) {
            if (nb.to < u) continue;
            ef << u << '\t' << nb.to << '\t' << fmt_double(nb.prob) << '\t'
               << fmt_double(g.prob(nb.to, u)) << '\n';
        }
    }

    std::ofstream kf(keyword_path, std::ios::binary);
    if (!kf) throw RicsError("cannot write " + keyword_path);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        kf << v << '\t';
        const auto& ids = g.keyword_ids(v);
        std::vector<std::string> names;
        for (auto id : ids) names.push_back(g.keyword_name(id));
        std::sort(names.begin(), names.end());
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) kf << ',';
            kf << names[i];
        }
        kf << '\n';
    }
}

// ---- synthetic generation ------------------------------------------------------

namespace {

int sample_keyword(Rng& rng, KeywordDistribution dist, int sigma,
                   const std::vector<double>& zipf_cdf) {
    switch (dist) {
        case KeywordDistribution::Uniform:
            return static_cast<int>(rng.next_index(sigma));
        case KeywordDistribution::Gaussian: {
            // Box-Muller; mean sigma/2, std sigma/6, clamped to [0, sigma)
            double u1 = (static_cast<double>(rng.next_u64() >> 11) + 1.0) * 0x1.0p-53;
            double u2 = rng.next_unit();
            double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            double x = sigma / 2.0 + z * sigma / 6.0;
            int idx = static_cast<int>(std::floor(x));
            return std::clamp(idx, 0, sigma - 1);
        }
        case KeywordDistribution::Zipf: {
            double u = rng.next_unit();
            auto it = std::upper_bound(zipf_cdf.begin(), zipf_cdf.end(), u);
            int idx = static_cast<int>(it - zipf_cdf.begin());
            return std::min(idx, sigma - 1);
        }
    }
    return 0;
}

}  // namespace

SocialNetwork generate_small_world(const SmallWorldParams& p) {
    if (p.n <= 2 * static_cast<std::uint32_t>(p.m))
        throw ParamError("small-world generator requires n > 2m");
    if (p.m < 1) throw ParamError("m must be >= 1");
    if (p.mu < 0.0 || p.mu > 1.0) throw ParamError("mu must lie in [0,1]");
    if (p.prob_lo > p.prob_hi || p.prob_lo < 0.0 || p.prob_hi > 1.0)
        throw ParamError("probability range must satisfy 0 <= lo <= hi <= 1");
    if (p.sigma < 1) throw ParamError("keyword domain size must be >= 1");
    if (p.keywords_per_vertex < 0 || p.keywords_per_vertex > p.sigma)
        throw ParamError("keywords per vertex must lie in [0, sigma]");

    Rng rng(p.seed);
    const std::uint32_t n = p.n;

    auto draw_prob = [&] {
        return p.prob_lo == p.prob_hi ? p.prob_lo : rng.next_real(p.prob_lo, p.prob_hi);
    };

    std::set<std::pair<VertexId, VertexId>> used;
    std::vector<EdgeSpec> edges;
    auto add_edge = [&](VertexId u, VertexId v) {
        auto key = std::minmax(u, v);
        if (u == v || !used.insert(key).second) return false;
        double puv = draw_prob();
        double pvu = draw_prob();
        edges.push_back({u, v, puv, pvu});
        return true;
    };

    // ring: connect each vertex to its m nearest neighbors on each side
    std::vector<std::pair<VertexId, VertexId>> ring;
    for (VertexId u = 0; u < n; ++u) {
        for (int i = 1; i <= p.m; ++i) {
            VertexId v = static_cast<VertexId>((u + i) % n);
            add_edge(u, v);
            ring.emplace_back(u, v);
        }
    }

    // shortcuts: each ring edge spawns one extra edge from u with probability mu
    for (const auto& [u, v] : ring) {
        (void)v;
        if (p.mu == 0.0) continue;
        if (rng.next_unit() >= p.mu) continue;
        for (int attempt = 0; attempt < 64; ++attempt) {
            VertexId w = static_cast<VertexId>(rng.next_index(n));
            if (add_edge(u, w)) break;
        }
    }

    // keywords
    std::vector<double> zipf_cdf;
    if (p.dist == KeywordDistribution::Zipf) {
        zipf_cdf.resize(p.sigma);
        double total = 0.0;
        for (int i = 0; i < p.sigma; ++i) total += 1.0 / (i + 1);
        double acc = 0.0;
        for (int i = 0; i < p.sigma; ++i) {
            acc += 1.0 / (i + 1) / total;
            zipf_cdf[i] = acc;
        }
    }

    std::vector<std::vector<std::string>> keywords(n);
    for (VertexId v = 0; v < n; ++v) {
        std::set<int> chosen;
        int guard = 0;
        while (static_cast<int>(chosen.size()) < p.keywords_per_vertex) {
            chosen.insert(sample_keyword(rng, p.dist, p.sigma, zipf_cdf));
            if (++guard > 100000) {
                // fill deterministically from the lowest unused indices
                for (int i = 0; i < p.sigma &&
                                static_cast<int>(chosen.size()) < p.keywords_per_vertex;
                     ++i)
                    chosen.insert(i);
            }
        }
        for (int id : chosen) keywords[v].push_back("k" + std::to_string(id));
    }

    return SocialNetwork(n, edges, keywords);
}

// ---- distance / neighborhood primitives ----------------------------------------

std::vector<std::int32_t> bfs_distances(const SocialNetwork& g, VertexId source) {
    std::vector<std::int32_t> dist(g.vertex_count(), -1);
    std::deque<VertexId> q{source};
    dist[source] = 0;
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop_front();
        for (const auto& nb : g.neighbors(u)) {
            if (dist[nb.to] < 0) {
                dist[nb.to] = dist[u] + 1;
                q.push_back(nb.to);
            }
        }
    }
    return dist;
}

int hop_distance(const SocialNetwork& g, VertexId u, VertexId v) {
    if (u == v) return 0;
    std::vector<std::int32_t> dist(g.vertex_count(), -1);
    std::deque<VertexId> q{u};
    dist[u] = 0;
    while (!q.empty()) {
        VertexId x = q.front();
        q.pop_front();
        for (const auto& nb : g.neighbors(x)) {
            if (dist[nb.to] < 0) {
                dist[nb.to] = dist[x] + 1;
                if (nb.to == v) return dist[nb.to];
                q.push_back(nb.to);
            }
        }
    }
    throw ConnectivityError("vertices are not connected");  // unreachable on valid graphs
}

std::vector<VertexId> ball_vertices(const SocialNetwork& g, VertexId center, int r) {
    std::vector<VertexId> out{center};
    if (r <= 0) return out;
    std::vector<std::int32_t> dist(g.vertex_count(), -1);
    std::deque<VertexId> q{center};
    dist[center] = 0;
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop_front();
        if (dist[u] == r) continue;
        for (const auto& nb : g.neighbors(u)) {
            if (dist[nb.to] < 0) {
                dist[nb.to] = dist[u] + 1;
                out.push_back(nb.to);
                q.push_back(nb.to);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Subgraph r_hop(const SocialNetwork& g, VertexId center, int r) {
    if (r < 0) throw ParamError("radius must be >= 0");
    Subgraph sg;
    sg.center = center;
    sg.radius = r;
    sg.vertices = ball_vertices(g, center, r);
    for (VertexId u : sg.vertices) {
        for (const auto& nb : g.neighbors(u)) {
            if (nb.to > u && std::binary_search(sg.vertices.begin(), sg.vertices.end(), nb.to))
                sg.edges.emplace_back(u, nb.to);
        }
    }
    std::sort(sg.edges.begin(), sg.edges.end());
    return sg;
}

TargetCommunity extract_target_community(const SocialNetwork& g, VertexId center, int r,
                                         const std::vector<std::string>& query_keywords) {
    std::vector<std::int32_t> ids;
    for (const auto& kw : query_keywords) {
        std::int32_t id = g.keyword_id(kw);
        if (id >= 0) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    if (!g.qualified(center, ids))
        throw QueryError("query center carries no query keyword");

    // BFS restricted to qualified vertices, depth <= r: guarantees both the
    // within-community distance constraint and connectivity
    TargetCommunity tc;
    tc.center = center;
    tc.radius = r;
    tc.query_keywords = ids;
    std::vector<std::int32_t> dist(g.vertex_count(), -1);
    std::deque<VertexId> q{center};
    dist[center] = 0;
    tc.members.push_back(center);
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop_front();
        if (dist[u] == r) continue;
        for (const auto& nb : g.neighbors(u)) {
            if (dist[nb.to] < 0 && g.qualified(nb.to, ids)) {
                dist[nb.to] = dist[u] + 1;
                tc.members.push_back(nb.to);
                q.push_back(nb.to);
            }
        }
    }
    std::sort(tc.members.begin(), tc.members.end());
    return tc;
}

}  // namespace rics
