#include "rics/index.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>

#include "rics/influence.hpp"

namespace rics {

namespace {

// balls reused across cost evaluations within one partitioning run
std::vector<std::vector<VertexId>> all_balls(const SocialNetwork& g, int r_max) {
    std::vector<std::vector<VertexId>> balls(g.vertex_count());
    parallel_for(g.vertex_count(), [&](std::size_t v) {
        balls[v] = ball_vertices(g, static_cast<VertexId>(v), r_max);
    });
    return balls;
}

long long cost_with_balls(const std::vector<std::vector<VertexId>>& balls,
                          const std::vector<std::int32_t>& owner, int m) {
    long long cross = 0;
    std::vector<long long> sizes(m, 0);
    for (std::size_t v = 0; v < owner.size(); ++v) ++sizes[owner[v]];
    for (std::size_t v = 0; v < owner.size(); ++v) {
        std::int32_t home = owner[v];
        for (VertexId w : balls[v])
            if (owner[w] != home) ++cross;
    }
    long long max_size = *std::max_element(sizes.begin(), sizes.end());
    long long min_size = *std::min_element(sizes.begin(), sizes.end());
    return cross + (max_size - min_size);
}

// multi-source BFS wavefronts, ties to the lowest pivot index; level-synced so
// tie-breaking is independent of queue order
std::vector<std::int32_t> cluster_by_pivots(const SocialNetwork& g,
                                            const std::vector<VertexId>& pivots) {
    std::vector<std::int32_t> owner(g.vertex_count(), -1);
    std::vector<VertexId> frontier;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        owner[pivots[i]] = static_cast<std::int32_t>(i);
        frontier.push_back(pivots[i]);
    }
    std::vector<std::int32_t> claim(g.vertex_count(), -1);
    while (!frontier.empty()) {
        std::vector<VertexId> next;
        for (VertexId u : frontier) {
            for (const auto& nb : g.neighbors(u)) {
                if (owner[nb.to] >= 0) continue;
                if (claim[nb.to] < 0 || owner[u] < claim[nb.to]) {
                    if (claim[nb.to] < 0) next.push_back(nb.to);
                    claim[nb.to] = owner[u];
                }
            }
        }
        for (VertexId v : next) owner[v] = claim[v];
        frontier = std::move(next);
    }
    return owner;
}

Partitioning assemble(const SocialNetwork& g, const std::vector<VertexId>& pivots,
                      const std::vector<std::vector<VertexId>>& balls) {
    Partitioning p;
    p.part_pivots = pivots;
    p.owner = cluster_by_pivots(g, pivots);
    p.parts.assign(pivots.size(), {});
    for (std::size_t v = 0; v < p.owner.size(); ++v)
        p.parts[p.owner[v]].push_back(static_cast<VertexId>(v));
    p.cost = cost_with_balls(balls, p.owner, static_cast<int>(pivots.size()));
    return p;
}

}  // namespace

long long calculate_cost(const SocialNetwork& g, const Partitioning& p, int r_max) {
    if (p.owner.size() != g.vertex_count()) throw ParamError("partitioning size mismatch");
    auto balls = all_balls(g, r_max);
    return cost_with_balls(balls, p.owner, static_cast<int>(p.parts.size()));
}

Partitioning partition_graph(const SocialNetwork& g, int m, int iter_max, int r_max,
                             std::uint64_t seed) {
    if (m < 1 || m > static_cast<int>(g.vertex_count()))
        throw ParamError("partition count must lie in [1, |V|]");
    Rng rng(seed);
    auto balls = all_balls(g, r_max);

    // random distinct pivot seeds
    std::vector<VertexId> pivots;
    std::vector<char> is_pivot(g.vertex_count(), 0);
    while (static_cast<int>(pivots.size()) < m) {
        VertexId v = static_cast<VertexId>(rng.next_index(g.vertex_count()));
        if (!is_pivot[v]) {
            is_pivot[v] = 1;
            pivots.push_back(v);
        }
    }

    Partitioning best = assemble(g, pivots, balls);
    for (int iter = 0; iter < iter_max; ++iter) {
        if (m == static_cast<int>(g.vertex_count())) break;  // nothing to swap
        std::size_t slot = rng.next_index(pivots.size());
        VertexId replacement;
        do {
            replacement = static_cast<VertexId>(rng.next_index(g.vertex_count()));
        } while (is_pivot[replacement]);
        std::vector<VertexId> proposal = best.part_pivots;
        VertexId removed = proposal[slot];
        proposal[slot] = replacement;
        Partitioning cand = assemble(g, proposal, balls);
        if (cand.cost < best.cost) {
            best = std::move(cand);
            is_pivot[removed] = 0;
            is_pivot[replacement] = 1;
        }
    }
    return best;
}

// ---- tree construction ----------------------------------------------------------

namespace {

int radius_slots(const AuxTable& aux) { return aux.r_max; }

IndexEntry aggregate_leaf(const AuxTable& aux, const IndexNode& leaf, std::uint32_t child_id) {
    const int R = radius_slots(aux);
    const int d = static_cast<int>(aux.pivots.size());
    IndexEntry e;
    e.child = child_id;
    e.vertex_total = static_cast<std::uint32_t>(leaf.members.size());
    e.bits.assign(R, KeywordBitVector(aux.bits_width));
    e.lb_dist.assign(d, std::numeric_limits<std::int32_t>::max());
    e.ub_dist.assign(d, 0);
    e.support_bound.assign(R, 0);
    e.boundary_inf_max.assign(R, 0.0);
    e.boundary_inf_sum.assign(R, 0.0);
    e.ball_size.assign(R, 0);
    for (VertexId v : leaf.members) {
        const VertexAux& va = aux.vertex[v];
        for (int j = 0; j < d; ++j) {
            e.lb_dist[j] = std::min(e.lb_dist[j], va.pivot_dist[j]);
            e.ub_dist[j] = std::max(e.ub_dist[j], va.pivot_dist[j]);
        }
        for (int s = 0; s < R; ++s) {
            e.bits[s].or_with(va.bits[s]);
            e.support_bound[s] = std::max(e.support_bound[s], va.support_bound[s]);
            e.boundary_inf_max[s] = std::max(e.boundary_inf_max[s], va.boundary_inf_max[s]);
            e.boundary_inf_sum[s] = std::max(e.boundary_inf_sum[s], va.boundary_inf_sum[s]);
            e.ball_size[s] = std::max(e.ball_size[s], va.ball_size[s]);
        }
    }
    return e;
}

IndexEntry aggregate_entries(const AuxTable& aux, const std::vector<IndexEntry>& children,
                             std::uint32_t child_id) {
    const int R = radius_slots(aux);
    const int d = static_cast<int>(aux.pivots.size());
    IndexEntry e;
    e.child = child_id;
    e.bits.assign(R, KeywordBitVector(aux.bits_width));
    e.lb_dist.assign(d, std::numeric_limits<std::int32_t>::max());
    e.ub_dist.assign(d, 0);
    e.support_bound.assign(R, 0);
    e.boundary_inf_max.assign(R, 0.0);
    e.boundary_inf_sum.assign(R, 0.0);
    e.ball_size.assign(R, 0);
    for (const IndexEntry& c : children) {
        e.vertex_total += c.vertex_total;
        for (int j = 0; j < d; ++j) {
            e.lb_dist[j] = std::min(e.lb_dist[j], c.lb_dist[j]);
            e.ub_dist[j] = std::max(e.ub_dist[j], c.ub_dist[j]);
        }
        for (int s = 0; s < R; ++s) {
            e.bits[s].or_with(c.bits[s]);
            e.support_bound[s] = std::max(e.support_bound[s], c.support_bound[s]);
            e.boundary_inf_max[s] = std::max(e.boundary_inf_max[s], c.boundary_inf_max[s]);
            e.boundary_inf_sum[s] = std::max(e.boundary_inf_sum[s], c.boundary_inf_sum[s]);
            e.ball_size[s] = std::max(e.ball_size[s], c.ball_size[s]);
        }
    }
    return e;
}

}  // namespace

Index build_index(const SocialNetwork& g, AuxTable aux, const Partitioning& parts,
                  const IndexParams& params) {
    if (aux.r_max != params.r_max || aux.bits_width != params.bits_width)
        throw ParamError("aux table parameters do not match the index parameters");
    if (aux.vertex.size() != g.vertex_count())
        throw ParamError("aux table does not cover the graph");
    if (params.fanout < 2) throw ParamError("fanout must be >= 2");

    Index index;
    index.params = params;
    index.params.partitions = static_cast<int>(parts.parts.size());
    index.graph_fingerprint = g.fingerprint();
    index.aux = std::move(aux);

    // order leaves by the BFS discovery order of their generating pivots,
    // starting from the lowest pivot id, so sibling groups stay local
    VertexId start = *std::min_element(parts.part_pivots.begin(), parts.part_pivots.end());
    auto dist = bfs_distances(g, start);
    std::vector<std::size_t> leaf_order(parts.parts.size());
    std::iota(leaf_order.begin(), leaf_order.end(), 0);
    std::stable_sort(leaf_order.begin(), leaf_order.end(), [&](std::size_t a, std::size_t b) {
        VertexId pa = parts.part_pivots[a], pb = parts.part_pivots[b];
        if (dist[pa] != dist[pb]) return dist[pa] < dist[pb];
        return pa < pb;
    });

    // leaves
    std::vector<IndexEntry> level;
    for (std::size_t idx : leaf_order) {
        IndexNode leaf;
        leaf.leaf = true;
        leaf.members = parts.parts[idx];
        std::uint32_t id = static_cast<std::uint32_t>(index.nodes.size());
        index.nodes.push_back(std::move(leaf));
        level.push_back(aggregate_leaf(index.aux, index.nodes[id], id));
    }

    // group up to fanout children per parent until a single root remains
    while (level.size() > 1 || index.nodes.size() == level.size()) {
        std::vector<IndexEntry> next;
        for (std::size_t i = 0; i < level.size(); i += params.fanout) {
            IndexNode parent;
            parent.leaf = false;
            std::size_t hi = std::min(level.size(), i + params.fanout);
            std::vector<IndexEntry> group(level.begin() + i, level.begin() + hi);
            parent.entries = group;
            std::uint32_t id = static_cast<std::uint32_t>(index.nodes.size());
            index.nodes.push_back(std::move(parent));
            next.push_back(aggregate_entries(index.aux, group, id));
        }
        level = std::move(next);
        if (level.size() == 1) break;
    }
    index.root = static_cast<std::uint32_t>(index.nodes.size() - 1);
    return index;
}

// ---- serialization ----------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'R', 'I', 'C', 'S', 'I', 'D', 'X', '1'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw RicsError("cannot write " + path);
    }
    void raw(const void* p, std::size_t n) { out.write(static_cast<const char*>(p), n); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void i32(std::int32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void bits(const KeywordBitVector& bv) {
        u32(static_cast<std::uint32_t>(bv.width()));
        for (auto w : bv.words()) u64(w);
    }
};

struct Reader {
    std::ifstream in;
    explicit Reader(const std::string& path) : in(path, std::ios::binary) {
        if (!in) throw FormatError("cannot open " + path);
    }
    void raw(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), n);
        if (in.gcount() != static_cast<std::streamsize>(n))
            throw FormatError("truncated index file");
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, 4);
        return v;
    }
    std::int32_t i32() {
        std::int32_t v;
        raw(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, 8);
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    KeywordBitVector bits() {
        std::uint32_t width = u32();
        if (width > 1 << 20) throw FormatError("implausible bit vector width");
        KeywordBitVector bv(static_cast<int>(width));
        for (auto& w : bv.words()) w = u64();
        return bv;
    }
};

void write_entry(Writer& w, const IndexEntry& e) {
    w.u32(e.child);
    w.u32(e.vertex_total);
    w.u32(static_cast<std::uint32_t>(e.bits.size()));
    for (const auto& b : e.bits) w.bits(b);
    w.u32(static_cast<std::uint32_t>(e.lb_dist.size()));
    for (auto v : e.lb_dist) w.i32(v);
    for (auto v : e.ub_dist) w.i32(v);
    for (auto v : e.support_bound) w.i32(v);
    for (auto v : e.boundary_inf_max) w.f64(v);
    for (auto v : e.boundary_inf_sum) w.f64(v);
    for (auto v : e.ball_size) w.i32(v);
}

IndexEntry read_entry(Reader& r, int r_slots) {
    IndexEntry e;
    e.child = r.u32();
    e.vertex_total = r.u32();
    std::uint32_t nbits = r.u32();
    if (static_cast<int>(nbits) != r_slots) throw FormatError("entry radius count mismatch");
    for (std::uint32_t i = 0; i < nbits; ++i) e.bits.push_back(r.bits());
    std::uint32_t d = r.u32();
    e.lb_dist.resize(d);
    e.ub_dist.resize(d);
    for (auto& v : e.lb_dist) v = r.i32();
    for (auto& v : e.ub_dist) v = r.i32();
    e.support_bound.resize(r_slots);
    e.boundary_inf_max.resize(r_slots);
    e.boundary_inf_sum.resize(r_slots);
    e.ball_size.resize(r_slots);
    for (auto& v : e.support_bound) v = r.i32();
    for (auto& v : e.boundary_inf_max) v = r.f64();
    for (auto& v : e.boundary_inf_sum) v = r.f64();
    for (auto& v : e.ball_size) v = r.i32();
    return e;
}

}  // namespace

void save_index(const Index& index, const std::string& path) {
    Writer w(path);
    w.raw(kMagic, 8);
    w.u32(kVersion);
    w.u64(index.graph_fingerprint);

    w.i32(index.params.r_max);
    w.i32(index.params.bits_width);
    w.i32(index.params.pivot_count);
    w.i32(index.params.fanout);
    w.i32(index.params.partitions);
    w.i32(index.params.iter_max);
    w.u64(index.params.pivot_seed);
    w.u64(index.params.partition_seed);

    w.u32(static_cast<std::uint32_t>(index.aux.pivots.size()));
    for (auto p : index.aux.pivots) w.u32(p);

    w.u32(static_cast<std::uint32_t>(index.aux.vertex.size()));
    for (const auto& va : index.aux.vertex) {
        w.bits(va.bits0);
        for (auto dv : va.pivot_dist) w.i32(dv);
        for (const auto& b : va.bits) w.bits(b);
        for (auto v : va.support_bound) w.i32(v);
        for (auto v : va.boundary_inf_max) w.f64(v);
        for (auto v : va.boundary_inf_sum) w.f64(v);
        for (auto v : va.ball_size) w.i32(v);
    }

    w.u32(static_cast<std::uint32_t>(index.nodes.size()));
    for (const auto& node : index.nodes) {
        w.u32(node.leaf ? 1 : 0);
        if (node.leaf) {
            w.u32(static_cast<std::uint32_t>(node.members.size()));
            for (auto v : node.members) w.u32(v);
        } else {
            w.u32(static_cast<std::uint32_t>(node.entries.size()));
            for (const auto& e : node.entries) write_entry(w, e);
        }
    }
    w.u32(index.root);
    if (!w.out) throw RicsError("write failure on " + path);
}

Index load_index(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw FormatError("not an index file (bad magic)");
    if (r.u32() != kVersion) throw FormatError("unsupported index version");

    Index index;
    index.graph_fingerprint = r.u64();
    index.params.r_max = r.i32();
    index.params.bits_width = r.i32();
    index.params.pivot_count = r.i32();
    index.params.fanout = r.i32();
    index.params.partitions = r.i32();
    index.params.iter_max = r.i32();
    index.params.pivot_seed = r.u64();
    index.params.partition_seed = r.u64();
    if (index.params.r_max < 1 || index.params.r_max > 64)
        throw FormatError("implausible r_max");

    const int R = index.params.r_max;
    index.aux.r_max = R;
    index.aux.bits_width = index.params.bits_width;
    std::uint32_t d = r.u32();
    index.aux.pivots.resize(d);
    for (auto& p : index.aux.pivots) p = r.u32();

    std::uint32_t n = r.u32();
    index.aux.vertex.resize(n);
    for (auto& va : index.aux.vertex) {
        va.bits0 = r.bits();
        va.pivot_dist.resize(d);
        for (auto& dv : va.pivot_dist) dv = r.i32();
        va.bits.resize(R);
        for (auto& b : va.bits) b = r.bits();
        va.support_bound.resize(R);
        va.boundary_inf_max.resize(R);
        va.boundary_inf_sum.resize(R);
        va.ball_size.resize(R);
        for (auto& v : va.support_bound) v = r.i32();
        for (auto& v : va.boundary_inf_max) v = r.f64();
        for (auto& v : va.boundary_inf_sum) v = r.f64();
        for (auto& v : va.ball_size) v = r.i32();
    }

    std::uint32_t node_count = r.u32();
    index.nodes.resize(node_count);
    for (auto& node : index.nodes) {
        node.leaf = r.u32() != 0;
        std::uint32_t count = r.u32();
        if (node.leaf) {
            node.members.resize(count);
            for (auto& v : node.members) v = r.u32();
        } else {
            for (std::uint32_t i = 0; i < count; ++i) node.entries.push_back(read_entry(r, R));
        }
    }
    index.root = r.u32();
    if (index.root >= index.nodes.size()) throw FormatError("root id out of range");
    for (std::size_t id = 0; id < index.nodes.size(); ++id) {
        const auto& node = index.nodes[id];
        for (const auto& e : node.entries)
            if (e.child >= id) throw FormatError("child reference out of order");
        for (VertexId v : node.members)
            if (v >= n) throw FormatError("leaf member out of range");
    }
    return index;
}

void check_index_fingerprint(const Index& index, const SocialNetwork& g) {
    if (index.graph_fingerprint != g.fingerprint())
        throw StaleIndexError("index was built over different graph inputs");
}

bool audit_index(const Index& index) {
    const int R = index.params.r_max;
    const int d = static_cast<int>(index.aux.pivots.size());

    // collect vertices beneath each node
    std::vector<std::vector<VertexId>> beneath(index.nodes.size());
    for (std::size_t id = 0; id < index.nodes.size(); ++id) {
        const IndexNode& node = index.nodes[id];
        if (node.leaf) {
            beneath[id] = node.members;
        } else {
            for (const auto& e : node.entries) {
                // children always precede parents
                if (e.child >= id) return false;
                beneath[id].insert(beneath[id].end(), beneath[e.child].begin(),
                                   beneath[e.child].end());
            }
        }
    }

    for (const IndexNode& node : index.nodes) {
        if (node.leaf) continue;
        for (const auto& e : node.entries) {
            if (e.vertex_total != beneath[e.child].size()) return false;
            for (VertexId v : beneath[e.child]) {
                const VertexAux& va = index.aux.vertex[v];
                for (int j = 0; j < d; ++j) {
                    if (va.pivot_dist[j] < e.lb_dist[j]) return false;
                    if (va.pivot_dist[j] > e.ub_dist[j]) return false;
                }
                for (int s = 0; s < R; ++s) {
                    if (!e.bits[s].contains(va.bits[s])) return false;
                    if (va.support_bound[s] > e.support_bound[s]) return false;
                    if (va.boundary_inf_max[s] > e.boundary_inf_max[s]) return false;
                    if (va.boundary_inf_sum[s] > e.boundary_inf_sum[s]) return false;
                    if (va.ball_size[s] > e.ball_size[s]) return false;
                }
            }
        }
    }

    // leaves partition the vertex set
    std::size_t total = 0;
    for (const IndexNode& node : index.nodes)
        if (node.leaf) total += node.members.size();
    return total == index.aux.vertex.size();
}

}  // namespace rics
