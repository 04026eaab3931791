#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rics/index.hpp"
#include "rics/influence.hpp"

namespace rics {

struct Query {
    VertexId center = 0;                 // query vertex v_q
    std::vector<std::string> keywords;   // query keyword set
    int radius = 2;
    int k = 4;                           // truss parameter
    int max_size = 10;                   // community size cap N
    int top_m = 1;                       // result count M
};

struct CommunityAnswer {
    VertexId center = 0;
    std::vector<VertexId> vertices;
    std::vector<std::pair<VertexId, VertexId>> edges;
    double score = 0.0;
};

struct ResultList {
    std::vector<CommunityAnswer> answers;  // descending score, ties by center id
    double theta = 0.0;                    // score of the M-th entry when full
    bool truncated = false;                // fewer candidates than requested
};

// Lemma toggles. Keyword covers the vertex- and index-level keyword tests,
// support the edge/index support tests, influence the threshold machinery.
struct PruningOptions {
    bool keyword = true;
    bool support = true;
    bool influence = true;
};

struct QueryStats {
    long long candidates = 0;       // communities actually constructed
    long long refined = 0;          // exact community scorings
    long long pruned_keyword = 0;
    long long pruned_support = 0;
    long long pruned_influence = 0;
    long long pruned_index_keyword = 0;  // vertices under pruned entries
    long long pruned_index_support = 0;
    long long entries_visited = 0;
    bool terminated_early = false;

    long long pruned_total() const {
        return pruned_keyword + pruned_support + pruned_influence + pruned_index_keyword +
               pruned_index_support;
    }
};

// Shared query-time state for the indexed engine and the oracles.
struct QueryContext {
    const SocialNetwork* g = nullptr;
    const AuxTable* aux = nullptr;
    Query query;
    TargetCommunity target;
    std::vector<char> in_target;    // |V| membership flags
    std::vector<char> is_qualified; // |V| keyword qualification flags
    KeywordBitVector query_bits;
    double maxp = 0.0;
};

// Validates the query and materializes the target community. Throws
// QueryError when the center does not qualify, ParamError on bad parameters.
// Relaxed queries skip the truss-related parameter checks.
QueryContext prepare_query(const SocialNetwork& g, const AuxTable& aux, const Query& q,
                           bool relaxed = false);

// Canonical candidate generation shared by the indexed engine and the
// baseline: r-ball around the center, keyword filtering, support-bound edge
// filtering, truss peeling anchored at the center, size trimming ranked by
// per-vertex influence upper bounds. Unscored.
std::optional<CommunityAnswer> candidate_community(const QueryContext& ctx, VertexId center);

// Upper bound used as the trim rank and by the relaxed variant: |Q| for
// target members, |Q| * maxp^max(1, lb_dist - r) otherwise.
double vertex_influence_upper_bound(const QueryContext& ctx, VertexId v);

struct FrontierItem {
    const IndexEntry* entry;
    int key;  // distance lower bound to the query center
};

// Upper bound on the score of any candidate beneath any frontier entry.
double max_inf_ub(const std::vector<FrontierItem>& frontier, const QueryContext& ctx);

// Per-query memo of vertex-to-community scores. Candidates overlap heavily,
// so both engines score a community as the sum of cached member scores; the
// sum runs in ascending member order, matching calculate_influence bit for bit.
class CommunityScorer {
public:
    CommunityScorer(const SocialNetwork& g, const TargetCommunity& target)
        : g_(&g), target_(&target), cache_(g.vertex_count(), 0.0),
          have_(g.vertex_count(), 0) {}

    double vertex_score(VertexId v);
    double community_score(std::span<const VertexId> members);

private:
    const SocialNetwork* g_;
    const TargetCommunity* target_;
    std::vector<double> cache_;
    std::vector<char> have_;
};

// Online TopM-RICS over the tree index.
ResultList topm_rics(const Index& index, const SocialNetwork& g, const Query& q,
                     const PruningOptions& opts = {}, QueryStats* stats = nullptr);

// Definition-level validator used by the acceptance suite: center membership,
// size cap, k-truss over the answer's edge set, members within radius hops of
// the center in G, keyword qualification, connectivity.
bool validate_seed_community(const SocialNetwork& g, const CommunityAnswer& answer,
                             const Query& q);

}  // namespace rics
