// Command-line front end: graph generation, offline index construction,
// TopM-RICS / TopM-R2ICS querying, and benchmarking with a pruning ablation.
//
// Exit codes: 0 ok, 2 usage or malformed input, 3 query-domain error,
// 4 stale index, 5 internal error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "rics/graph.hpp"
#include "rics/index.hpp"
#include "rics/oracles.hpp"
#include "rics/query.hpp"
#include "rics/r2ics.hpp"

using nlohmann::json;
using namespace rics;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitQuery = 3;
constexpr int kExitStale = 4;
constexpr int kExitInternal = 5;

double round_score(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double wall_ms(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

json stats_json(const QueryStats& s) {
    return json{{"candidates", s.candidates},
                {"refined", s.refined},
                {"pruned",
                 {{"keyword", s.pruned_keyword},
                  {"support", s.pruned_support},
                  {"influence", s.pruned_influence},
                  {"index_keyword", s.pruned_index_keyword},
                  {"index_support", s.pruned_index_support}}}};
}

json query_json(const Query& q, const std::string& variant, const std::string& engine) {
    return json{{"vq", q.center}, {"lq", q.keywords},    {"r", q.radius},
                {"k", q.k},       {"n", q.max_size},     {"m", q.top_m},
                {"variant", variant}, {"engine", engine}};
}

struct LoadedInputs {
    SocialNetwork graph;
    Index index;
};

LoadedInputs load_inputs(const std::string& graph_path, const std::string& keyword_path,
                         const std::string& index_path) {
    auto g = load_graph(graph_path, keyword_path);
    auto idx = load_index(index_path);
    check_index_fingerprint(idx, g);
    return {std::move(g), std::move(idx)};
}

// ---- generate ------------------------------------------------------------------

struct GenerateArgs {
    SmallWorldParams params;
    std::string dist = "uniform";
    std::string out_prefix = "graph";
};

int cmd_generate(const GenerateArgs& args) {
    SmallWorldParams p = args.params;
    if (args.dist == "uniform")
        p.dist = KeywordDistribution::Uniform;
    else if (args.dist == "gaussian")
        p.dist = KeywordDistribution::Gaussian;
    else if (args.dist == "zipf")
        p.dist = KeywordDistribution::Zipf;
    else
        throw ParamError("unknown keyword distribution '" + args.dist + "'");

    auto g = generate_small_world(p);
    write_graph_files(g, args.out_prefix + ".edges", args.out_prefix + ".keywords");
    std::cerr << "wrote " << args.out_prefix << ".edges and " << args.out_prefix
              << ".keywords (" << g.vertex_count() << " vertices, " << g.edge_count()
              << " edges)\n";
    return kExitOk;
}

// ---- build-index ----------------------------------------------------------------

struct BuildArgs {
    std::string graph_path, keyword_path, out_path = "graph.rics";
    IndexParams params;
};

int cmd_build_index(const BuildArgs& args) {
    if (args.params.r_max < 1) throw ParamError("--rmax must be >= 1");
    auto g = load_graph(args.graph_path, args.keyword_path);

    IndexParams params = args.params;
    if (params.partitions <= 0)
        params.partitions = static_cast<int>((g.vertex_count() + 255) / 256);
    params.partitions = std::min<int>(params.partitions, static_cast<int>(g.vertex_count()));

    auto pivots = select_pivots(g, params.pivot_count, params.pivot_seed);
    auto aux = build_vertex_aux(g, params.r_max, pivots, params.bits_width);
    auto parts = partition_graph(g, params.partitions, params.iter_max, params.r_max,
                                 params.partition_seed);
    auto index = build_index(g, std::move(aux), parts, params);
    save_index(index, args.out_path);
    std::cerr << "wrote " << args.out_path << " (" << index.nodes.size() << " nodes, "
              << parts.parts.size() << " partitions, cost " << parts.cost << ")\n";
    return kExitOk;
}

// ---- query ----------------------------------------------------------------------

struct QueryArgs {
    std::string graph_path, keyword_path, index_path;
    Query query;
    std::string lq;
    std::string variant = "rics";
    std::string engine = "indexed";
    bool json_output = true;
};

int cmd_query(const QueryArgs& args) {
    Query q = args.query;
    q.keywords = split_csv(args.lq);
    if (q.keywords.empty()) throw ParamError("--lq must name at least one keyword");
    if (args.variant != "rics" && args.variant != "r2ics")
        throw ParamError("--variant must be rics or r2ics");
    if (args.variant == "rics" && args.engine != "indexed" && args.engine != "baseline")
        throw ParamError("--engine must be indexed or baseline for the rics variant");
    if (args.variant == "r2ics" && args.engine != "indexed" && args.engine != "optimal")
        throw ParamError("--engine must be indexed or optimal for the r2ics variant");
    if (q.k == 2) std::cerr << "note: k=2 degenerates to connected subgraphs\n";

    auto inputs = load_inputs(args.graph_path, args.keyword_path, args.index_path);

    json out;
    out["variant"] = args.variant;
    out["query"] = query_json(q, args.variant, args.engine);
    QueryStats stats;

    json answers = json::array();
    if (args.variant == "rics") {
        ResultList result = args.engine == "indexed"
                                ? topm_rics(inputs.index, inputs.graph, q, {}, &stats)
                                : baseline_rics(inputs.graph, inputs.index.aux, q, &stats);
        for (const auto& ans : result.answers)
            answers.push_back(json{{"center", ans.center},
                                   {"vertices", ans.vertices},
                                   {"score", round_score(ans.score)}});
        out["stats"] = stats_json(stats);
        out["stats"]["truncated"] = result.truncated;
    } else {
        RelaxedResultList result = args.engine == "indexed"
                                       ? topm_r2ics(inputs.index, inputs.graph, q, {}, &stats)
                                       : optimal_r2ics(inputs.graph, inputs.index.aux, q, &stats);
        for (const auto& ans : result.answers)
            answers.push_back(json{{"center", nullptr},
                                   {"vertices", ans.vertices},
                                   {"score", round_score(ans.score)}});
        out["stats"] = stats_json(stats);
        out["stats"]["truncated"] = result.truncated;
    }
    out["answers"] = answers;
    std::cout << out.dump() << "\n";
    return kExitOk;
}

// ---- bench ----------------------------------------------------------------------

struct BenchArgs {
    std::string graph_path, keyword_path, index_path;
    int runs = 50;
    std::uint64_t seed = 1;
    int r = 2, k = 4, n = 10, m_results = 1;
    int lq_size = 5;
    double sample_frac = 0.001;
    std::string variant = "rics";
    bool ablation = false;
};

std::uint64_t answers_signature(const ResultList& res) {
    std::uint64_t h = fnv1a("answers");
    for (const auto& ans : res.answers) {
        h = fnv1a_u64(ans.center, h);
        for (VertexId v : ans.vertices) h = fnv1a_u64(v, h);
        h = fnv1a_u64(static_cast<std::uint64_t>(std::llround(ans.score * 1e9)), h);
    }
    return h;
}

int cmd_bench(const BenchArgs& args) {
    if (args.runs < 1) throw ParamError("--runs must be >= 1");
    if (args.lq_size < 1) throw ParamError("--lq-size must be >= 1");
    auto inputs = load_inputs(args.graph_path, args.keyword_path, args.index_path);
    const auto& g = inputs.graph;
    const auto& index = inputs.index;
    Rng rng(args.seed);

    // keyword domain of the loaded graph
    std::vector<std::string> domain;
    for (std::size_t i = 0; i < g.keyword_domain_size(); ++i)
        domain.push_back(g.keyword_name(static_cast<std::int32_t>(i)));
    if (domain.empty()) throw ParamError("graph carries no keywords");

    // fixed query workload: random keyword sets and qualified centers
    std::vector<Query> work;
    for (int i = 0; i < args.runs; ++i) {
        Query q;
        q.radius = args.r;
        q.k = args.k;
        q.max_size = args.n;
        q.top_m = args.m_results;
        std::set<std::string> lq;
        while (static_cast<int>(lq.size()) < std::min<int>(args.lq_size, domain.size()))
            lq.insert(domain[rng.next_index(domain.size())]);
        q.keywords.assign(lq.begin(), lq.end());

        std::vector<std::int32_t> ids;
        for (auto& kw : q.keywords)
            if (g.keyword_id(kw) >= 0) ids.push_back(g.keyword_id(kw));
        std::sort(ids.begin(), ids.end());
        VertexId vq;
        do {
            vq = static_cast<VertexId>(rng.next_index(g.vertex_count()));
        } while (!g.qualified(vq, ids));
        q.center = vq;
        work.push_back(q);
    }

    json report;
    report["config"] = {{"runs", args.runs},       {"seed", args.seed},
                        {"r", args.r},             {"k", args.k},
                        {"n", args.n},             {"m", args.m_results},
                        {"lq_size", args.lq_size}, {"variant", args.variant},
                        {"vertices", g.vertex_count()}};

    const bool relaxed = args.variant == "r2ics";

    auto run_tier = [&](const PruningOptions& opts) {
        QueryStats total;
        std::vector<double> times;
        std::uint64_t signature = fnv1a("tier");
        for (const auto& q : work) {
            QueryStats s;
            double ms;
            if (relaxed) {
                RelaxedResultList res;
                ms = wall_ms([&] { res = topm_r2ics(index, g, q, opts, &s); });
                for (const auto& ans : res.answers) {
                    for (VertexId v : ans.vertices) signature = fnv1a_u64(v, signature);
                    signature = fnv1a_u64(
                        static_cast<std::uint64_t>(std::llround(ans.score * 1e9)), signature);
                }
            } else {
                ResultList res;
                ms = wall_ms([&] { res = topm_rics(index, g, q, opts, &s); });
                signature = fnv1a_u64(answers_signature(res), signature);
            }
            times.push_back(ms);
            total.candidates += s.candidates;
            total.refined += s.refined;
            total.pruned_keyword += s.pruned_keyword;
            total.pruned_support += s.pruned_support;
            total.pruned_influence += s.pruned_influence;
            total.pruned_index_keyword += s.pruned_index_keyword;
            total.pruned_index_support += s.pruned_index_support;
        }
        std::sort(times.begin(), times.end());
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= times.size();
        double median = times[times.size() / 2];
        json j = stats_json(total);
        j["pruned_total"] = total.pruned_total();
        j["signature"] = signature;
        j["timing"] = {{"mean_ms", mean}, {"median_ms", median}};
        return std::make_tuple(j, mean, total, signature);
    };

    auto [main_stats, indexed_mean, totals, signature] = run_tier(PruningOptions{});
    report["indexed"] = main_stats;

    // sampled baseline estimate: average per-center canonicalize+score time over
    // a vertex sample, extrapolated to the full vertex set
    {
        std::size_t samples = std::max<std::size_t>(
            10, static_cast<std::size_t>(args.sample_frac * g.vertex_count()));
        samples = std::min(samples, g.vertex_count());
        const Query& q0 = work.front();
        QueryContext ctx = prepare_query(g, index.aux, q0, relaxed);
        double total_ms = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            VertexId v = static_cast<VertexId>(rng.next_index(g.vertex_count()));
            total_ms += wall_ms([&] {
                if (relaxed) {
                    if (ctx.is_qualified[v]) vertex_to_community_influence(g, v, ctx.target);
                } else {
                    auto cand = candidate_community(ctx, v);
                    if (cand) calculate_influence(g, cand->vertices, ctx.target);
                }
            });
        }
        double estimate_ms = total_ms / samples * g.vertex_count();
        report["baseline_estimate"] = {{"samples", samples},
                                       {"mean_per_vertex_ms", total_ms / samples},
                                       {"estimated_total_ms", estimate_ms},
                                       {"speedup_vs_indexed", estimate_ms / indexed_mean}};
    }

    if (args.ablation && !relaxed) {
        const PruningOptions tiers[3] = {{true, false, false},
                                         {true, true, false},
                                         {true, true, true}};
        const char* names[3] = {"keyword", "keyword+support", "keyword+support+influence"};
        json ab = json::array();
        std::uint64_t sig0 = 0;
        long long prev_refined = -1;
        bool identical = true, monotone = true;
        for (int t = 0; t < 3; ++t) {
            auto [j, mean, tot, sig] = run_tier(tiers[t]);
            j["tier"] = names[t];
            ab.push_back(j);
            if (t == 0)
                sig0 = sig;
            else if (sig != sig0)
                identical = false;
            if (prev_refined >= 0 && tot.refined > prev_refined) monotone = false;
            prev_refined = tot.refined;
        }
        report["ablation"] = {{"tiers", ab},
                              {"results_identical", identical},
                              {"refined_non_increasing", monotone}};
    }

    std::cout << report.dump() << "\n";

    // human-readable summary on stderr
    std::cerr << "runs=" << args.runs << " variant=" << args.variant
              << " indexed mean=" << indexed_mean << " ms"
              << " refined=" << totals.refined << " candidates=" << totals.candidates
              << " pruned=" << totals.pruned_total() << "\n";
    if (report.contains("baseline_estimate"))
        std::cerr << "baseline estimate=" << report["baseline_estimate"]["estimated_total_ms"]
                  << " ms, speedup=" << report["baseline_estimate"]["speedup_vs_indexed"]
                  << "x\n";
    if (report.contains("ablation")) {
        std::cerr << "ablation tiers (pruned / refined):\n";
        for (const auto& tier : report["ablation"]["tiers"])
            std::cerr << "  " << tier["tier"].get<std::string>() << ": "
                      << tier["pruned_total"] << " / " << tier["refined"] << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Top-M reverse influential community search"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cgen = app.add_subcommand("generate", "generate a synthetic small-world graph");
    cgen->add_option("--n", gen.params.n, "vertex count")->capture_default_str();
    cgen->add_option("--m", gen.params.m, "ring neighbors per side")->capture_default_str();
    cgen->add_option("--mu", gen.params.mu, "shortcut probability")->capture_default_str();
    cgen->add_option("--dist", gen.dist, "keyword distribution: uniform|gaussian|zipf")
        ->capture_default_str();
    cgen->add_option("--sigma", gen.params.sigma, "keyword domain size")->capture_default_str();
    cgen->add_option("--kw-per-vertex", gen.params.keywords_per_vertex, "keywords per vertex")
        ->capture_default_str();
    cgen->add_option("--prob-lo", gen.params.prob_lo, "probability range low")
        ->capture_default_str();
    cgen->add_option("--prob-hi", gen.params.prob_hi, "probability range high")
        ->capture_default_str();
    cgen->add_option("--seed", gen.params.seed, "random seed")->capture_default_str();
    cgen->add_option("--out-prefix", gen.out_prefix, "output file prefix")
        ->capture_default_str();

    BuildArgs build;
    auto* cbuild = app.add_subcommand("build-index", "pre-compute and build the tree index");
    cbuild->add_option("--graph", build.graph_path, "edge file")->required();
    cbuild->add_option("--keywords", build.keyword_path, "keyword file")->required();
    cbuild->add_option("--rmax", build.params.r_max, "maximum supported radius")
        ->capture_default_str();
    cbuild->add_option("--b", build.params.bits_width, "keyword bit vector width")
        ->capture_default_str();
    cbuild->add_option("--d", build.params.pivot_count, "number of pivots")
        ->capture_default_str();
    cbuild->add_option("--m-partitions", build.params.partitions,
                       "partition count (0 = one per 256 vertices)")
        ->capture_default_str();
    cbuild->add_option("--iter-max", build.params.iter_max, "partitioning iterations")
        ->capture_default_str();
    cbuild->add_option("--fanout", build.params.fanout, "tree fanout")->capture_default_str();
    std::uint64_t build_seed = 1;
    cbuild->add_option("--seed", build_seed, "random seed")->capture_default_str();
    cbuild->add_option("--out", build.out_path, "index output path")->capture_default_str();

    QueryArgs query;
    auto* cquery = app.add_subcommand("query", "run a community search query");
    cquery->add_option("--index", query.index_path, "index file")->required();
    cquery->add_option("--graph", query.graph_path, "edge file")->required();
    cquery->add_option("--keywords", query.keyword_path, "keyword file")->required();
    cquery->add_option("--vq", query.query.center, "query center vertex")->required();
    cquery->add_option("--lq", query.lq, "query keywords, comma separated")->required();
    cquery->add_option("--r", query.query.radius, "community radius")->capture_default_str();
    cquery->add_option("--k", query.query.k, "truss parameter")->capture_default_str();
    cquery->add_option("--n", query.query.max_size, "maximum community size")
        ->capture_default_str();
    cquery->add_option("--m-results", query.query.top_m, "result count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cquery->add_option("--variant", query.variant, "rics|r2ics")->capture_default_str();
    cquery->add_option("--engine", query.engine, "indexed|baseline|optimal")
        ->capture_default_str();
    cquery->add_flag("--json", query.json_output, "emit JSON (always on)");

    BenchArgs bench;
    auto* cbench = app.add_subcommand("bench", "benchmark queries and pruning");
    cbench->add_option("--index", bench.index_path, "index file")->required();
    cbench->add_option("--graph", bench.graph_path, "edge file")->required();
    cbench->add_option("--keywords", bench.keyword_path, "keyword file")->required();
    cbench->add_option("--runs", bench.runs, "number of queries")->capture_default_str();
    cbench->add_option("--seed", bench.seed, "random seed")->capture_default_str();
    cbench->add_option("--r", bench.r, "community radius")->capture_default_str();
    cbench->add_option("--k", bench.k, "truss parameter")->capture_default_str();
    cbench->add_option("--n", bench.n, "maximum community size")->capture_default_str();
    cbench->add_option("--m-results", bench.m_results, "result count")->capture_default_str();
    cbench->add_option("--lq-size", bench.lq_size, "query keyword set size")
        ->capture_default_str();
    cbench->add_option("--sample-frac", bench.sample_frac, "baseline sampling fraction")
        ->capture_default_str();
    cbench->add_option("--variant", bench.variant, "rics|r2ics")->capture_default_str();
    cbench->add_flag("--ablation", bench.ablation, "run the pruning ablation tiers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cgen->parsed()) return cmd_generate(gen);
        if (cbuild->parsed()) {
            build.params.pivot_seed = build_seed;
            build.params.partition_seed = build_seed + 0x9e3779b9;
            return cmd_build_index(build);
        }
        if (cquery->parsed()) return cmd_query(query);
        if (cbench->parsed()) return cmd_bench(bench);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const StaleIndexError& e) {
        std::cout << json{{"error", {{"message", e.what()}, {"code", kExitStale}}}}.dump()
                  << "\n";
        return kExitStale;
    } catch (const QueryError& e) {
        std::cout << json{{"error", {{"message", e.what()}, {"code", kExitQuery}}}}.dump()
                  << "\n";
        return kExitQuery;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConnectivityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
