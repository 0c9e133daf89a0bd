#include "citegraph/community.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "citegraph/errors.hpp"
#include "citegraph/random.hpp"
#include "citegraph/text.hpp"

namespace citegraph {

double UndirectedProjection::degree(NodeId u) const {
    double d = 2.0 * self_loop[u];
    for (const auto& nb : adj[u]) d += nb.weight;
    return d;
}

UndirectedProjection undirected_projection(const CitationGraph& g) {
    UndirectedProjection p;
    p.n = g.node_count();
    p.adj.resize(p.n);
    p.self_loop.assign(p.n, 0.0);
    for (NodeId u = 0; u < p.n; ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            if (v <= u) continue;
            double w = 1.0 + (g.has_edge(v, u) ? 1.0 : 0.0);
            p.adj[u].push_back({v, w});
            p.adj[v].push_back({u, w});
            p.total_weight += w;
        }
        for (NodeId v : g.in_neighbors(u)) {
            if (v <= u || g.has_edge(u, v)) continue;  // pair already handled above
            p.adj[u].push_back({v, 1.0});
            p.adj[v].push_back({u, 1.0});
            p.total_weight += 1.0;
        }
    }
    for (auto& nbs : p.adj) {
        std::sort(nbs.begin(), nbs.end(),
                  [](const auto& a, const auto& b) { return a.node < b.node; });
    }
    return p;
}

Partition make_partition(const std::vector<uint32_t>& labels) {
    const size_t n = labels.size();
    // Collect distinct labels with size and smallest member index.
    std::map<uint32_t, std::pair<size_t, size_t>> info;  // label -> (size, first member)
    for (size_t i = 0; i < n; ++i) {
        auto [it, inserted] = info.try_emplace(labels[i], std::make_pair(size_t{0}, i));
        ++it->second.first;
    }
    std::vector<uint32_t> order;
    order.reserve(info.size());
    for (const auto& [label, meta] : info) order.push_back(label);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        const auto& ia = info[a];
        const auto& ib = info[b];
        if (ia.first != ib.first) return ia.first > ib.first;
        return ia.second < ib.second;
    });
    std::map<uint32_t, uint32_t> renumber;
    for (uint32_t k = 0; k < order.size(); ++k) renumber[order[k]] = k;

    Partition part;
    part.assignment.resize(n);
    part.sizes.assign(order.size(), 0);
    for (size_t i = 0; i < n; ++i) {
        part.assignment[i] = renumber[labels[i]];
        ++part.sizes[part.assignment[i]];
    }
    part.shares.resize(order.size());
    for (size_t k = 0; k < order.size(); ++k) {
        part.shares[k] = n == 0 ? 0.0 : 100.0 * static_cast<double>(part.sizes[k]) / n;
    }
    return part;
}

Partition singleton_partition(size_t n) {
    std::vector<uint32_t> labels(n);
    std::iota(labels.begin(), labels.end(), 0);
    return make_partition(labels);
}

Partition all_in_one_partition(size_t n) {
    return make_partition(std::vector<uint32_t>(n, 0));
}

namespace {

// Modularity of an assignment on a (possibly aggregated) weighted graph,
// with resolution folded into the null term.
double level_modularity(const UndirectedProjection& p, const std::vector<uint32_t>& comm,
                        double resolution) {
    double m2 = 2.0 * p.total_weight;
    uint32_t k = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
    std::vector<double> intra(k, 0.0), tot(k, 0.0);
    for (NodeId u = 0; u < p.n; ++u) {
        tot[comm[u]] += p.degree(u);
        intra[comm[u]] += 2.0 * p.self_loop[u];
        for (const auto& nb : p.adj[u]) {
            if (comm[nb.node] == comm[u]) intra[comm[u]] += nb.weight;
        }
    }
    double q = 0.0;
    for (uint32_t c = 0; c < k; ++c) {
        q += intra[c] / m2 - resolution * (tot[c] / m2) * (tot[c] / m2);
    }
    return q;
}

// One local-move phase over an arbitrary starting assignment; returns whether
// any node changed community.
bool local_moves(const UndirectedProjection& p, std::vector<uint32_t>& comm, double resolution,
                 Rng& rng) {
    const size_t n = p.n;
    const double m2 = 2.0 * p.total_weight;
    std::vector<double> degree(n), tot(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        degree[u] = p.degree(u);
        tot[comm[u]] += degree[u];
    }

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> weight_to(n, 0.0);  // scratch, indexed by community
    std::vector<uint32_t> touched;
    touched.reserve(64);
    bool any_move = false;
    bool moved;
    do {
        moved = false;
        for (NodeId u : order) {
            // Weight from u to each neighboring community, in adjacency order.
            touched.clear();
            for (const auto& nb : p.adj[u]) {
                uint32_t c = comm[nb.node];
                if (weight_to[c] == 0.0) touched.push_back(c);
                weight_to[c] += nb.weight;
            }
            uint32_t own = comm[u];
            tot[own] -= degree[u];
            double best_gain = weight_to[own] - resolution * degree[u] * tot[own] / m2;
            uint32_t best = own;
            for (uint32_t c : touched) {
                if (c == own) continue;
                double gain = weight_to[c] - resolution * degree[u] * tot[c] / m2;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            comm[u] = best;
            tot[best] += degree[u];
            if (best != own) {
                moved = true;
                any_move = true;
            }
            for (uint32_t c : touched) weight_to[c] = 0.0;
        }
    } while (moved);
    return any_move;
}

// Renumbers communities by first appearance and collapses them into one
// weighted node each; intra-community weight becomes a self loop.
UndirectedProjection aggregate(const UndirectedProjection& p, std::vector<uint32_t>& comm) {
    std::vector<uint32_t> renumber(p.n, UINT32_MAX);
    uint32_t next = 0;
    for (NodeId u = 0; u < p.n; ++u) {
        if (renumber[comm[u]] == UINT32_MAX) renumber[comm[u]] = next++;
        comm[u] = renumber[comm[u]];
    }

    UndirectedProjection agg;
    agg.n = next;
    agg.adj.resize(next);
    agg.self_loop.assign(next, 0.0);
    agg.total_weight = p.total_weight;
    std::vector<std::map<uint32_t, double>> inter(next);
    for (NodeId u = 0; u < p.n; ++u) {
        agg.self_loop[comm[u]] += p.self_loop[u];
        for (const auto& nb : p.adj[u]) {
            if (nb.node < u) continue;  // each undirected edge once
            uint32_t cu = comm[u], cv = comm[nb.node];
            if (cu == cv) {
                agg.self_loop[cu] += nb.weight;
            } else {
                inter[std::min(cu, cv)][std::max(cu, cv)] += nb.weight;
            }
        }
    }
    for (uint32_t c = 0; c < next; ++c) {
        for (const auto& [d, w] : inter[c]) {
            agg.adj[c].push_back({d, w});
            agg.adj[d].push_back({c, w});
        }
    }
    for (auto& nbs : agg.adj) {
        std::sort(nbs.begin(), nbs.end(),
                  [](const auto& a, const auto& b) { return a.node < b.node; });
    }
    return agg;
}

// Full two-phase descent (local moves + aggregation until fixed point) from
// the given starting assignment. Returns the flat assignment and the
// modularity recorded after every local-move phase.
struct Descent {
    std::vector<uint32_t> labels;
    std::vector<double> phase_q;
    int levels = 0;
};

Descent two_phase_descent(const UndirectedProjection& p, std::vector<uint32_t> start,
                          double resolution, Rng& rng) {
    Descent descent;
    UndirectedProjection level = p;
    // mapping: original node -> current level node; comm: level node -> community
    std::vector<uint32_t> mapping(p.n);
    std::iota(mapping.begin(), mapping.end(), 0);
    std::vector<uint32_t> comm = std::move(start);

    for (;;) {
        bool changed = local_moves(level, comm, resolution, rng);
        descent.phase_q.push_back(level_modularity(level, comm, resolution));
        ++descent.levels;
        bool nontrivial_start = descent.levels == 1;  // comm may differ from identity
        if (!changed && !nontrivial_start) break;
        level = aggregate(level, comm);  // renumbers comm in place
        for (auto& m : mapping) m = comm[m];
        if (!changed || level.n <= 1) break;
        comm.resize(level.n);
        std::iota(comm.begin(), comm.end(), 0);
    }
    descent.labels = std::move(mapping);
    return descent;
}

}  // namespace

LouvainResult louvain(const UndirectedProjection& p, uint64_t seed, double resolution) {
    LouvainResult result;
    if (p.total_weight <= 0.0) {
        result.partition = singleton_partition(p.n);
        return result;
    }

    // Greedy two-phase descent is order dependent and can settle in poor
    // local optima on small graphs, so the search is widened: a few restarts
    // with different visit orders, then kick steps that displace a handful of
    // nodes and re-descend, keeping a candidate only when it improves
    // modularity. Everything draws from one seeded stream, so the outcome is
    // a pure function of (graph, seed, resolution). Kicks move at most three
    // nodes, which is decisive on small graphs and noise on large ones, so
    // the schedule tapers with size.
    const int restarts = p.n <= 50000 ? 6 : 3;
    const int kicks = p.n <= 2000 ? 48 : 0;

    Rng rng(seed);
    std::vector<uint32_t> singleton(p.n);
    std::iota(singleton.begin(), singleton.end(), 0);

    Descent best = two_phase_descent(p, singleton, resolution, rng);
    double best_q = level_modularity(p, best.labels, resolution);
    for (int r = 1; r < restarts; ++r) {
        Descent candidate = two_phase_descent(p, singleton, resolution, rng);
        double q = level_modularity(p, candidate.labels, resolution);
        if (q > best_q) {
            best = std::move(candidate);
            best_q = q;
        }
    }
    for (int k = 0; k < kicks; ++k) {
        std::vector<uint32_t> shaken = best.labels;
        size_t moves = 1 + rng.next_below(std::max<size_t>(1, std::min<size_t>(3, p.n / 2)));
        for (size_t m = 0; m < moves; ++m) {
            NodeId u = static_cast<NodeId>(rng.next_below(p.n));
            if (p.adj[u].empty()) continue;
            const auto& nb = p.adj[u][rng.next_below(p.adj[u].size())];
            shaken[u] = rng.bernoulli(0.5) ? shaken[nb.node] : u;
        }
        Descent candidate = two_phase_descent(p, std::move(shaken), resolution, rng);
        double q = level_modularity(p, candidate.labels, resolution);
        if (q > best_q) {
            best = std::move(candidate);
            best_q = q;
        }
    }

    result.phase_q = std::move(best.phase_q);
    result.levels = best.levels;
    result.partition = make_partition(best.labels);
    return result;
}

double modularity_undirected(const UndirectedProjection& p, const Partition& part) {
    if (p.total_weight <= 0.0) {
        throw AnalysisError("modularity_undirected: projection has no edges");
    }
    if (part.assignment.size() != p.n) {
        throw AnalysisError("modularity_undirected: partition does not cover all nodes");
    }
    return level_modularity(p, part.assignment, 1.0);
}

double modularity_directed(const CitationGraph& g, const Partition& part) {
    const double m = static_cast<double>(g.edge_count());
    if (m < 1.0) throw AnalysisError("modularity_directed: empty edge set");
    if (part.assignment.size() != g.node_count()) {
        throw AnalysisError("modularity_directed: partition does not cover all nodes");
    }
    const size_t k = part.community_count();
    std::vector<double> intra(k, 0.0), k_out(k, 0.0), k_in(k, 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        uint32_t cu = part.assignment[u];
        k_out[cu] += g.out_degree(u);
        k_in[cu] += g.in_degree(u);
        for (NodeId v : g.out_neighbors(u)) {
            if (part.assignment[v] == cu) intra[cu] += 1.0;
        }
    }
    double q = 0.0;
    for (size_t c = 0; c < k; ++c) {
        q += intra[c] / m - (k_out[c] / m) * (k_in[c] / m);
    }
    return q;
}

ZipfFit zipf_exponent(const std::vector<double>& sizes, double cutoff) {
    std::vector<double> kept;
    for (double s : sizes) {
        if (s >= cutoff && s > 0.0) kept.push_back(s);
    }
    if (kept.size() < 2) throw AnalysisError("insufficient communities above cutoff");
    std::sort(kept.begin(), kept.end(), std::greater<>());

    const size_t n = kept.size();
    std::vector<double> x(n), y(n);
    for (size_t r = 0; r < n; ++r) {
        x[r] = std::log(static_cast<double>(r + 1));
        y[r] = std::log(kept[r]);
    }
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t r = 0; r < n; ++r) {
        sxy += (x[r] - mx) * (y[r] - my);
        sxx += (x[r] - mx) * (x[r] - mx);
        syy += (y[r] - my) * (y[r] - my);
    }
    double slope = sxy / sxx;

    ZipfFit fit;
    fit.exponent = slope == 0.0 ? 0.0 : -slope;  // avoid -0.0 in reports
    fit.n_fitted = n;
    if (syy <= 0.0) {
        fit.r_squared = 1.0;  // all sizes equal: the zero-slope line is exact
    } else {
        fit.r_squared = (sxy * sxy) / (sxx * syy);
    }
    return fit;
}

CommunityReport representatives(const CitationGraph& g, const Partition& part, int m) {
    if (m < 1) throw AnalysisError("representatives: m must be >= 1");
    const size_t k = part.community_count();
    std::vector<std::vector<NodeId>> members(k);
    for (NodeId n = 0; n < g.node_count(); ++n) members[part.assignment[n]].push_back(n);

    CommunityReport report;
    report.entries.resize(k);
    for (uint32_t c = 0; c < k; ++c) {
        auto& entry = report.entries[c];
        entry.community = c;
        entry.size = part.sizes[c];
        entry.share_percent = part.shares[c];
        std::sort(members[c].begin(), members[c].end(), [&](NodeId a, NodeId b) {
            int da = g.total_degree(a), db = g.total_degree(b);
            if (da != db) return da > db;
            return g.id_of(a) < g.id_of(b);
        });
        size_t take = std::min<size_t>(m, members[c].size());
        entry.representatives.assign(members[c].begin(), members[c].begin() + take);
    }
    return report;
}

double nmi(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) throw AnalysisError("nmi: assignments cover different node sets");
    const double n = static_cast<double>(a.size());
    if (a.empty()) return 1.0;

    std::map<uint32_t, double> ca, cb;
    std::map<std::pair<uint32_t, uint32_t>, double> joint;
    for (size_t i = 0; i < a.size(); ++i) {
        ca[a[i]] += 1.0;
        cb[b[i]] += 1.0;
        joint[{a[i], b[i]}] += 1.0;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (const auto& [label, count] : ca) ha -= count / n * std::log(count / n);
    for (const auto& [label, count] : cb) hb -= count / n * std::log(count / n);
    for (const auto& [labels, count] : joint) {
        mi += count / n * std::log(n * count / (ca[labels.first] * cb[labels.second]));
    }
    if (ha + hb <= 0.0) return 1.0;  // both partitions trivial, hence identical
    return 2.0 * mi / (ha + hb);
}

void write_partition_csv(const std::string& path, const CitationGraph& g, const Partition& part) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AnalysisError("cannot write partition file: " + path);
    out << "node_id,community_id\n";
    for (NodeId n = 0; n < g.node_count(); ++n) {
        out << csv_escape(g.id_of(n)) << ',' << part.assignment[n] << '\n';
    }
}

namespace {

std::string one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace

std::string community_report_json(const CitationGraph& g, const CommunityReport& report) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& entry : report.entries) {
        nlohmann::ordered_json j;
        j["community"] = entry.community;
        j["label"] = entry.label;
        j["size"] = entry.size;
        j["share_percent"] = entry.share_percent;
        j["share_display"] = one_decimal(entry.share_percent);
        nlohmann::ordered_json reps = nlohmann::ordered_json::array();
        for (NodeId n : entry.representatives) {
            nlohmann::ordered_json rep;
            rep["id"] = g.id_of(n);
            rep["title"] = g.attrs_of(n).title;
            rep["degree"] = g.total_degree(n);
            reps.push_back(std::move(rep));
        }
        j["representatives"] = std::move(reps);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string community_report_markdown(const CitationGraph& g, const CommunityReport& report) {
    std::ostringstream out;
    out << "| Community | Size (%) | Representative paper |\n";
    out << "|---|---|---|\n";
    for (const auto& entry : report.entries) {
        std::string label = entry.label.empty()
                                ? "community " + std::to_string(entry.community)
                                : entry.label;
        std::string rep = "-";
        if (!entry.representatives.empty()) {
            NodeId n = entry.representatives.front();
            rep = g.attrs_of(n).title.empty() ? g.id_of(n) : g.attrs_of(n).title;
        }
        out << "| " << label << " | " << one_decimal(entry.share_percent) << " | " << rep
            << " |\n";
    }
    return out.str();
}

}  // namespace citegraph
