// Independent reference implementations used as test oracles. Everything here
// deliberately recomputes from first principles (dense matrices, brute-force
// enumeration, re-walks of the raw graph) and shares no code path with the
// library implementations it checks.
#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "citegraph/community.hpp"
#include "citegraph/graph.hpp"
#include "citegraph/random.hpp"

namespace oracles {

using citegraph::CitationGraph;
using citegraph::NodeId;
using citegraph::Rng;

inline std::string padded_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "v%04d", i);
    return buf;
}

// Random simple digraph whose node index equals its sorted-id order.
inline CitationGraph random_digraph(int n, double p, Rng& rng) {
    CitationGraph g;
    for (int i = 0; i < n; ++i) g.add_node(padded_id(i));
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (u != v && rng.bernoulli(p)) {
                g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
            }
        }
    }
    g.finalize();
    return g;
}

inline CitationGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    CitationGraph g;
    for (int i = 0; i < n; ++i) g.add_node(padded_id(i));
    for (auto [u, v] : edges) g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    g.finalize();
    return g;
}

// k-core by peel-until-fixed-point: each pass recomputes degrees from scratch
// over survivors and removes every node below k simultaneously.
inline std::set<std::string> peel_core_reference(const CitationGraph& g, int k) {
    std::set<int> alive;
    for (int i = 0; i < static_cast<int>(g.node_count()); ++i) alive.insert(i);
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<int, int> degree;
        for (int u : alive) {
            int d = 0;
            for (NodeId v : g.out_neighbors(u)) d += alive.count(v) ? 1 : 0;
            for (NodeId v : g.in_neighbors(u)) d += alive.count(v) ? 1 : 0;
            degree[u] = d;
        }
        for (auto it = alive.begin(); it != alive.end();) {
            if (degree[*it] < k) {
                it = alive.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    std::set<std::string> ids;
    for (int u : alive) ids.insert(g.id_of(u));
    return ids;
}

// One-at-a-time peeling in an arbitrary order; used to confirm order
// independence of the core.
inline std::set<std::string> peel_core_one_by_one(const CitationGraph& g, int k,
                                                  const std::vector<int>& order) {
    std::set<int> alive;
    for (int i = 0; i < static_cast<int>(g.node_count()); ++i) alive.insert(i);
    auto degree_of = [&](int u) {
        int d = 0;
        for (NodeId v : g.out_neighbors(u)) d += alive.count(v) ? 1 : 0;
        for (NodeId v : g.in_neighbors(u)) d += alive.count(v) ? 1 : 0;
        return d;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u : order) {
            if (alive.count(u) && degree_of(u) < k) {
                alive.erase(u);
                changed = true;
            }
        }
    }
    std::set<std::string> ids;
    for (int u : alive) ids.insert(g.id_of(u));
    return ids;
}

// Dense symmetric weight matrix of the undirected projection: A + A^T with
// the diagonal zeroed.
inline std::vector<std::vector<double>> dense_projection(const CitationGraph& g) {
    const size_t n = g.node_count();
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            w[u][v] += 1.0;
            w[v][u] += 1.0;
        }
    }
    return w;
}

// Q = (1/2m) sum_uv [w_uv - d_u d_v / 2m] delta(c_u, c_v), evaluated as the
// literal double sum on the dense matrix.
inline double dense_modularity_undirected(const std::vector<std::vector<double>>& w,
                                          const std::vector<uint32_t>& labels) {
    const size_t n = w.size();
    std::vector<double> degree(n, 0.0);
    double m2 = 0.0;
    for (size_t u = 0; u < n; ++u) {
        for (size_t v = 0; v < n; ++v) degree[u] += w[u][v];
        m2 += degree[u];
    }
    double q = 0.0;
    for (size_t u = 0; u < n; ++u) {
        for (size_t v = 0; v < n; ++v) {
            if (labels[u] != labels[v]) continue;
            q += w[u][v] - degree[u] * degree[v] / m2;
        }
    }
    return q / m2;
}

// Q_d = (1/m) sum_uv [A_uv - kout_u kin_v / m] delta(c_u, c_v).
inline double dense_modularity_directed(const CitationGraph& g,
                                        const std::vector<uint32_t>& labels) {
    const size_t n = g.node_count();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.out_neighbors(u)) a[u][v] = 1.0;
    }
    std::vector<double> kout(n, 0.0), kin(n, 0.0);
    double m = 0.0;
    for (size_t u = 0; u < n; ++u) {
        for (size_t v = 0; v < n; ++v) {
            kout[u] += a[u][v];
            kin[u] += a[v][u];
            m += a[u][v];
        }
    }
    double q = 0.0;
    for (size_t u = 0; u < n; ++u) {
        for (size_t v = 0; v < n; ++v) {
            if (labels[u] != labels[v]) continue;
            q += a[u][v] - kout[u] * kin[v] / m;
        }
    }
    return q / m;
}

// Enumerates every set partition of {0..n-1} via restricted growth strings.
inline void enumerate_partitions(int n, const std::function<void(const std::vector<uint32_t>&)>& fn) {
    std::vector<uint32_t> rgs(n, 0);
    std::vector<uint32_t> max_prefix(n, 0);
    int i = n - 1;
    fn(rgs);
    if (n <= 1) return;
    for (;;) {
        // advance to next restricted growth string
        i = n - 1;
        while (i > 0 && rgs[i] == max_prefix[i - 1] + 1) --i;
        if (i == 0) return;
        ++rgs[i];
        max_prefix[i] = std::max(max_prefix[i - 1], rgs[i]);
        for (int j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            max_prefix[j] = max_prefix[j - 1];
        }
        fn(rgs);
    }
}

// Best undirected modularity over every partition (Bell-number search).
inline double optimal_modularity(const std::vector<std::vector<double>>& w) {
    double best = -1.0;
    enumerate_partitions(static_cast<int>(w.size()), [&](const std::vector<uint32_t>& labels) {
        best = std::max(best, dense_modularity_undirected(w, labels));
    });
    return best;
}

// Average-linkage agglomeration that recomputes every cluster distance as
// the mean over leaf pairs at each step (no Lance-Williams shortcut). Merge
// tie-break: smallest min leaf, then the other side's min leaf.
struct ReferenceMerge {
    std::set<int> left, right;
    double height;
};

inline std::vector<ReferenceMerge> average_linkage_reference(
    const std::vector<std::vector<double>>& d0) {
    std::vector<std::set<int>> clusters;
    for (int i = 0; i < static_cast<int>(d0.size()); ++i) clusters.push_back({i});
    std::vector<ReferenceMerge> merges;
    while (clusters.size() > 1) {
        double best = 1e300;
        size_t bi = 0, bj = 1;
        int blo = 0, bhi = 0;
        for (size_t i = 0; i < clusters.size(); ++i) {
            for (size_t j = i + 1; j < clusters.size(); ++j) {
                double sum = 0.0;
                for (int a : clusters[i])
                    for (int b : clusters[j]) sum += d0[a][b];
                double d = sum / (clusters[i].size() * clusters[j].size());
                int li = *clusters[i].begin(), lj = *clusters[j].begin();
                int lo = std::min(li, lj), hi = std::max(li, lj);
                if (d < best || (d == best && (lo < blo || (lo == blo && hi < bhi)))) {
                    best = d;
                    bi = i;
                    bj = j;
                    blo = lo;
                    bhi = hi;
                }
            }
        }
        ReferenceMerge m;
        m.left = clusters[bi];
        m.right = clusters[bj];
        m.height = best;
        merges.push_back(m);
        clusters[bi].insert(clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + bj);
    }
    return merges;
}

// Reverse-citation BFS from the seed set: what a correct snowball of the
// given depth must retrieve from this graph.
struct ReverseBfs {
    std::map<std::string, int> depth;                       // expected records
    std::set<std::pair<std::string, std::string>> edges;    // citing -> cited
};

inline ReverseBfs reverse_bfs(const CitationGraph& g, const std::vector<int>& seeds,
                              int max_depth) {
    ReverseBfs out;
    std::map<int, int> dist;
    std::vector<int> frontier;
    for (int s : seeds) {
        if (!dist.count(s)) {
            dist[s] = 0;
            frontier.push_back(s);
        }
    }
    for (int d = 1; d <= max_depth && !frontier.empty(); ++d) {
        std::vector<int> next;
        for (int t : frontier) {
            for (NodeId u : g.in_neighbors(t)) {
                if (!dist.count(u)) {
                    dist[u] = d;
                    next.push_back(u);
                }
            }
        }
        frontier = std::move(next);
    }
    for (auto [node, d] : dist) out.depth[g.id_of(node)] = d;
    for (auto [node, d] : dist) {
        if (d > max_depth - 1) continue;  // only queried nodes reveal their citers
        for (NodeId u : g.in_neighbors(node)) {
            out.edges.emplace(g.id_of(u), g.id_of(node));
        }
    }
    return out;
}

}  // namespace oracles
