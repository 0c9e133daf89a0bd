#include "citegraph/flows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "citegraph/errors.hpp"
#include "citegraph/text.hpp"

namespace citegraph {

FlowMatrix flow_matrix(const CitationGraph& g, const Partition& part) {
    if (part.assignment.size() != g.node_count()) {
        throw AnalysisError("flow_matrix: partition does not cover all nodes");
    }
    if (g.edge_count() == 0) throw AnalysisError("flow_matrix: graph has no edges");

    FlowMatrix fm;
    fm.k = part.community_count();
    fm.counts.assign(fm.k, std::vector<int64_t>(fm.k, 0));
    fm.phi.assign(fm.k, std::vector<double>(fm.k, 0.0));
    fm.zero_out_row.assign(fm.k, false);

    for (NodeId u = 0; u < g.node_count(); ++u) {
        uint32_t cu = part.assignment[u];
        for (NodeId v : g.out_neighbors(u)) {
            ++fm.counts[cu][part.assignment[v]];
            ++fm.total_citations;
        }
    }
    for (size_t a = 0; a < fm.k; ++a) {
        int64_t row_total = 0;
        for (int64_t c : fm.counts[a]) row_total += c;
        if (row_total == 0) {
            fm.zero_out_row[a] = true;
            continue;
        }
        for (size_t b = 0; b < fm.k; ++b) {
            fm.phi[a][b] = static_cast<double>(fm.counts[a][b]) / static_cast<double>(row_total);
        }
    }
    return fm;
}

LogHeatmap log_renormalize(const FlowMatrix& flows) {
    LogHeatmap heat;
    heat.min_positive = std::numeric_limits<double>::infinity();
    heat.max_positive = 0.0;
    for (const auto& row : flows.phi) {
        for (double v : row) {
            if (v > 0.0) {
                heat.min_positive = std::min(heat.min_positive, v);
                heat.max_positive = std::max(heat.max_positive, v);
            }
        }
    }
    if (heat.max_positive == 0.0) throw AnalysisError("log_renormalize: all flows are zero");

    const double log_min = std::log(heat.min_positive);
    const double log_max = std::log(heat.max_positive);
    const double span = log_max - log_min;
    heat.values.resize(flows.k);
    for (size_t a = 0; a < flows.k; ++a) {
        heat.values[a].resize(flows.k);
        for (size_t b = 0; b < flows.k; ++b) {
            double v = flows.phi[a][b];
            if (v <= 0.0) continue;  // absent, not 0.0
            heat.values[a][b] = span == 0.0 ? 1.0 : (std::log(v) - log_min) / span;
        }
    }
    return heat;
}

Dendrogram agglomerative_cluster(const std::vector<std::vector<double>>& distance,
                                 Linkage linkage) {
    const size_t k = distance.size();
    Dendrogram dend;
    dend.n_leaves = k;
    if (k <= 1) return dend;

    // Active clusters are node ids into the implicit tree array:
    // 0..k-1 leaves, k+i the i-th merge.
    struct Cluster {
        int node;
        int size;
        int min_leaf;
    };
    std::vector<Cluster> active;
    for (size_t i = 0; i < k; ++i) {
        active.push_back({static_cast<int>(i), 1, static_cast<int>(i)});
    }
    // dist[i][j] between active clusters (index into `active`).
    std::vector<std::vector<double>> dist = distance;

    while (active.size() > 1) {
        size_t best_i = 0, best_j = 1;
        double best_d = std::numeric_limits<double>::infinity();
        int best_lo = 0, best_hi = 0;
        for (size_t i = 0; i < active.size(); ++i) {
            for (size_t j = i + 1; j < active.size(); ++j) {
                double d = dist[i][j];
                int lo = std::min(active[i].min_leaf, active[j].min_leaf);
                int hi = std::max(active[i].min_leaf, active[j].min_leaf);
                bool better = d < best_d ||
                              (d == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)));
                if (better) {
                    best_d = d;
                    best_i = i;
                    best_j = j;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }

        DendrogramNode merge;
        merge.left = active[best_i].node;
        merge.right = active[best_j].node;
        merge.height = best_d;
        merge.size = active[best_i].size + active[best_j].size;
        merge.min_leaf = std::min(active[best_i].min_leaf, active[best_j].min_leaf);
        int new_node = static_cast<int>(k + dend.merges.size());
        dend.merges.push_back(merge);

        // Lance-Williams update of distances to the merged cluster, stored in
        // slot best_i; slot best_j is removed.
        const double si = active[best_i].size, sj = active[best_j].size;
        for (size_t t = 0; t < active.size(); ++t) {
            if (t == best_i || t == best_j) continue;
            double di = dist[best_i][t], dj = dist[best_j][t];
            double d;
            switch (linkage) {
                case Linkage::Single: d = std::min(di, dj); break;
                case Linkage::Complete: d = std::max(di, dj); break;
                default: d = (si * di + sj * dj) / (si + sj); break;
            }
            dist[best_i][t] = dist[t][best_i] = d;
        }
        active[best_i] = {new_node, merge.size, merge.min_leaf};
        active.erase(active.begin() + best_j);
        dist.erase(dist.begin() + best_j);
        for (auto& row : dist) row.erase(row.begin() + best_j);
    }
    return dend;
}

Dendrogram community_dendrogram(const FlowMatrix& flows, Linkage linkage) {
    const size_t k = flows.k;
    std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
    for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) {
            if (a != b) dist[a][b] = 1.0 - (flows.phi[a][b] + flows.phi[b][a]) / 2.0;
        }
    }
    return agglomerative_cluster(dist, linkage);
}

AsymmetryReport asymmetry_report(const FlowMatrix& flows) {
    AsymmetryReport report;
    for (uint32_t a = 0; a < flows.k; ++a) {
        for (uint32_t b = a + 1; b < flows.k; ++b) {
            report.entries.push_back({a, b, flows.phi[a][b], flows.phi[b][a]});
        }
        for (uint32_t b = 0; b < flows.k; ++b) {
            if (a != b && flows.phi[a][b] > 0.0 && flows.phi[b][a] == 0.0) {
                report.one_way.emplace_back(a, b);
            }
        }
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const AsymmetryEntry& x, const AsymmetryEntry& y) {
                         return std::abs(x.phi_ab - x.phi_ba) > std::abs(y.phi_ab - y.phi_ba);
                     });
    return report;
}

namespace {

void newick_node(const Dendrogram& d, int node, double parent_height,
                 const std::vector<std::string>& names, std::string& out) {
    double height = 0.0;
    if (node >= static_cast<int>(d.n_leaves)) {
        const DendrogramNode& m = d.merges[node - d.n_leaves];
        height = m.height;
        out += '(';
        newick_node(d, m.left, height, names, out);
        out += ',';
        newick_node(d, m.right, height, names, out);
        out += ')';
    } else {
        out += names[node];
    }
    out += ':';
    out += format_double(parent_height - height);
}

}  // namespace

std::string to_newick(const Dendrogram& d, const std::vector<std::string>& leaf_names) {
    if (d.n_leaves == 0) return ";\n";
    if (d.n_leaves == 1) return leaf_names[0] + ";\n";
    const DendrogramNode& root = d.merges.back();
    std::string out = "(";
    newick_node(d, root.left, root.height, leaf_names, out);
    out += ',';
    newick_node(d, root.right, root.height, leaf_names, out);
    out += ");\n";
    return out;
}

void write_flow_csv(const std::string& path, const FlowMatrix& flows, const LogHeatmap& heat,
                    const std::vector<std::string>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AnalysisError("cannot write flow file: " + path);
    out << "row_label,col_label,flow,renormalized\n";
    for (size_t a = 0; a < flows.k; ++a) {
        for (size_t b = 0; b < flows.k; ++b) {
            out << csv_escape(labels[a]) << ',' << csv_escape(labels[b]) << ','
                << format_double(flows.phi[a][b]) << ',';
            if (heat.values[a][b]) out << format_double(*heat.values[a][b]);
            out << '\n';
        }
    }
}

std::string flow_report_json(const FlowMatrix& flows, const LogHeatmap& heat,
                             const AsymmetryReport& asym) {
    nlohmann::ordered_json j;
    j["k"] = flows.k;
    j["total_citations"] = flows.total_citations;
    j["max_flow"] = heat.max_positive;
    j["min_positive_flow"] = heat.min_positive;
    j["phi"] = flows.phi;
    j["counts"] = flows.counts;
    nlohmann::ordered_json renorm = nlohmann::ordered_json::array();
    for (const auto& row : heat.values) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& v : row) {
            if (v) r.push_back(*v);
            else r.push_back(nullptr);
        }
        renorm.push_back(std::move(r));
    }
    j["renormalized"] = std::move(renorm);
    nlohmann::ordered_json zero_rows = nlohmann::ordered_json::array();
    for (size_t a = 0; a < flows.k; ++a) {
        if (flows.zero_out_row[a]) zero_rows.push_back(a);
    }
    j["zero_out_rows"] = std::move(zero_rows);
    nlohmann::ordered_json one_way = nlohmann::ordered_json::array();
    for (const auto& [from, to] : asym.one_way) {
        one_way.push_back({{"from", from}, {"to", to}});
    }
    j["one_way"] = std::move(one_way);
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : asym.entries) {
        entries.push_back(
            {{"a", e.a}, {"b", e.b}, {"phi_ab", e.phi_ab}, {"phi_ba", e.phi_ba}});
    }
    j["asymmetry"] = std::move(entries);
    return j.dump(2) + "\n";
}

}  // namespace citegraph
