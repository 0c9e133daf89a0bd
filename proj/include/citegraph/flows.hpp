#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citegraph/community.hpp"
#include "citegraph/graph.hpp"

namespace citegraph {

/// K x K inter-community citation flows. phi[a][b] is the share of citations
/// made by community a that point into community b (diagonal included), so
/// every row with outgoing citations sums to 1. Rows without any outgoing
/// citation stay all-zero and are flagged. Community order follows the
/// partition's (decreasing size).
struct FlowMatrix {
    size_t k = 0;
    std::vector<std::vector<int64_t>> counts;
    std::vector<std::vector<double>> phi;
    std::vector<bool> zero_out_row;
    int64_t total_citations = 0;  // equals |E| of the source graph
};

FlowMatrix flow_matrix(const CitationGraph& g, const Partition& part);

/// Positive entries mapped to (log v - log v_min) / (log v_max - log v_min);
/// zero flows are absent (nullopt), not 0. A single positive level maps to 1.
struct LogHeatmap {
    std::vector<std::vector<std::optional<double>>> values;
    double min_positive = 0.0;
    double max_positive = 0.0;
};

LogHeatmap log_renormalize(const FlowMatrix& flows);

enum class Linkage { Single, Complete, Average };

/// Binary merge tree over communities. Leaves are 0..n_leaves-1; merge i
/// creates node n_leaves + i. Heights are non-decreasing toward the root.
struct DendrogramNode {
    int left = -1;
    int right = -1;
    double height = 0.0;
    int size = 1;
    int min_leaf = 0;
};

struct Dendrogram {
    size_t n_leaves = 0;
    std::vector<DendrogramNode> merges;  // n_leaves - 1 entries
};

/// Agglomerative clustering of a symmetric distance matrix. Ties are broken
/// by merging the pair with the smallest min leaf id (then the smallest
/// other-side min leaf id) first.
Dendrogram agglomerative_cluster(const std::vector<std::vector<double>>& distance,
                                 Linkage linkage);

/// Distance between communities a != b is 1 - (phi[a][b] + phi[b][a]) / 2.
Dendrogram community_dendrogram(const FlowMatrix& flows, Linkage linkage = Linkage::Average);

struct AsymmetryEntry {
    uint32_t a = 0, b = 0;
    double phi_ab = 0.0, phi_ba = 0.0;
};

struct AsymmetryReport {
    /// Unordered pairs a < b sorted by |phi_ab - phi_ba| descending.
    std::vector<AsymmetryEntry> entries;
    /// Ordered pairs (from, to) with phi[from][to] > 0 and phi[to][from] = 0.
    std::vector<std::pair<uint32_t, uint32_t>> one_way;
};

AsymmetryReport asymmetry_report(const FlowMatrix& flows);

// --- exports ---

std::string to_newick(const Dendrogram& d, const std::vector<std::string>& leaf_names);
/// CSV rows: row_label,col_label,flow,renormalized (renormalized empty for
/// absent flows).
void write_flow_csv(const std::string& path, const FlowMatrix& flows, const LogHeatmap& heat,
                    const std::vector<std::string>& labels);
std::string flow_report_json(const FlowMatrix& flows, const LogHeatmap& heat,
                             const AsymmetryReport& asym);

}  // namespace citegraph
