#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citegraph/graph.hpp"

namespace citegraph {

/// Weighted undirected projection of a digraph: w_uv counts the directed
/// edges between u and v (1 or 2), so the total weight equals |E|.
struct UndirectedProjection {
    struct Neighbor {
        NodeId node;
        double weight;
    };
    size_t n = 0;
    std::vector<std::vector<Neighbor>> adj;  // symmetric, no self entries
    std::vector<double> self_loop;           // used by the aggregated Louvain levels
    double total_weight = 0.0;               // m: sum over unordered pairs + self loops

    double degree(NodeId u) const;  // weighted degree, self loops counted twice
};

UndirectedProjection undirected_projection(const CitationGraph& g);

/// Node -> community assignment with dense ids 0..K-1 ordered by decreasing
/// size (ties by smallest member index).
struct Partition {
    std::vector<uint32_t> assignment;  // by node index
    std::vector<size_t> sizes;         // by community id
    std::vector<double> shares;        // sizes / |V| * 100

    size_t community_count() const { return sizes.size(); }
};

/// Renumbers an arbitrary labeling into the canonical size-ordered form.
Partition make_partition(const std::vector<uint32_t>& labels);

Partition singleton_partition(size_t n);
Partition all_in_one_partition(size_t n);

struct LouvainResult {
    Partition partition;
    std::vector<double> phase_q;  // modularity after each local-move phase
    int levels = 0;
};

/// Two-phase Louvain on the weighted projection: seeded-shuffle visit order,
/// local moves to the first community achieving maximal positive gain, then
/// aggregation, repeated until no move improves. Deterministic given seed.
/// Graphs without edges fall back to the singleton partition.
LouvainResult louvain(const UndirectedProjection& p, uint64_t seed, double resolution = 1.0);

/// Q = (1/2m) * sum_uv [w_uv - d_u d_v / 2m] delta(c_u, c_v). Throws
/// AnalysisError when the projection has no weight.
double modularity_undirected(const UndirectedProjection& p, const Partition& part);

/// Q_d = (1/m) * sum_uv [A_uv - k^out_u k^in_v / m] delta(c_u, c_v)
/// (Leicht-Newman directed form). Throws AnalysisError on an empty edge set.
double modularity_directed(const CitationGraph& g, const Partition& part);

struct ZipfFit {
    double exponent = 0.0;
    double r_squared = 1.0;
    size_t n_fitted = 0;
};

/// OLS of log(size) on log(rank) over sizes >= cutoff, largest first;
/// exponent is the negated slope. Fewer than two qualifying sizes raise
/// AnalysisError("insufficient communities above cutoff").
ZipfFit zipf_exponent(const std::vector<double>& sizes, double cutoff);

struct CommunityEntry {
    uint32_t community = 0;
    std::string label;  // placeholder; a human names the field
    size_t size = 0;
    double share_percent = 0.0;
    std::vector<NodeId> representatives;  // top-m by total degree, ties by id
};

struct CommunityReport {
    std::vector<CommunityEntry> entries;
};

CommunityReport representatives(const CitationGraph& g, const Partition& part, int m);

/// Normalized mutual information 2*I/(H_a+H_b) between two assignments over
/// the same node set; 1.0 when both are single-community.
double nmi(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);

// --- exports ---

void write_partition_csv(const std::string& path, const CitationGraph& g, const Partition& part);
std::string community_report_json(const CitationGraph& g, const CommunityReport& report);
std::string community_report_markdown(const CitationGraph& g, const CommunityReport& report);

}  // namespace citegraph
