#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "citegraph/corpus.hpp"

namespace citegraph {

using NodeId = uint32_t;

struct NodeAttrs {
    std::string title;
    std::optional<int> year;
    int depth = 0;
    std::vector<std::string> seed_queries;  // transitively propagated provenance
};

/// Simple directed graph over canonical paper ids; edge u -> v means u cites v.
/// Nodes are indexed in the order they were added (builders sort ids first, so
/// a graph built from the same record set is always laid out identically).
/// Immutable once finalized; all reductions return new graphs.
class CitationGraph {
public:
    NodeId add_node(std::string id, NodeAttrs attrs = {});
    /// Ignores self-loops and duplicate edges. Endpoints must exist.
    void add_edge(NodeId citing, NodeId cited);
    /// Sorts adjacency lists; must be called once after construction.
    void finalize();

    size_t node_count() const { return ids_.size(); }
    size_t edge_count() const { return edge_count_; }

    const std::string& id_of(NodeId n) const { return ids_[n]; }
    const NodeAttrs& attrs_of(NodeId n) const { return attrs_[n]; }
    std::optional<NodeId> find(const std::string& id) const;

    const std::vector<NodeId>& out_neighbors(NodeId n) const { return out_[n]; }
    const std::vector<NodeId>& in_neighbors(NodeId n) const { return in_[n]; }
    bool has_edge(NodeId citing, NodeId cited) const;

    int in_degree(NodeId n) const { return static_cast<int>(in_[n].size()); }
    int out_degree(NodeId n) const { return static_cast<int>(out_[n].size()); }
    int total_degree(NodeId n) const { return in_degree(n) + out_degree(n); }

    /// Induced subgraph on `keep` (indices into this graph); attributes are
    /// preserved and node order follows the original layout.
    CitationGraph induced_subgraph(const std::vector<NodeId>& keep) const;

private:
    std::vector<std::string> ids_;
    std::vector<NodeAttrs> attrs_;
    std::vector<std::vector<NodeId>> out_, in_;
    std::unordered_map<std::string, NodeId> index_;
    size_t edge_count_ = 0;
    bool finalized_ = false;
};

/// Sizes of weakly connected components, largest first (ties by smallest
/// member id); `component[n]` gives each node's component rank in that order.
struct ComponentInfo {
    std::vector<size_t> sizes;
    std::vector<uint32_t> component;
};
ComponentInfo weakly_connected_components(const CitationGraph& g);

/// Induced subgraph on the largest weakly connected component. Ties are
/// broken by the smallest lexicographic member id. Empty input yields an
/// empty graph plus a warning in *warning when given.
CitationGraph largest_connected_component(const CitationGraph& g, std::string* warning = nullptr);

/// Maximal induced subgraph in which every node has total degree >= k
/// (standard k-core by iterated peeling; the result is order-independent).
CitationGraph iterated_core(const CitationGraph& g, int k);

/// Induced subgraph on nodes whose propagated provenance includes
/// query_label. Unknown labels raise AnalysisError naming the known ones.
CitationGraph provenance_subnetwork(const CitationGraph& g, const std::string& query_label);

struct DegreeStats {
    std::vector<int> in, out, total;  // by node index
    int max_in = 0, max_out = 0, max_total = 0;
    double mean_total = 0.0;
};
DegreeStats degree_stats(const CitationGraph& g);

// --- CSV import/export (see README for the column contract) ---

void write_edge_csv(const std::string& path, const CitationGraph& g);
void write_node_csv(const std::string& path, const CitationGraph& g);
/// Reads an edge-list CSV plus an optional node-attribute CSV back into a
/// graph. Without the node file, nodes are inferred from edge endpoints.
CitationGraph read_graph_csv(const std::string& edge_path, const std::string& node_path = "");

/// Builds a graph from records plus explicit edges (by id). Node order is
/// sorted by id; unknown endpoints raise AnalysisError.
CitationGraph build_graph(const std::vector<PaperRecord>& records,
                          const std::vector<std::pair<std::string, std::string>>& edges);

}  // namespace citegraph
