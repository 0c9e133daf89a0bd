#include "citegraph/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "citegraph/errors.hpp"
#include "citegraph/text.hpp"

namespace citegraph {

NodeId CitationGraph::add_node(std::string id, NodeAttrs attrs) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    NodeId n = static_cast<NodeId>(ids_.size());
    index_.emplace(id, n);
    ids_.push_back(std::move(id));
    attrs_.push_back(std::move(attrs));
    out_.emplace_back();
    in_.emplace_back();
    return n;
}

void CitationGraph::add_edge(NodeId citing, NodeId cited) {
    if (citing == cited) return;
    out_[citing].push_back(cited);
    in_[cited].push_back(citing);
}

void CitationGraph::finalize() {
    edge_count_ = 0;
    for (auto& adj : out_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        edge_count_ += adj.size();
    }
    for (auto& adj : in_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    finalized_ = true;
}

std::optional<NodeId> CitationGraph::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool CitationGraph::has_edge(NodeId citing, NodeId cited) const {
    const auto& adj = out_[citing];
    return std::binary_search(adj.begin(), adj.end(), cited);
}

CitationGraph CitationGraph::induced_subgraph(const std::vector<NodeId>& keep) const {
    std::vector<NodeId> sorted_keep = keep;
    std::sort(sorted_keep.begin(), sorted_keep.end());
    sorted_keep.erase(std::unique(sorted_keep.begin(), sorted_keep.end()), sorted_keep.end());

    std::vector<NodeId> remap(ids_.size(), UINT32_MAX);
    CitationGraph sub;
    for (NodeId old : sorted_keep) remap[old] = sub.add_node(ids_[old], attrs_[old]);
    for (NodeId old : sorted_keep) {
        for (NodeId tgt : out_[old]) {
            if (remap[tgt] != UINT32_MAX) sub.add_edge(remap[old], remap[tgt]);
        }
    }
    sub.finalize();
    return sub;
}

ComponentInfo weakly_connected_components(const CitationGraph& g) {
    const size_t n = g.node_count();
    std::vector<uint32_t> comp(n, UINT32_MAX);
    std::vector<size_t> sizes;
    std::vector<NodeId> smallest_member;  // node index with lexicographically smallest id

    std::deque<NodeId> queue;
    for (NodeId start = 0; start < n; ++start) {
        if (comp[start] != UINT32_MAX) continue;
        uint32_t c = static_cast<uint32_t>(sizes.size());
        comp[start] = c;
        sizes.push_back(0);
        smallest_member.push_back(start);
        queue.push_back(start);
        while (!queue.empty()) {
            NodeId u = queue.front();
            queue.pop_front();
            ++sizes[c];
            if (g.id_of(u) < g.id_of(smallest_member[c])) smallest_member[c] = u;
            for (NodeId v : g.out_neighbors(u)) {
                if (comp[v] == UINT32_MAX) {
                    comp[v] = c;
                    queue.push_back(v);
                }
            }
            for (NodeId v : g.in_neighbors(u)) {
                if (comp[v] == UINT32_MAX) {
                    comp[v] = c;
                    queue.push_back(v);
                }
            }
        }
    }

    // Rank components by decreasing size, ties by smallest member id.
    std::vector<uint32_t> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return g.id_of(smallest_member[a]) < g.id_of(smallest_member[b]);
    });
    std::vector<uint32_t> rank(sizes.size());
    for (uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

    ComponentInfo info;
    info.sizes.resize(sizes.size());
    for (uint32_t c = 0; c < sizes.size(); ++c) info.sizes[rank[c]] = sizes[c];
    info.component.resize(n);
    for (size_t i = 0; i < n; ++i) info.component[i] = rank[comp[i]];
    return info;
}

CitationGraph largest_connected_component(const CitationGraph& g, std::string* warning) {
    if (g.node_count() == 0) {
        if (warning) *warning = "largest_connected_component: empty graph";
        CitationGraph empty;
        empty.finalize();
        return empty;
    }
    ComponentInfo info = weakly_connected_components(g);
    std::vector<NodeId> keep;
    for (NodeId n = 0; n < g.node_count(); ++n) {
        if (info.component[n] == 0) keep.push_back(n);
    }
    return g.induced_subgraph(keep);
}

CitationGraph iterated_core(const CitationGraph& g, int k) {
    if (k < 0) throw AnalysisError("iterated_core: k must be >= 0");
    const size_t n = g.node_count();
    std::vector<int> degree(n);
    std::vector<bool> removed(n, false);
    std::deque<NodeId> queue;
    for (NodeId i = 0; i < n; ++i) {
        degree[i] = g.total_degree(i);
        if (degree[i] < k) {
            removed[i] = true;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : g.out_neighbors(u)) {
            if (!removed[v] && --degree[v] < k) {
                removed[v] = true;
                queue.push_back(v);
            }
        }
        for (NodeId v : g.in_neighbors(u)) {
            if (!removed[v] && --degree[v] < k) {
                removed[v] = true;
                queue.push_back(v);
            }
        }
    }
    std::vector<NodeId> keep;
    for (NodeId i = 0; i < n; ++i) {
        if (!removed[i]) keep.push_back(i);
    }
    return g.induced_subgraph(keep);
}

CitationGraph provenance_subnetwork(const CitationGraph& g, const std::string& query_label) {
    std::vector<NodeId> keep;
    std::set<std::string> known;
    for (NodeId n = 0; n < g.node_count(); ++n) {
        const auto& queries = g.attrs_of(n).seed_queries;
        known.insert(queries.begin(), queries.end());
        if (std::binary_search(queries.begin(), queries.end(), query_label)) keep.push_back(n);
    }
    if (keep.empty()) {
        std::string msg = "unknown provenance label '" + query_label + "'; known labels:";
        if (known.empty()) msg += " (none)";
        for (const auto& label : known) msg += " " + label;
        throw AnalysisError(msg);
    }
    return g.induced_subgraph(keep);
}

DegreeStats degree_stats(const CitationGraph& g) {
    DegreeStats stats;
    const size_t n = g.node_count();
    stats.in.resize(n);
    stats.out.resize(n);
    stats.total.resize(n);
    long long sum = 0;
    for (NodeId i = 0; i < n; ++i) {
        stats.in[i] = g.in_degree(i);
        stats.out[i] = g.out_degree(i);
        stats.total[i] = g.total_degree(i);
        stats.max_in = std::max(stats.max_in, stats.in[i]);
        stats.max_out = std::max(stats.max_out, stats.out[i]);
        stats.max_total = std::max(stats.max_total, stats.total[i]);
        sum += stats.total[i];
    }
    stats.mean_total = n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n);
    return stats;
}

void write_edge_csv(const std::string& path, const CitationGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AnalysisError("cannot write edge file: " + path);
    out << "citing_id,cited_id\n";
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            out << csv_escape(g.id_of(u)) << ',' << csv_escape(g.id_of(v)) << '\n';
        }
    }
}

void write_node_csv(const std::string& path, const CitationGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AnalysisError("cannot write node file: " + path);
    out << "id,title,year,depth,seed_queries\n";
    for (NodeId n = 0; n < g.node_count(); ++n) {
        const NodeAttrs& a = g.attrs_of(n);
        std::string queries;
        for (const auto& q : a.seed_queries) {
            if (!queries.empty()) queries += ';';
            queries += q;
        }
        out << csv_escape(g.id_of(n)) << ',' << csv_escape(a.title) << ','
            << (a.year ? std::to_string(*a.year) : "") << ',' << a.depth << ','
            << csv_escape(queries) << '\n';
    }
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AnalysisError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

CitationGraph read_graph_csv(const std::string& edge_path, const std::string& node_path) {
    std::vector<PaperRecord> records;
    std::vector<std::pair<std::string, std::string>> edges;

    if (!node_path.empty()) {
        auto lines = read_lines(node_path);
        for (size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            auto fields = csv_split_line(lines[i]);
            if (fields.size() < 5) {
                throw AnalysisError(node_path + ":" + std::to_string(i + 1) + ": expected 5 columns");
            }
            PaperRecord rec;
            rec.id = fields[0];
            rec.title = fields[1];
            if (!fields[2].empty()) rec.year = std::stoi(fields[2]);
            rec.depth = fields[3].empty() ? 0 : std::stoi(fields[3]);
            std::istringstream qs(fields[4]);
            std::string q;
            while (std::getline(qs, q, ';')) {
                if (!q.empty()) rec.seed_queries.push_back(q);
            }
            std::sort(rec.seed_queries.begin(), rec.seed_queries.end());
            records.push_back(std::move(rec));
        }
    }

    auto lines = read_lines(edge_path);
    std::set<std::string> known;
    for (const auto& rec : records) known.insert(rec.id);
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = csv_split_line(lines[i]);
        if (fields.size() < 2) {
            throw AnalysisError(edge_path + ":" + std::to_string(i + 1) + ": expected 2 columns");
        }
        for (int c = 0; c < 2; ++c) {
            if (!known.count(fields[c])) {
                if (!node_path.empty()) {
                    throw AnalysisError(edge_path + ":" + std::to_string(i + 1) +
                                        ": endpoint not in node file: " + fields[c]);
                }
                known.insert(fields[c]);
                PaperRecord rec;
                rec.id = fields[c];
                records.push_back(std::move(rec));
            }
        }
        edges.emplace_back(fields[0], fields[1]);
    }
    return build_graph(records, edges);
}

CitationGraph build_graph(const std::vector<PaperRecord>& records,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<const PaperRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& rec : records) sorted.push_back(&rec);
    std::sort(sorted.begin(), sorted.end(),
              [](const PaperRecord* a, const PaperRecord* b) { return a->id < b->id; });

    CitationGraph g;
    for (const PaperRecord* rec : sorted) {
        NodeAttrs attrs;
        attrs.title = rec->title;
        attrs.year = rec->year;
        attrs.depth = rec->depth;
        attrs.seed_queries = rec->seed_queries;
        g.add_node(rec->id, std::move(attrs));
    }
    for (const auto& [citing, cited] : edges) {
        auto u = g.find(citing);
        auto v = g.find(cited);
        if (!u || !v) {
            throw AnalysisError("edge endpoint not in record set: " + (u ? cited : citing));
        }
        g.add_edge(*u, *v);
    }
    g.finalize();
    return g;
}

}  // namespace citegraph
