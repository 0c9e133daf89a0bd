#include "citegraph/exporters.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "citegraph/errors.hpp"
#include "citegraph/text.hpp"

namespace fs = std::filesystem;

namespace citegraph {

ExportFormat parse_export_format(const std::string& name) {
    if (name == "gexf") return ExportFormat::Gexf;
    if (name == "graphml") return ExportFormat::GraphML;
    if (name == "edgelist") return ExportFormat::EdgeList;
    throw ConfigError("unknown export format: " + name + " (expected gexf|graphml|edgelist)");
}

namespace {

void check_partition(const CitationGraph& g, const Partition& part) {
    if (part.assignment.size() != g.node_count()) {
        throw AnalysisError("export_graph: partition does not cover all nodes");
    }
}

}  // namespace

std::string graph_to_gexf(const CitationGraph& g, const Partition& part) {
    check_partition(g, part);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" "
           "xmlns:viz=\"http://www.gexf.net/1.2draft/viz\" version=\"1.2\">\n"
        << "  <graph defaultedgetype=\"directed\" mode=\"static\">\n"
        << "    <attributes class=\"node\">\n"
        << "      <attribute id=\"0\" title=\"community\" type=\"integer\"/>\n"
        << "      <attribute id=\"1\" title=\"degree\" type=\"integer\"/>\n"
        << "      <attribute id=\"2\" title=\"depth\" type=\"integer\"/>\n"
        << "      <attribute id=\"3\" title=\"title\" type=\"string\"/>\n"
        << "    </attributes>\n"
        << "    <nodes>\n";
    for (NodeId n = 0; n < g.node_count(); ++n) {
        const NodeAttrs& a = g.attrs_of(n);
        std::string label = a.title.empty() ? g.id_of(n) : a.title;
        out << "      <node id=\"" << xml_escape(g.id_of(n)) << "\" label=\""
            << xml_escape(label) << "\">\n"
            << "        <attvalues>\n"
            << "          <attvalue for=\"0\" value=\"" << part.assignment[n] << "\"/>\n"
            << "          <attvalue for=\"1\" value=\"" << g.total_degree(n) << "\"/>\n"
            << "          <attvalue for=\"2\" value=\"" << a.depth << "\"/>\n"
            << "          <attvalue for=\"3\" value=\"" << xml_escape(a.title) << "\"/>\n"
            << "        </attvalues>\n"
            << "        <viz:size value=\"" << std::max(1, g.total_degree(n)) << "\"/>\n"
            << "      </node>\n";
    }
    out << "    </nodes>\n    <edges>\n";
    size_t edge_id = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            out << "      <edge id=\"" << edge_id++ << "\" source=\"" << xml_escape(g.id_of(u))
                << "\" target=\"" << xml_escape(g.id_of(v)) << "\"/>\n";
        }
    }
    out << "    </edges>\n  </graph>\n</gexf>\n";
    return out.str();
}

std::string graph_to_graphml(const CitationGraph& g, const Partition& part) {
    check_partition(g, part);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
        << "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
        << "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
           "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
        << "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n"
        << "  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n"
        << "  <key id=\"depth\" for=\"node\" attr.name=\"depth\" attr.type=\"int\"/>\n"
        << "  <key id=\"title\" for=\"node\" attr.name=\"title\" attr.type=\"string\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"directed\">\n";
    for (NodeId n = 0; n < g.node_count(); ++n) {
        const NodeAttrs& a = g.attrs_of(n);
        out << "    <node id=\"" << xml_escape(g.id_of(n)) << "\">\n"
            << "      <data key=\"community\">" << part.assignment[n] << "</data>\n"
            << "      <data key=\"degree\">" << g.total_degree(n) << "</data>\n"
            << "      <data key=\"depth\">" << a.depth << "</data>\n"
            << "      <data key=\"title\">" << xml_escape(a.title) << "</data>\n"
            << "    </node>\n";
    }
    size_t edge_id = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            out << "    <edge id=\"e" << edge_id++ << "\" source=\"" << xml_escape(g.id_of(u))
                << "\" target=\"" << xml_escape(g.id_of(v)) << "\"/>\n";
        }
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

void export_graph(const CitationGraph& g, const Partition& part, ExportFormat format,
                  const std::string& path) {
    check_partition(g, part);
    auto write_file = [&](const std::string& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw AnalysisError("cannot write export file: " + p);
        out << content;
    };
    switch (format) {
        case ExportFormat::Gexf:
            write_file(path, graph_to_gexf(g, part));
            break;
        case ExportFormat::GraphML:
            write_file(path, graph_to_graphml(g, part));
            break;
        case ExportFormat::EdgeList: {
            write_edge_csv(path, g);
            fs::path base(path);
            base.replace_extension();
            write_node_csv(base.string() + ".nodes.csv", g);
            break;
        }
    }
}

}  // namespace citegraph
