#pragma once

#include <string>

#include "citegraph/community.hpp"
#include "citegraph/graph.hpp"

namespace citegraph {

enum class ExportFormat { Gexf, GraphML, EdgeList };

ExportFormat parse_export_format(const std::string& name);

/// Writes the graph with node attributes (community id, total degree, depth,
/// title) in stable node order. EdgeList writes <path> plus a companion node
/// file "<path minus extension>.nodes.csv" so isolated nodes survive a
/// round-trip.
void export_graph(const CitationGraph& g, const Partition& part, ExportFormat format,
                  const std::string& path);

std::string graph_to_gexf(const CitationGraph& g, const Partition& part);
std::string graph_to_graphml(const CitationGraph& g, const Partition& part);

}  // namespace citegraph
