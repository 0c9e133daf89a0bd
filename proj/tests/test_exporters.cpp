#include <doctest.h>

#include <filesystem>
#include <set>

#include "citegraph/errors.hpp"
#include "citegraph/exporters.hpp"
#include "oracles.hpp"

using namespace citegraph;
using oracles::graph_from_edges;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("citegraph_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("gexf export of a 3-cycle carries attributes and viz sizes") {
    CitationGraph g = graph_from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
    std::string gexf = graph_to_gexf(g, all_in_one_partition(3));
    CHECK(gexf.find("<gexf xmlns=\"http://www.gexf.net/1.2draft\"") != std::string::npos);
    CHECK(gexf.find("defaultedgetype=\"directed\"") != std::string::npos);
    for (int i = 0; i < 3; ++i) {
        CHECK(gexf.find("<node id=\"" + oracles::padded_id(i) + "\"") != std::string::npos);
    }
    // every node has total degree 2 and community 0
    CHECK(gexf.find("<viz:size value=\"2\"/>") != std::string::npos);
    CHECK(gexf.find("<attvalue for=\"0\" value=\"0\"/>") != std::string::npos);
    // three edges
    CHECK(gexf.find("<edge id=\"2\"") != std::string::npos);
    CHECK(gexf.find("<edge id=\"3\"") == std::string::npos);
}

TEST_CASE("empty graph exports are still well-formed") {
    CitationGraph g;
    g.finalize();
    Partition empty = make_partition({});
    std::string gexf = graph_to_gexf(g, empty);
    CHECK(gexf.find("<nodes>") != std::string::npos);
    CHECK(gexf.find("</gexf>") != std::string::npos);
    std::string graphml = graph_to_graphml(g, empty);
    CHECK(graphml.find("</graphml>") != std::string::npos);
}

TEST_CASE("xml special characters in ids and titles are escaped") {
    CitationGraph g;
    NodeAttrs attrs;
    attrs.title = "Cities & \"markets\" <draft>";
    auto a = g.add_node("id&1", attrs);
    auto b = g.add_node("id<2");
    g.add_edge(a, b);
    g.finalize();
    std::string gexf = graph_to_gexf(g, all_in_one_partition(2));
    CHECK(gexf.find("id&1") == std::string::npos);
    CHECK(gexf.find("id&amp;1") != std::string::npos);
    CHECK(gexf.find("Cities &amp; &quot;markets&quot; &lt;draft&gt;") != std::string::npos);
    std::string graphml = graph_to_graphml(g, all_in_one_partition(2));
    CHECK(graphml.find("id&amp;1") != std::string::npos);
}

TEST_CASE("graphml export lists keys and per-node data") {
    CitationGraph g = graph_from_edges(2, {{0, 1}});
    std::string graphml = graph_to_graphml(g, make_partition({0, 1}));
    CHECK(graphml.find("<key id=\"community\"") != std::string::npos);
    CHECK(graphml.find("<key id=\"degree\"") != std::string::npos);
    CHECK(graphml.find("edgedefault=\"directed\"") != std::string::npos);
    CHECK(graphml.find("<data key=\"degree\">1</data>") != std::string::npos);
}

TEST_CASE("edgelist export and re-import preserve ids and edges, including isolates") {
    auto dir = fresh_dir("edgelist_roundtrip");
    CitationGraph g;
    auto a = g.add_node("paper-a");
    auto b = g.add_node("paper-b");
    auto c = g.add_node("paper-c");
    g.add_node("isolated-paper");
    g.add_edge(a, b);
    g.add_edge(b, c);
    g.add_edge(c, a);
    g.finalize();

    std::string path = (dir / "out.edges.csv").string();
    export_graph(g, all_in_one_partition(4), ExportFormat::EdgeList, path);
    CitationGraph back = read_graph_csv(path, (dir / "out.edges.nodes.csv").string());

    REQUIRE(back.node_count() == g.node_count());
    std::set<std::string> ids, back_ids;
    for (NodeId n = 0; n < g.node_count(); ++n) ids.insert(g.id_of(n));
    for (NodeId n = 0; n < back.node_count(); ++n) back_ids.insert(back.id_of(n));
    CHECK(ids == back_ids);
    CHECK(back.edge_count() == g.edge_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            auto bu = back.find(g.id_of(u));
            auto bv = back.find(g.id_of(v));
            REQUIRE(bu.has_value());
            REQUIRE(bv.has_value());
            CHECK(back.has_edge(*bu, *bv));
        }
    }
}

TEST_CASE("exports are deterministic") {
    Rng rng(777);
    CitationGraph g = oracles::random_digraph(25, 0.1, rng);
    Partition part = all_in_one_partition(25);
    CHECK(graph_to_gexf(g, part) == graph_to_gexf(g, part));
    CHECK(graph_to_graphml(g, part) == graph_to_graphml(g, part));
}

TEST_CASE("parse_export_format accepts the documented names only") {
    CHECK(parse_export_format("gexf") == ExportFormat::Gexf);
    CHECK(parse_export_format("graphml") == ExportFormat::GraphML);
    CHECK(parse_export_format("edgelist") == ExportFormat::EdgeList);
    CHECK_THROWS_AS(parse_export_format("dot"), ConfigError);
}
