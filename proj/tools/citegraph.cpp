#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citegraph/community.hpp"
#include "citegraph/errors.hpp"
#include "citegraph/exporters.hpp"
#include "citegraph/flows.hpp"
#include "citegraph/harvest.hpp"
#include "citegraph/pipeline.hpp"
#include "citegraph/provider.hpp"
#include "citegraph/synth.hpp"
#include "citegraph/text.hpp"

namespace fs = std::filesystem;
using namespace citegraph;

namespace {

std::vector<SeedSpec> parse_seed_args(const std::vector<std::string>& args) {
    std::vector<SeedSpec> specs;
    for (const auto& arg : args) specs.push_back(parse_seed_spec(arg));
    return specs;
}

Partition load_partition_csv(const std::string& path, const CitationGraph& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open partition file: " + path);
    std::map<std::string, uint32_t> by_id;
    std::string line;
    std::getline(in, line);  // header
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = csv_split_line(line);
        if (fields.size() < 2) throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 2 columns");
        by_id[fields[0]] = static_cast<uint32_t>(std::stoul(fields[1]));
    }
    std::vector<uint32_t> labels(g.node_count());
    for (NodeId n = 0; n < g.node_count(); ++n) {
        auto it = by_id.find(g.id_of(n));
        if (it == by_id.end()) throw AnalysisError("partition file misses node: " + g.id_of(n));
        labels[n] = it->second;
    }
    return make_partition(labels);
}

int cmd_harvest(const std::vector<std::string>& seed_args, const std::string& exclusions,
                const std::string& provider_spec, int depth, const std::string& out_dir,
                std::string cache, int retries, int threads, size_t budget, double rate) {
    ExclusionList excl;
    if (!exclusions.empty()) excl = read_exclusion_file(exclusions);
    CorpusResult corpus = build_seed_corpus(parse_seed_args(seed_args), excl);
    for (const auto& warning : corpus.warnings) std::cerr << "warning: " << warning << "\n";
    std::cout << "seed corpus: " << corpus.records.size() << " records\n";

    if (cache.empty() && provider_spec.rfind("api:", 0) == 0) {
        cache = (fs::path(out_dir) / "cache").string();
    }
    auto provider = make_provider(provider_spec, cache, rate);
    SnowballOptions opts;
    opts.max_depth = depth;
    opts.retries = retries;
    opts.threads = threads;
    opts.node_budget = budget;
    HarvestState state = snowball(corpus.records, *provider, opts);
    save_state(state, out_dir);
    std::cout << "harvested: " << state.records().size() << " nodes, " << state.edge_count()
              << " edges, depth " << state.depth_reached << (state.partial ? " (partial)" : "")
              << "\n";
    if (!state.failed_ids.empty()) {
        std::cout << "failed ids: " << state.failed_ids.size() << " (see "
                  << (fs::path(out_dir) / "failed.txt").string() << ")\n";
    }
    if (state.depth_reached >= 2) {
        auto violations = depth1_closure_check(state, *provider);
        std::cout << "depth-1 closure violations: " << violations.size() << "\n";
    }
    return 0;
}

int cmd_flows(const std::string& state_dir, const std::string& edges_file,
              const std::string& nodes_file, const std::string& partition_file,
              const std::string& out_dir, const std::string& linkage_name) {
    if (state_dir.empty() == edges_file.empty()) {
        throw ConfigError("flows needs exactly one of --state or --edges");
    }
    CitationGraph g = state_dir.empty() ? read_graph_csv(edges_file, nodes_file)
                                        : state_to_graph(load_state(state_dir));
    Partition part = load_partition_csv(partition_file, g);
    Linkage linkage = Linkage::Average;
    if (linkage_name == "single") linkage = Linkage::Single;
    else if (linkage_name == "complete") linkage = Linkage::Complete;
    else if (linkage_name != "average") throw ConfigError("linkage must be single|complete|average");

    fs::create_directories(out_dir);
    FlowMatrix flows = flow_matrix(g, part);
    LogHeatmap heat = log_renormalize(flows);
    AsymmetryReport asym = asymmetry_report(flows);
    std::vector<std::string> labels;
    for (size_t c = 0; c < flows.k; ++c) labels.push_back("c" + std::to_string(c));
    write_flow_csv((fs::path(out_dir) / "flows.csv").string(), flows, heat, labels);
    {
        std::ofstream jf(fs::path(out_dir) / "flows.json", std::ios::binary);
        jf << flow_report_json(flows, heat, asym);
    }
    Dendrogram dend = community_dendrogram(flows, linkage);
    {
        std::ofstream nf(fs::path(out_dir) / "dendrogram.nwk", std::ios::binary);
        nf << to_newick(dend, labels);
    }
    std::cout << "flows: k=" << flows.k << " max=" << format_double(heat.max_positive)
              << " min_positive=" << format_double(heat.min_positive) << " one_way="
              << asym.one_way.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citegraph: citation-network reconstruction and community analysis"};
    app.require_subcommand(1);

    // harvest
    auto* harvest_cmd = app.add_subcommand("harvest", "snowball a seed corpus into a citation network");
    std::vector<std::string> seed_args;
    std::string exclusions, provider_spec, out_dir, cache;
    int depth = 2, retries = 3, threads = 1;
    size_t budget = 0;
    double rate = 5.0;
    harvest_cmd->add_option("--seeds", seed_args, "seed query as [label:]file[:max_results]")->required();
    harvest_cmd->add_option("--exclusions", exclusions, "exclusion list file");
    harvest_cmd->add_option("--provider", provider_spec, "fixture:<dir> or api:<base-url>")->required();
    harvest_cmd->add_option("--depth", depth, "snowball depth (default 2)");
    harvest_cmd->add_option("--out", out_dir, "state output directory")->required();
    harvest_cmd->add_option("--cache", cache, "response cache directory");
    harvest_cmd->add_option("--retries", retries, "retries per failing id");
    harvest_cmd->add_option("--threads", threads, "concurrent provider requests per frontier");
    harvest_cmd->add_option("--budget", budget, "node budget (0 = unlimited)");
    harvest_cmd->add_option("--rate", rate, "api requests per second");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "run the analysis pipeline from a saved state");
    PipelineConfig acfg;
    analyze_cmd->add_option("--state", acfg.state_dir, "saved harvest state directory")->required();
    analyze_cmd->add_option("--out", acfg.out_dir, "output directory")->required();
    analyze_cmd->add_option("--core-k", acfg.core_k, "degree threshold for the iterated core");
    analyze_cmd->add_option("--louvain-seed", acfg.louvain_seed, "community detection seed");
    analyze_cmd->add_option("--resolution", acfg.resolution, "modularity resolution");
    analyze_cmd->add_option("--zipf-cutoff", acfg.zipf_cutoff, "community size cutoff for the Zipf fit");
    analyze_cmd->add_option("--representatives", acfg.representatives_m, "representatives per community");
    analyze_cmd->add_option("--provenance", acfg.provenance_label, "restrict to one seed query's subnetwork");

    // report
    auto* report_cmd = app.add_subcommand("report", "run the full pipeline from a config file");
    std::string config_path;
    report_cmd->add_option("--config", config_path, "pipeline config file")->required();

    // flows
    auto* flows_cmd = app.add_subcommand("flows", "inter-community citation flows from a graph + partition");
    std::string fl_state, fl_edges, fl_nodes, fl_partition, fl_out, fl_linkage = "average";
    flows_cmd->add_option("--state", fl_state, "saved harvest state directory");
    flows_cmd->add_option("--edges", fl_edges, "edge-list csv (e.g. core.edges.csv from analyze)");
    flows_cmd->add_option("--nodes", fl_nodes, "node-attribute csv matching --edges");
    flows_cmd->add_option("--partition", fl_partition, "partition csv (node_id,community_id)")->required();
    flows_cmd->add_option("--out", fl_out, "output directory")->required();
    flows_cmd->add_option("--linkage", fl_linkage, "dendrogram linkage: single|complete|average");

    // export
    auto* export_cmd = app.add_subcommand("export", "write the graph for external visualization");
    std::string ex_state, ex_partition, ex_format = "gexf", ex_out;
    export_cmd->add_option("--state", ex_state, "saved harvest state directory")->required();
    export_cmd->add_option("--partition", ex_partition, "partition csv; defaults to one community");
    export_cmd->add_option("--format", ex_format, "gexf|graphml|edgelist");
    export_cmd->add_option("--out", ex_out, "output file")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a planted-partition snowball fixture");
    PlantedSpec spec;
    int n_seeds = 4;
    bool cyclic = false;
    std::string sy_out;
    synth_cmd->add_option("--blocks", spec.blocks, "number of planted communities");
    synth_cmd->add_option("--block-size", spec.block_size, "nodes per community");
    synth_cmd->add_option("--p-in", spec.p_in, "intra-community edge probability");
    synth_cmd->add_option("--p-out", spec.p_out, "inter-community edge probability");
    synth_cmd->add_flag("--cyclic", cyclic, "allow directed cycles");
    synth_cmd->add_option("--seed", spec.seed, "generator seed");
    synth_cmd->add_option("--n-seeds", n_seeds, "how many nodes become snowball seeds");
    synth_cmd->add_option("--out", sy_out, "fixture output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (harvest_cmd->parsed()) {
            return cmd_harvest(seed_args, exclusions, provider_spec, depth, out_dir, cache,
                               retries, threads, budget, rate);
        }
        if (analyze_cmd->parsed()) {
            std::string report = run_pipeline(acfg);
            std::cout << report;
            return 0;
        }
        if (report_cmd->parsed()) {
            PipelineConfig cfg = parse_config_file(config_path);
            std::string report = run_pipeline(cfg);
            std::cout << report;
            return 0;
        }
        if (flows_cmd->parsed()) {
            return cmd_flows(fl_state, fl_edges, fl_nodes, fl_partition, fl_out, fl_linkage);
        }
        if (export_cmd->parsed()) {
            CitationGraph g = state_to_graph(load_state(ex_state));
            Partition part = ex_partition.empty() ? all_in_one_partition(g.node_count())
                                                  : load_partition_csv(ex_partition, g);
            export_graph(g, part, parse_export_format(ex_format), ex_out);
            std::cout << "exported " << g.node_count() << " nodes, " << g.edge_count()
                      << " edges to " << ex_out << "\n";
            return 0;
        }
        if (synth_cmd->parsed()) {
            spec.acyclic = !cyclic;
            PlantedGraph planted = generate_snowball_fixture(spec, n_seeds, sy_out);
            std::cout << "fixture: " << planted.graph.node_count() << " nodes, "
                      << planted.graph.edge_count() << " edges, " << n_seeds << " seeds in "
                      << sy_out << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
