#include "citegraph/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "citegraph/community.hpp"
#include "citegraph/errors.hpp"
#include "citegraph/exporters.hpp"
#include "citegraph/flows.hpp"
#include "citegraph/harvest.hpp"
#include "citegraph/provider.hpp"
#include "citegraph/text.hpp"

namespace fs = std::filesystem;

namespace citegraph {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

SeedSpec parse_seed_spec(const std::string& value) {
    SeedSpec spec;
    // strip a trailing :<digits> cap first, then split off the label
    std::string rest = value;
    auto cap = rest.rfind(':');
    if (cap != std::string::npos && cap + 1 < rest.size() &&
        rest.find_first_not_of("0123456789", cap + 1) == std::string::npos) {
        spec.max_results = std::stoi(rest.substr(cap + 1));
        rest = rest.substr(0, cap);
    }
    auto sep = rest.find(':');
    if (sep != std::string::npos) {
        spec.query_label = rest.substr(0, sep);
        spec.record_file = rest.substr(sep + 1);
    } else {
        spec.record_file = rest;  // bare file: the label defaults to the file stem
    }
    if (spec.query_label.empty()) {
        spec.query_label = fs::path(spec.record_file).stem().string();
    }
    if (spec.query_label.empty() || spec.record_file.empty()) {
        throw ConfigError("seed must be [label:]file[:max_results], got: " + value);
    }
    return spec;
}

PipelineConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "seed") cfg.seeds.push_back(parse_seed_spec(value));
            else if (key == "exclusions") cfg.exclusion_file = value;
            else if (key == "provider") cfg.provider = value;
            else if (key == "state") cfg.state_dir = value;
            else if (key == "cache") cfg.cache_dir = value;
            else if (key == "depth") cfg.depth = std::stoi(value);
            else if (key == "core_k") cfg.core_k = std::stoi(value);
            else if (key == "louvain_seed") cfg.louvain_seed = std::stoull(value);
            else if (key == "resolution") cfg.resolution = std::stod(value);
            else if (key == "zipf_cutoff") cfg.zipf_cutoff = std::stod(value);
            else if (key == "representatives") cfg.representatives_m = std::stoi(value);
            else if (key == "provenance") cfg.provenance_label = value;
            else if (key == "out") cfg.out_dir = value;
            else if (key == "retries") cfg.retries = std::stoi(value);
            else if (key == "threads") cfg.threads = std::stoi(value);
            else if (key == "node_budget") cfg.node_budget = std::stoull(value);
            else if (key == "requests_per_second") cfg.requests_per_second = std::stod(value);
            else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": bad value for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": value out of range for '" + key + "'");
        }
    }
    return cfg;
}

namespace {

nlohmann::ordered_json config_echo(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (const auto& s : cfg.seeds) {
        seeds.push_back({{"label", s.query_label},
                         {"file", s.record_file},
                         {"max_results", s.max_results}});
    }
    j["seeds"] = std::move(seeds);
    j["exclusions"] = cfg.exclusion_file;
    j["provider"] = cfg.provider;
    j["state"] = cfg.state_dir;
    j["depth"] = cfg.depth;
    j["core_k"] = cfg.core_k;
    j["louvain_seed"] = cfg.louvain_seed;
    j["resolution"] = cfg.resolution;
    j["zipf_cutoff"] = cfg.zipf_cutoff;
    j["representatives"] = cfg.representatives_m;
    j["provenance"] = cfg.provenance_label;
    return j;
}

}  // namespace

std::string run_pipeline(const PipelineConfig& cfg) {
    if (cfg.out_dir.empty()) throw ConfigError("pipeline config needs an output directory");
    if (cfg.state_dir.empty() && (cfg.seeds.empty() || cfg.provider.empty())) {
        throw ConfigError("pipeline config needs either a saved state or seeds plus a provider");
    }
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    nlohmann::ordered_json report;
    report["seed"] = cfg.louvain_seed;
    report["config"] = config_echo(cfg);
    nlohmann::ordered_json stages;
    std::string current_stage;

    // Persists the partial report before the error propagates; the exception
    // class is preserved so the CLI can map it to the right exit code.
    auto record_failure = [&](const std::string& stage, const std::string& what) {
        report["stages"] = stages;
        report["error"] = {{"stage", stage}, {"message", what}};
        std::ofstream rep(out / "report.json", std::ios::binary);
        rep << report.dump(2) << "\n";
    };
    auto fail = [&](const std::string& stage, const std::string& what) {
        record_failure(stage, what);
        throw AnalysisError("pipeline stage '" + stage + "' failed: " + what);
    };

    // --- harvest (or resume) ---
    current_stage = "harvest";
    HarvestState state;
    try {
        if (!cfg.state_dir.empty()) {
            state = load_state(cfg.state_dir);
        } else {
            ExclusionList exclusions;
            if (!cfg.exclusion_file.empty()) exclusions = read_exclusion_file(cfg.exclusion_file);
            CorpusResult corpus = build_seed_corpus(cfg.seeds, exclusions);
            // API responses are always cached on disk; snowballs re-query hub
            // papers heavily and responses must stay stable within one run.
            std::string cache_dir = cfg.cache_dir;
            if (cache_dir.empty() && cfg.provider.rfind("api:", 0) == 0) {
                cache_dir = (out / "cache").string();
            }
            auto provider = make_provider(cfg.provider, cache_dir, cfg.requests_per_second);
            SnowballOptions opts;
            opts.max_depth = cfg.depth;
            opts.retries = cfg.retries;
            opts.threads = cfg.threads;
            opts.node_budget = cfg.node_budget;
            state = snowball(corpus.records, *provider, opts);
            save_state(state, (out / "state").string());
            if (state.depth_reached >= 2) {
                auto violations = depth1_closure_check(state, *provider);
                stages["harvest"]["closure_violations"] = violations.size();
            }
            nlohmann::ordered_json warn = nlohmann::ordered_json::array();
            for (const auto& w : corpus.warnings) warn.push_back(w);
            stages["harvest"]["warnings"] = std::move(warn);
        }
    } catch (const ProviderError& e) {
        record_failure(current_stage, e.what());
        throw;
    }
    CitationGraph raw = state_to_graph(state);
    stages["harvest"]["nodes"] = raw.node_count();
    stages["harvest"]["edges"] = raw.edge_count();
    stages["harvest"]["failed"] = state.failed_ids.size();
    stages["harvest"]["partial"] = state.partial;
    stages["harvest"]["depth"] = state.depth_reached;

    // --- optional provenance restriction ---
    CitationGraph working = std::move(raw);
    if (!cfg.provenance_label.empty()) {
        current_stage = "provenance";
        try {
            working = provenance_subnetwork(working, cfg.provenance_label);
        } catch (const AnalysisError& e) {
            fail(current_stage, e.what());
        }
        stages["provenance"]["label"] = cfg.provenance_label;
        stages["provenance"]["nodes"] = working.node_count();
        stages["provenance"]["edges"] = working.edge_count();
    }

    // --- largest weakly connected component ---
    current_stage = "lcc";
    ComponentInfo comps = weakly_connected_components(working);
    CitationGraph lcc = largest_connected_component(working);
    stages["lcc"]["nodes"] = lcc.node_count();
    stages["lcc"]["edges"] = lcc.edge_count();
    stages["lcc"]["component_count"] = comps.sizes.size();
    stages["lcc"]["second_component"] = comps.sizes.size() > 1 ? comps.sizes[1] : 0;

    // --- iterated core ---
    current_stage = "core";
    CitationGraph core = iterated_core(lcc, cfg.core_k);
    stages["core"]["k"] = cfg.core_k;
    stages["core"]["nodes"] = core.node_count();
    stages["core"]["edges"] = core.edge_count();
    stages["core"]["empty"] = core.node_count() == 0;

    write_edge_csv((out / "core.edges.csv").string(), core);
    write_node_csv((out / "core.nodes.csv").string(), core);

    if (core.node_count() == 0) {
        // Nothing to detect communities on; report gracefully and stop here.
        stages["communities"] = nullptr;
        stages["zipf"] = nullptr;
        stages["flows"] = nullptr;
        report["stages"] = stages;
        std::string text = report.dump(2) + "\n";
        std::ofstream rep(out / "report.json", std::ios::binary);
        rep << text;
        return text;
    }

    // --- communities ---
    current_stage = "communities";
    Partition part;
    try {
        UndirectedProjection proj = undirected_projection(core);
        LouvainResult louvain_result = louvain(proj, cfg.louvain_seed, cfg.resolution);
        part = std::move(louvain_result.partition);
        stages["communities"]["k"] = part.community_count();
        stages["communities"]["q_undirected"] = modularity_undirected(proj, part);
        stages["communities"]["q_directed"] = modularity_directed(core, part);
        stages["communities"]["phase_q"] = louvain_result.phase_q;
        stages["communities"]["levels"] = louvain_result.levels;
    } catch (const AnalysisError& e) {
        fail(current_stage, e.what());
    }
    write_partition_csv((out / "partition.csv").string(), core, part);

    CommunityReport comm_report = representatives(core, part, cfg.representatives_m);
    {
        std::ofstream jf(out / "communities.json", std::ios::binary);
        jf << community_report_json(core, comm_report);
        std::ofstream mf(out / "communities.md", std::ios::binary);
        mf << community_report_markdown(core, comm_report);
    }

    // --- Zipf fit over community sizes ---
    current_stage = "zipf";
    {
        std::vector<double> sizes(part.sizes.begin(), part.sizes.end());
        try {
            ZipfFit fit = zipf_exponent(sizes, cfg.zipf_cutoff);
            stages["zipf"]["exponent"] = fit.exponent;
            stages["zipf"]["r_squared"] = fit.r_squared;
            stages["zipf"]["cutoff"] = cfg.zipf_cutoff;
            stages["zipf"]["n_fitted"] = fit.n_fitted;
        } catch (const AnalysisError& e) {
            // Too few large communities at desk scale is expected; report it
            // instead of aborting a run whose later stages need nothing from
            // the fit.
            stages["zipf"]["error"] = e.what();
            stages["zipf"]["cutoff"] = cfg.zipf_cutoff;
        }
    }

    // --- flows, heatmap, dendrogram ---
    current_stage = "flows";
    try {
        FlowMatrix flows = flow_matrix(core, part);
        LogHeatmap heat = log_renormalize(flows);
        AsymmetryReport asym = asymmetry_report(flows);
        std::vector<std::string> labels;
        for (size_t c = 0; c < flows.k; ++c) labels.push_back("c" + std::to_string(c));
        write_flow_csv((out / "flows.csv").string(), flows, heat, labels);
        {
            std::ofstream jf(out / "flows.json", std::ios::binary);
            jf << flow_report_json(flows, heat, asym);
        }
        if (flows.k >= 1) {
            Dendrogram dend = community_dendrogram(flows);
            std::ofstream nf(out / "dendrogram.nwk", std::ios::binary);
            nf << to_newick(dend, labels);
        }
        stages["flows"]["k"] = flows.k;
        stages["flows"]["max_flow"] = heat.max_positive;
        stages["flows"]["min_positive_flow"] = heat.min_positive;
        stages["flows"]["one_way_pairs"] = asym.one_way.size();
        nlohmann::ordered_json zero_rows = nlohmann::ordered_json::array();
        for (size_t a = 0; a < flows.k; ++a) {
            if (flows.zero_out_row[a]) zero_rows.push_back(a);
        }
        stages["flows"]["zero_out_rows"] = std::move(zero_rows);
    } catch (const AnalysisError& e) {
        fail(current_stage, e.what());
    }

    // --- exports ---
    current_stage = "export";
    try {
        export_graph(core, part, ExportFormat::Gexf, (out / "core.gexf").string());
        export_graph(core, part, ExportFormat::GraphML, (out / "core.graphml").string());
    } catch (const AnalysisError& e) {
        fail(current_stage, e.what());
    }

    report["stages"] = stages;
    std::string text = report.dump(2) + "\n";
    std::ofstream rep(out / "report.json", std::ios::binary);
    rep << text;
    return text;
}

}  // namespace citegraph
