#pragma once

#include <optional>
#include <string>
#include <vector>

#include "citegraph/corpus.hpp"
#include "citegraph/graph.hpp"

namespace citegraph {

struct PipelineConfig {
    std::vector<SeedSpec> seeds;
    std::string exclusion_file;       // optional
    std::string provider;             // fixture:<dir> or api:<base-url>
    std::string state_dir;            // resume from a saved harvest instead of crawling
    std::string cache_dir;            // optional response cache
    int depth = 2;
    int core_k = 2;
    uint64_t louvain_seed = 42;
    double resolution = 1.0;
    double zipf_cutoff = 500;
    int representatives_m = 5;
    std::string provenance_label;     // optional: analyze one query's subnetwork
    std::string out_dir;
    int retries = 3;
    int threads = 1;
    size_t node_budget = 0;
    double requests_per_second = 5.0;
};

/// Parses "label:file[:max_results]"; a bare "file" gets the file stem as
/// its label.
SeedSpec parse_seed_spec(const std::string& value);

/// Plain key = value file, '#' comments; `seed` may repeat. Unknown keys are
/// an error.
PipelineConfig parse_config_file(const std::string& path);

/// Harvest (or load) -> [provenance] -> LCC -> core -> Louvain -> modularity
/// -> Zipf -> representatives -> flows -> renormalization -> dendrogram ->
/// exports. Writes every artifact plus report.json under out_dir and returns
/// the report text. All outputs are byte-deterministic for fixed config and
/// fixtures.
std::string run_pipeline(const PipelineConfig& config);

}  // namespace citegraph
