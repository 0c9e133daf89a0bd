#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citegraph/corpus.hpp"
#include "citegraph/graph.hpp"
#include "citegraph/provider.hpp"

namespace citegraph {

struct SnowballOptions {
    int max_depth = 2;
    int retries = 3;              // attempts per id after the first failure
    int retry_delay_ms = 0;
    size_t node_budget = 0;       // 0 = unlimited; exceeding it stops with partial = true
    int threads = 1;              // provider requests in flight within a frontier
};

/// Result of a snowball run: records keyed by canonical id, the observed
/// citation edge set, ids the provider failed on, and a partial flag set when
/// the node budget cut the run short. Every edge endpoint exists in records,
/// edges are unique and never self-citations.
class HarvestState {
public:
    int add_or_merge(const PaperRecord& record);  // returns the record's index
    bool add_edge(const std::string& citing, const std::string& cited);
    bool has_edge(const std::string& citing, const std::string& cited) const;

    const std::vector<PaperRecord>& records() const { return records_; }
    std::vector<PaperRecord>& records() { return records_; }
    const PaperRecord* find(const std::string& id) const;

    /// Edge list as (citing id, cited id), sorted; materialized on demand.
    std::vector<std::pair<std::string, std::string>> sorted_edges() const;
    size_t edge_count() const { return edges_.size(); }

    int depth_reached = 0;
    bool partial = false;
    std::vector<std::string> failed_ids;  // sorted, unique

private:
    std::vector<PaperRecord> records_;
    std::unordered_map<std::string, int> index_;
    std::unordered_set<uint64_t> edges_;  // packed (citing index, cited index)

    friend HarvestState snowball(const std::vector<PaperRecord>&, const CitationProvider&,
                                 const SnowballOptions&);
};

/// Breadth-first backward snowball: the depth-d frontier is the set of citing
/// papers of depth-(d-1) papers not seen earlier. Every citation edge from a
/// retrieved paper to a previously known paper is recorded, records carry
/// minimal depth, and seed-query provenance is propagated transitively from
/// the cited side. Provider failures are retried `retries` times, then the id
/// lands in failed_ids and the run continues.
HarvestState snowball(const std::vector<PaperRecord>& seeds, const CitationProvider& provider,
                      const SnowballOptions& options = {});

struct ClosureViolation {
    std::string citing;
    std::string cited;
};

/// Re-queries the provider for every id at depth <= 1 and reports citation
/// links between depth <= 1 papers that the state is missing. Empty result
/// means the depth-one layer is completely observed.
std::vector<ClosureViolation> depth1_closure_check(const HarvestState& state,
                                                   const CitationProvider& provider);

/// State directory layout: records.jsonl, edges.csv, failed.txt, meta.json.
/// Output is fully sorted, so identical runs serialize byte-identically.
void save_state(const HarvestState& state, const std::string& dir);
HarvestState load_state(const std::string& dir);

CitationGraph state_to_graph(const HarvestState& state);

}  // namespace citegraph
