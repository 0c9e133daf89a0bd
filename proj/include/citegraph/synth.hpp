#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "citegraph/community.hpp"
#include "citegraph/graph.hpp"

namespace citegraph {

/// Directed stochastic-block graph with planted ground truth. In acyclic
/// mode edges only run from higher to lower node index, mimicking citations
/// flowing backward in time.
struct PlantedSpec {
    int blocks = 4;
    int block_size = 25;
    double p_in = 0.3;
    double p_out = 0.01;
    bool acyclic = true;
    uint64_t seed = 1;
};

struct PlantedGraph {
    CitationGraph graph;
    Partition truth;
};

/// Deterministic per seed; node ids are zero-padded ("n00000", ...) so that
/// sorted id order equals index order, and block b holds indices
/// [b*block_size, (b+1)*block_size).
PlantedGraph generate_planted(const PlantedSpec& spec);

/// Writes a FixtureProvider-compatible directory for the generated graph:
/// <dir>/citers/<id>.jsonl for every node plus <dir>/seeds.jsonl holding the
/// n_seeds lowest-index nodes, each labeled with its block's query ("q<b>").
/// Returns the generated graph and truth for oracle use.
PlantedGraph generate_snowball_fixture(const PlantedSpec& spec, int n_seeds,
                                       const std::string& dir);

}  // namespace citegraph
