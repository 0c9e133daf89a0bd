#include "citegraph/synth.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "citegraph/errors.hpp"
#include "citegraph/random.hpp"
#include "citegraph/text.hpp"

namespace fs = std::filesystem;

namespace citegraph {

namespace {

std::string node_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%05d", index);
    return buf;
}

void validate(const PlantedSpec& spec) {
    if (spec.blocks < 1 || spec.block_size < 1 || spec.blocks * spec.block_size < 2) {
        throw ConfigError("planted spec needs blocks*block_size >= 2");
    }
    if (!(spec.p_out >= 0.0 && spec.p_out <= spec.p_in && spec.p_in <= 1.0)) {
        throw ConfigError("planted spec needs 0 <= p_out <= p_in <= 1");
    }
}

}  // namespace

PlantedGraph generate_planted(const PlantedSpec& spec) {
    validate(spec);
    const int n = spec.blocks * spec.block_size;
    Rng rng(spec.seed);

    PlantedGraph out;
    std::vector<uint32_t> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = static_cast<uint32_t>(i / spec.block_size);
        NodeAttrs attrs;
        attrs.title = "Paper " + std::to_string(i) + " block " + std::to_string(labels[i]);
        attrs.year = 1900 + (i * 100) / n;  // later index = later year
        out.graph.add_node(node_id(i), std::move(attrs));
    }
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            if (spec.acyclic && u < v) continue;  // only higher -> lower index
            double p = labels[u] == labels[v] ? spec.p_in : spec.p_out;
            if (rng.bernoulli(p)) {
                out.graph.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
            }
        }
    }
    out.graph.finalize();
    out.truth = make_partition(labels);
    return out;
}

PlantedGraph generate_snowball_fixture(const PlantedSpec& spec, int n_seeds,
                                       const std::string& dir) {
    PlantedGraph planted = generate_planted(spec);
    const int n = static_cast<int>(planted.graph.node_count());
    if (n_seeds < 1 || n_seeds > n) {
        throw ConfigError("n_seeds must be in [1, total nodes]");
    }

    fs::path citers_dir = fs::path(dir) / "citers";
    std::error_code ec;
    fs::create_directories(citers_dir, ec);
    if (ec) throw ConfigError("cannot create fixture directory " + citers_dir.string() + ": " +
                              ec.message());

    auto record_of = [&](NodeId node) {
        PaperRecord rec;
        rec.id = planted.graph.id_of(node);
        rec.title = planted.graph.attrs_of(node).title;
        rec.year = planted.graph.attrs_of(node).year;
        rec.raw_ids = {rec.id};
        return rec;
    };

    for (NodeId v = 0; v < planted.graph.node_count(); ++v) {
        std::vector<PaperRecord> citers;
        for (NodeId u : planted.graph.in_neighbors(v)) citers.push_back(record_of(u));
        fs::path path = citers_dir / (sanitize_for_filename(planted.graph.id_of(v)) + ".jsonl");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write fixture file: " + path.string());
        for (const auto& rec : citers) out << record_to_json_line(rec) << '\n';
    }

    std::vector<PaperRecord> seeds;
    for (int i = 0; i < n_seeds; ++i) {
        PaperRecord rec = record_of(static_cast<NodeId>(i));
        rec.seed_queries = {"q" + std::to_string(i / spec.block_size)};
        seeds.push_back(std::move(rec));
    }
    write_records_jsonl((fs::path(dir) / "seeds.jsonl").string(), seeds);
    return planted;
}

}  // namespace citegraph
