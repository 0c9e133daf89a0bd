#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "citegraph/errors.hpp"
#include "citegraph/harvest.hpp"
#include "citegraph/synth.hpp"
#include "citegraph/text.hpp"

using namespace citegraph;
namespace fs = std::filesystem;

namespace {

// In-memory provider over an explicit citers map.
class MapProvider : public CitationProvider {
public:
    std::map<std::string, std::vector<std::string>> citers_of;

    std::vector<PaperRecord> citers(const std::string& id) const override {
        auto it = citers_of.find(id);
        if (it == citers_of.end()) throw ProviderError("no data for " + id);
        std::vector<PaperRecord> out;
        for (const auto& cid : it->second) {
            PaperRecord rec;
            rec.id = cid;
            rec.title = "Title of " + cid;
            out.push_back(std::move(rec));
        }
        return out;
    }
    std::string name() const override { return "map"; }
};

PaperRecord seed(const std::string& id, std::vector<std::string> queries = {"q"}) {
    PaperRecord rec;
    rec.id = id;
    rec.title = "Title of " + id;
    rec.seed_queries = std::move(queries);
    return rec;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("snowball walks a linear chain to the requested depth") {
    MapProvider provider;
    provider.citers_of = {{"A", {"B"}}, {"B", {"C"}}, {"C", {}}};
    HarvestState state = snowball({seed("A")}, provider, {.max_depth = 2});

    REQUIRE(state.records().size() == 3);
    CHECK(state.find("A")->depth == 0);
    CHECK(state.find("B")->depth == 1);
    CHECK(state.find("C")->depth == 2);
    auto edges = state.sorted_edges();
    REQUIRE(edges.size() == 2);
    CHECK(state.has_edge("B", "A"));
    CHECK(state.has_edge("C", "B"));
    CHECK(state.depth_reached == 2);
    CHECK(state.failed_ids.empty());
    CHECK(!state.partial);
}

TEST_CASE("snowball terminates on citation cycles with minimal depths") {
    MapProvider provider;
    provider.citers_of = {{"A", {"B"}}, {"B", {"A"}}};
    HarvestState state = snowball({seed("A")}, provider, {.max_depth = 2});
    REQUIRE(state.records().size() == 2);
    CHECK(state.find("A")->depth == 0);
    CHECK(state.find("B")->depth == 1);
    CHECK(state.has_edge("B", "A"));
    CHECK(state.has_edge("A", "B"));
}

TEST_CASE("snowball records edges between known papers at any depth") {
    // Two seeds citing each other are both depth 0; the seed->seed edge must appear.
    MapProvider provider;
    provider.citers_of = {{"S1", {"S2", "X"}}, {"S2", {}}, {"X", {}}};
    HarvestState state = snowball({seed("S1", {"qa"}), seed("S2", {"qb"})}, provider,
                                  {.max_depth = 2});
    CHECK(state.find("S2")->depth == 0);
    CHECK(state.has_edge("S2", "S1"));
    CHECK(state.has_edge("X", "S1"));
}

TEST_CASE("snowball drops self-citations") {
    MapProvider provider;
    provider.citers_of = {{"A", {"A", "B"}}, {"B", {}}};
    HarvestState state = snowball({seed("A")}, provider, {.max_depth = 1});
    CHECK(state.records().size() == 2);
    CHECK(state.edge_count() == 1);
    CHECK(!state.has_edge("A", "A"));
}

TEST_CASE("snowball propagates provenance transitively through cited papers") {
    // D cites C at depth 2 through two branches with different seed labels.
    MapProvider provider;
    provider.citers_of = {{"S1", {"C"}}, {"S2", {"C"}}, {"C", {"D"}}, {"D", {}}};
    HarvestState state = snowball({seed("S1", {"qa"}), seed("S2", {"qb"})}, provider,
                                  {.max_depth = 2});
    CHECK(state.find("C")->seed_queries == std::vector<std::string>{"qa", "qb"});
    CHECK(state.find("D")->seed_queries == std::vector<std::string>{"qa", "qb"});
    CHECK(state.find("S1")->seed_queries == std::vector<std::string>{"qa"});
}

TEST_CASE("depth labels obey depth(citing) <= depth(cited) + 1") {
    PlantedSpec spec;
    spec.blocks = 3;
    spec.block_size = 8;
    spec.p_in = 0.5;
    spec.p_out = 0.1;
    spec.seed = 31;
    fs::path dir = fs::temp_directory_path() / "citegraph_test_depth_prop";
    fs::remove_all(dir);
    generate_snowball_fixture(spec, 2, dir.string());
    FixtureProvider provider((dir / "citers").string());
    auto seeds = read_records_jsonl((dir / "seeds.jsonl").string());
    HarvestState state = snowball(seeds, provider, {.max_depth = 3});
    for (const auto& [citing, cited] : state.sorted_edges()) {
        CHECK(state.find(citing)->depth <= state.find(cited)->depth + 1);
    }
}

TEST_CASE("snowball with depth k is a subgraph of depth k+1") {
    PlantedSpec spec;
    spec.blocks = 2;
    spec.block_size = 10;
    spec.p_in = 0.4;
    spec.p_out = 0.05;
    spec.seed = 13;
    fs::path dir = fs::temp_directory_path() / "citegraph_test_monotone";
    fs::remove_all(dir);
    generate_snowball_fixture(spec, 1, dir.string());
    FixtureProvider provider((dir / "citers").string());
    auto seeds = read_records_jsonl((dir / "seeds.jsonl").string());

    HarvestState shallow = snowball(seeds, provider, {.max_depth = 1});
    HarvestState deep = snowball(seeds, provider, {.max_depth = 2});
    for (const auto& rec : shallow.records()) {
        const PaperRecord* in_deep = deep.find(rec.id);
        REQUIRE(in_deep != nullptr);
        CHECK(in_deep->depth == rec.depth);
    }
    for (const auto& edge : shallow.sorted_edges()) {
        CHECK(deep.has_edge(edge.first, edge.second));
    }
}

TEST_CASE("failed provider lookups are retried then reported") {
    struct FlakyProvider : CitationProvider {
        mutable std::atomic<int> attempts{0};
        std::vector<PaperRecord> citers(const std::string& id) const override {
            if (id == "A") {
                if (++attempts <= 2) throw ProviderError("transient");
                return {};
            }
            if (id == "BAD") throw ProviderError("permanent");
            return {};
        }
        std::string name() const override { return "flaky"; }
    };
    FlakyProvider provider;
    HarvestState state =
        snowball({seed("A"), seed("BAD")}, provider, {.max_depth = 1, .retries = 3});
    CHECK(provider.attempts == 3);  // two failures then success
    REQUIRE(state.failed_ids.size() == 1);
    CHECK(state.failed_ids[0] == "BAD");
}

TEST_CASE("node budget stops expansion with a partial flag") {
    MapProvider provider;
    provider.citers_of = {{"A", {"B", "C", "D", "E"}}, {"B", {}}, {"C", {}}, {"D", {}}, {"E", {}}};
    HarvestState state = snowball({seed("A")}, provider, {.max_depth = 2, .node_budget = 3});
    CHECK(state.partial);
    CHECK(state.records().size() == 3);
}

TEST_CASE("depth1_closure_check passes on a complete harvest and catches a removed edge") {
    MapProvider provider;
    provider.citers_of = {{"A", {"B"}}, {"B", {"C"}}, {"C", {}}};
    HarvestState state = snowball({seed("A")}, provider, {.max_depth = 2});
    CHECK(depth1_closure_check(state, provider).empty());

    // Rebuild the same records but drop the depth1 -> depth0 edge.
    HarvestState broken;
    for (const auto& rec : state.records()) broken.add_or_merge(rec);
    for (const auto& [citing, cited] : state.sorted_edges()) {
        if (!(citing == "B" && cited == "A")) broken.add_edge(citing, cited);
    }
    auto violations = depth1_closure_check(broken, provider);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].citing == "B");
    CHECK(violations[0].cited == "A");
}

TEST_CASE("depth1_closure_check is clean across random fixtures") {
    for (uint64_t seed_value = 1; seed_value <= 5; ++seed_value) {
        PlantedSpec spec;
        spec.blocks = 2;
        spec.block_size = 7;
        spec.p_in = 0.5;
        spec.p_out = 0.15;
        spec.seed = seed_value;
        fs::path dir = fs::temp_directory_path() / ("citegraph_test_closure" +
                                                    std::to_string(seed_value));
        fs::remove_all(dir);
        generate_snowball_fixture(spec, 2, dir.string());
        FixtureProvider provider((dir / "citers").string());
        auto seeds = read_records_jsonl((dir / "seeds.jsonl").string());
        HarvestState state = snowball(seeds, provider, {.max_depth = 2});
        CHECK(depth1_closure_check(state, provider).empty());
    }
}

TEST_CASE("state directories serialize byte-identically and round-trip") {
    PlantedSpec spec;
    spec.blocks = 2;
    spec.block_size = 9;
    spec.p_in = 0.5;
    spec.p_out = 0.1;
    spec.seed = 21;
    fs::path dir = fs::temp_directory_path() / "citegraph_test_state";
    fs::remove_all(dir);
    generate_snowball_fixture(spec, 2, dir.string());
    FixtureProvider provider((dir / "citers").string());
    auto seeds = read_records_jsonl((dir / "seeds.jsonl").string());

    HarvestState first = snowball(seeds, provider, {.max_depth = 2});
    HarvestState second = snowball(seeds, provider, {.max_depth = 2});
    save_state(first, (dir / "s1").string());
    save_state(second, (dir / "s2").string());
    for (const char* file : {"records.jsonl", "edges.csv", "failed.txt", "meta.json"}) {
        CHECK(slurp(dir / "s1" / file) == slurp(dir / "s2" / file));
    }

    HarvestState loaded = load_state((dir / "s1").string());
    CHECK(loaded.records().size() == first.records().size());
    CHECK(loaded.edge_count() == first.edge_count());
    CHECK(loaded.depth_reached == first.depth_reached);
    for (const auto& rec : first.records()) {
        const PaperRecord* back = loaded.find(rec.id);
        REQUIRE(back != nullptr);
        CHECK(back->depth == rec.depth);
        CHECK(back->seed_queries == rec.seed_queries);
    }
}

TEST_CASE("concurrent frontier fetches give the same result as sequential") {
    PlantedSpec spec;
    spec.blocks = 3;
    spec.block_size = 10;
    spec.p_in = 0.4;
    spec.p_out = 0.08;
    spec.seed = 99;
    fs::path dir = fs::temp_directory_path() / "citegraph_test_threads";
    fs::remove_all(dir);
    generate_snowball_fixture(spec, 3, dir.string());
    FixtureProvider provider((dir / "citers").string());
    auto seeds = read_records_jsonl((dir / "seeds.jsonl").string());

    HarvestState sequential = snowball(seeds, provider, {.max_depth = 2, .threads = 1});
    HarvestState parallel = snowball(seeds, provider, {.max_depth = 2, .threads = 4});
    save_state(sequential, (dir / "seq").string());
    save_state(parallel, (dir / "par").string());
    for (const char* file : {"records.jsonl", "edges.csv", "meta.json"}) {
        CHECK(slurp(dir / "seq" / file) == slurp(dir / "par" / file));
    }
}

TEST_CASE("snowball validates its preconditions") {
    MapProvider provider;
    CHECK_THROWS_AS(snowball({}, provider, {.max_depth = 2}), ConfigError);
    CHECK_THROWS_AS(snowball({seed("A")}, provider, {.max_depth = 0}), ConfigError);
}
