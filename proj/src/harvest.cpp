#include "citegraph/harvest.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "citegraph/errors.hpp"
#include "citegraph/text.hpp"

namespace fs = std::filesystem;

namespace citegraph {

namespace {

uint64_t pack_edge(int citing, int cited) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(citing)) << 32) |
           static_cast<uint32_t>(cited);
}

}  // namespace

int HarvestState::add_or_merge(const PaperRecord& record) {
    auto it = index_.find(record.id);
    if (it != index_.end()) {
        merge_record(records_[it->second], record);
        return it->second;
    }
    int idx = static_cast<int>(records_.size());
    index_.emplace(record.id, idx);
    records_.push_back(record);
    return idx;
}

bool HarvestState::add_edge(const std::string& citing, const std::string& cited) {
    if (citing == cited) return false;
    auto u = index_.find(citing);
    auto v = index_.find(cited);
    if (u == index_.end() || v == index_.end()) {
        throw AnalysisError("edge endpoint not in record set: " +
                            (u == index_.end() ? citing : cited));
    }
    return edges_.insert(pack_edge(u->second, v->second)).second;
}

bool HarvestState::has_edge(const std::string& citing, const std::string& cited) const {
    auto u = index_.find(citing);
    auto v = index_.find(cited);
    if (u == index_.end() || v == index_.end()) return false;
    return edges_.count(pack_edge(u->second, v->second)) > 0;
}

const PaperRecord* HarvestState::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<std::pair<std::string, std::string>> HarvestState::sorted_edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges_.size());
    for (uint64_t packed : edges_) {
        out.emplace_back(records_[packed >> 32].id, records_[packed & 0xFFFFFFFFu].id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Fetches citers for one id with bounded retries. Any failure ends up in the
// failed report rather than escaping a worker thread.
std::vector<PaperRecord> fetch_with_retries(const CitationProvider& provider,
                                            const std::string& id, const SnowballOptions& opts,
                                            bool& failed) {
    failed = false;
    for (int attempt = 0; attempt <= opts.retries; ++attempt) {
        try {
            return provider.citers(id);
        } catch (const std::exception&) {
            if (attempt == opts.retries) {
                failed = true;
                return {};
            }
            if (opts.retry_delay_ms > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(opts.retry_delay_ms));
            }
        }
    }
    return {};
}

// Propagates seed-query labels from cited to citing papers until a fixed
// point: a paper inherits the union of the labels of every paper it was
// observed citing.
void propagate_provenance(HarvestState& state) {
    auto& records = state.records();
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(records.size()); ++i) index[records[i].id] = i;

    std::vector<std::vector<int>> citers_of(records.size());
    for (const auto& [citing, cited] : state.sorted_edges()) {
        citers_of[index[cited]].push_back(index[citing]);
    }

    std::deque<int> work;
    for (int i = 0; i < static_cast<int>(records.size()); ++i) {
        if (!records[i].seed_queries.empty()) work.push_back(i);
    }
    std::vector<bool> queued(records.size(), false);
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        queued[v] = false;
        for (int u : citers_of[v]) {
            auto& target = records[u].seed_queries;
            size_t before = target.size();
            std::vector<std::string> merged;
            std::set_union(target.begin(), target.end(), records[v].seed_queries.begin(),
                           records[v].seed_queries.end(), std::back_inserter(merged));
            if (merged.size() != before) {
                target = std::move(merged);
                if (!queued[u]) {
                    queued[u] = true;
                    work.push_back(u);
                }
            }
        }
    }
}

}  // namespace

HarvestState snowball(const std::vector<PaperRecord>& seeds, const CitationProvider& provider,
                      const SnowballOptions& opts) {
    if (opts.max_depth < 1) throw ConfigError("snowball: max_depth must be >= 1");
    if (seeds.empty()) throw ConfigError("snowball: seed set is empty");

    HarvestState state;
    std::vector<std::string> frontier;
    for (const auto& seed : seeds) {
        PaperRecord rec = seed;
        rec.depth = 0;
        state.add_or_merge(rec);
    }
    for (const auto& rec : state.records()) frontier.push_back(rec.id);
    std::sort(frontier.begin(), frontier.end());

    std::unordered_set<std::string> failed;
    bool budget_hit = false;

    for (int depth = 1; depth <= opts.max_depth && !frontier.empty() && !budget_hit; ++depth) {
        // Fetch the whole frontier (possibly concurrently), then merge the
        // results sequentially in sorted-id order so runs are reproducible.
        std::vector<std::vector<PaperRecord>> fetched(frontier.size());
        std::vector<char> fetch_failed(frontier.size(), 0);
        if (opts.threads > 1) {
            std::atomic<size_t> next{0};
            auto worker = [&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= frontier.size()) return;
                    bool f = false;
                    fetched[i] = fetch_with_retries(provider, frontier[i], opts, f);
                    fetch_failed[i] = f ? 1 : 0;
                }
            };
            std::vector<std::thread> pool;
            int n_threads = std::min<int>(opts.threads, static_cast<int>(frontier.size()));
            for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        } else {
            for (size_t i = 0; i < frontier.size(); ++i) {
                bool f = false;
                fetched[i] = fetch_with_retries(provider, frontier[i], opts, f);
                fetch_failed[i] = f ? 1 : 0;
            }
        }

        std::vector<std::string> next_frontier;
        for (size_t i = 0; i < frontier.size(); ++i) {
            if (fetch_failed[i]) {
                failed.insert(frontier[i]);
                continue;
            }
            const std::string& target = frontier[i];
            for (const auto& citer : fetched[i]) {
                if (citer.id == target) continue;  // self-citation, dropped
                bool known = state.find(citer.id) != nullptr;
                if (!known && opts.node_budget > 0 &&
                    state.records().size() >= opts.node_budget) {
                    budget_hit = true;
                    continue;
                }
                PaperRecord rec = citer;
                rec.depth = depth;
                rec.seed_queries.clear();  // provenance comes from propagation only
                state.add_or_merge(rec);
                state.add_edge(citer.id, target);
                if (!known) next_frontier.push_back(citer.id);
            }
        }
        state.depth_reached = depth;
        std::sort(next_frontier.begin(), next_frontier.end());
        next_frontier.erase(std::unique(next_frontier.begin(), next_frontier.end()),
                            next_frontier.end());
        frontier = std::move(next_frontier);
    }

    state.partial = budget_hit;
    state.failed_ids.assign(failed.begin(), failed.end());
    std::sort(state.failed_ids.begin(), state.failed_ids.end());
    propagate_provenance(state);
    return state;
}

std::vector<ClosureViolation> depth1_closure_check(const HarvestState& state,
                                                   const CitationProvider& provider) {
    std::vector<ClosureViolation> violations;
    std::vector<const PaperRecord*> shallow;
    for (const auto& rec : state.records()) {
        if (rec.depth <= 1) shallow.push_back(&rec);
    }
    std::sort(shallow.begin(), shallow.end(),
              [](const PaperRecord* a, const PaperRecord* b) { return a->id < b->id; });
    for (const PaperRecord* cited : shallow) {
        std::vector<PaperRecord> citers;
        try {
            citers = provider.citers(cited->id);
        } catch (const ProviderError&) {
            continue;  // diagnostic only; unreachable ids are reported by snowball
        }
        for (const auto& citer : citers) {
            if (citer.id == cited->id) continue;
            const PaperRecord* known = state.find(citer.id);
            if (known && known->depth <= 1 && !state.has_edge(citer.id, cited->id)) {
                violations.push_back({citer.id, cited->id});
            }
        }
    }
    return violations;
}

void save_state(const HarvestState& state, const std::string& dir) {
    fs::create_directories(dir);
    std::vector<PaperRecord> records = state.records();
    std::sort(records.begin(), records.end(),
              [](const PaperRecord& a, const PaperRecord& b) { return a.id < b.id; });
    write_records_jsonl((fs::path(dir) / "records.jsonl").string(), records);

    {
        std::ofstream out(fs::path(dir) / "edges.csv", std::ios::binary);
        if (!out) throw AnalysisError("cannot write edges.csv in " + dir);
        out << "citing_id,cited_id\n";
        for (const auto& [citing, cited] : state.sorted_edges()) {
            out << csv_escape(citing) << ',' << csv_escape(cited) << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "failed.txt", std::ios::binary);
        for (const auto& id : state.failed_ids) out << id << '\n';
    }
    {
        nlohmann::ordered_json meta;
        meta["depth_reached"] = state.depth_reached;
        meta["partial"] = state.partial;
        meta["nodes"] = state.records().size();
        meta["edges"] = state.edge_count();
        meta["failed"] = state.failed_ids.size();
        std::ofstream out(fs::path(dir) / "meta.json", std::ios::binary);
        out << meta.dump(2) << '\n';
    }
}

HarvestState load_state(const std::string& dir) {
    HarvestState state;
    auto records = read_records_jsonl((fs::path(dir) / "records.jsonl").string());
    for (const auto& rec : records) state.add_or_merge(rec);

    std::ifstream in(fs::path(dir) / "edges.csv", std::ios::binary);
    if (!in) throw AnalysisError("cannot open edges.csv in " + dir);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = csv_split_line(line);
        if (fields.size() < 2) throw AnalysisError("bad edge row in " + dir + ": " + line);
        state.add_edge(fields[0], fields[1]);
    }

    std::ifstream failed(fs::path(dir) / "failed.txt", std::ios::binary);
    if (failed) {
        while (std::getline(failed, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) state.failed_ids.push_back(line);
        }
    }

    std::ifstream meta_in(fs::path(dir) / "meta.json", std::ios::binary);
    if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
        if (!meta.is_discarded()) {
            if (meta.contains("depth_reached")) state.depth_reached = meta["depth_reached"];
            if (meta.contains("partial")) state.partial = meta["partial"];
        }
    }
    return state;
}

CitationGraph state_to_graph(const HarvestState& state) {
    return build_graph(state.records(), state.sorted_edges());
}

}  // namespace citegraph
