#include "citegraph/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "citegraph/errors.hpp"
#include "citegraph/text.hpp"

namespace citegraph {

namespace {

void insert_sorted_unique(std::vector<std::string>& v, const std::string& s) {
    auto it = std::lower_bound(v.begin(), v.end(), s);
    if (it == v.end() || *it != s) v.insert(it, s);
}

}  // namespace

bool ExclusionList::matches(const PaperRecord& record) const {
    if (entries.count(record.id)) return true;
    std::string key = title_key(record.title, record.year);
    return !key.empty() && entries.count(key) > 0;
}

std::string canonical_id(const RawRecord& raw) {
    if (!raw.provider_id.empty()) return raw.provider_id;
    std::string key = title_key(raw.title, raw.year);
    if (key.empty()) {
        throw ConfigError("record rejected: no provider id and empty title");
    }
    return key;
}

PaperRecord canonicalize(const RawRecord& raw) {
    PaperRecord rec;
    rec.id = canonical_id(raw);
    rec.title = raw.title;
    rec.year = raw.year;
    if (!raw.provider_id.empty()) insert_sorted_unique(rec.raw_ids, raw.provider_id);
    for (const auto& extra : raw.extra_ids) {
        if (!extra.empty()) insert_sorted_unique(rec.raw_ids, extra);
    }
    return rec;
}

void merge_record(PaperRecord& base, const PaperRecord& other) {
    for (const auto& rid : other.raw_ids) insert_sorted_unique(base.raw_ids, rid);
    for (const auto& q : other.seed_queries) insert_sorted_unique(base.seed_queries, q);
    base.depth = std::min(base.depth, other.depth);
    if (base.title.empty()) base.title = other.title;
    if (!base.year) base.year = other.year;
}

CorpusResult build_seed_corpus(const std::vector<SeedSpec>& specs, const ExclusionList& exclusions) {
    CorpusResult result;
    std::map<std::string, PaperRecord> by_id;
    for (const auto& spec : specs) {
        std::vector<PaperRecord> records = read_records_jsonl(spec.record_file);
        if (static_cast<int>(records.size()) > spec.max_results) {
            throw ConfigError("seed query '" + spec.query_label + "' resolves to " +
                              std::to_string(records.size()) + " records, above its cap of " +
                              std::to_string(spec.max_results));
        }
        if (records.empty()) {
            result.warnings.push_back("seed query '" + spec.query_label +
                                      "' resolved to zero records");
        }
        for (auto& rec : records) {
            rec.depth = 0;
            insert_sorted_unique(rec.seed_queries, spec.query_label);
            auto [it, inserted] = by_id.try_emplace(rec.id, rec);
            if (!inserted) merge_record(it->second, rec);
        }
    }

    std::set<std::string> matched_entries;
    for (auto it = by_id.begin(); it != by_id.end();) {
        const PaperRecord& rec = it->second;
        if (exclusions.matches(rec)) {
            if (exclusions.entries.count(rec.id)) matched_entries.insert(rec.id);
            std::string key = title_key(rec.title, rec.year);
            if (!key.empty() && exclusions.entries.count(key)) matched_entries.insert(key);
            it = by_id.erase(it);
        } else {
            ++it;
        }
    }
    for (const auto& entry : exclusions.entries) {
        if (!matched_entries.count(entry)) {
            result.warnings.push_back("exclusion entry '" + entry + "' matched no record");
        }
    }

    result.records.reserve(by_id.size());
    for (auto& [id, rec] : by_id) result.records.push_back(std::move(rec));
    return result;
}

std::vector<PaperRecord> parse_records_jsonl(const std::string& content, const std::string& origin) {
    std::vector<PaperRecord> records;
    std::istringstream in(content);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": bad JSON: " + e.what());
        }
        RawRecord raw;
        if (j.contains("id") && j["id"].is_string()) raw.provider_id = j["id"].get<std::string>();
        if (j.contains("title") && j["title"].is_string()) raw.title = j["title"].get<std::string>();
        if (j.contains("year") && j["year"].is_number_integer()) raw.year = j["year"].get<int>();
        if (j.contains("raw_ids") && j["raw_ids"].is_array()) {
            for (const auto& rid : j["raw_ids"]) {
                if (rid.is_string()) raw.extra_ids.push_back(rid.get<std::string>());
            }
        }
        PaperRecord rec;
        try {
            rec = canonicalize(raw);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (j.contains("seed_queries") && j["seed_queries"].is_array()) {
            for (const auto& q : j["seed_queries"]) {
                if (q.is_string()) insert_sorted_unique(rec.seed_queries, q.get<std::string>());
            }
        }
        if (j.contains("depth") && j["depth"].is_number_integer()) rec.depth = j["depth"].get<int>();
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PaperRecord> read_records_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open record file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_records_jsonl(buf.str(), path);
}

std::string record_to_json_line(const PaperRecord& record) {
    nlohmann::ordered_json j;
    j["id"] = record.id;
    j["title"] = record.title;
    if (record.year) j["year"] = *record.year;
    else j["year"] = nullptr;
    j["raw_ids"] = record.raw_ids;
    j["seed_queries"] = record.seed_queries;
    j["depth"] = record.depth;
    return j.dump();
}

void write_records_jsonl(const std::string& path, const std::vector<PaperRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write record file: " + path);
    for (const auto& rec : records) out << record_to_json_line(rec) << '\n';
}

ExclusionList read_exclusion_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open exclusion file: " + path);
    ExclusionList list;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        std::string key = hash == std::string::npos ? line : line.substr(0, hash);
        std::string reason = hash == std::string::npos ? "" : line.substr(hash + 1);
        auto begin = key.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto end = key.find_last_not_of(" \t\r");
        key = key.substr(begin, end - begin + 1);
        list.entries.insert(key);
        if (!reason.empty()) {
            auto rb = reason.find_first_not_of(" \t");
            if (rb != std::string::npos) {
                auto re = reason.find_last_not_of(" \t\r");
                list.reasons[key] = reason.substr(rb, re - rb + 1);
            }
        }
    }
    return list;
}

}  // namespace citegraph
