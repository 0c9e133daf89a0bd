#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace citegraph {

/// One bibliographic item. `id` is the canonical identifier; `depth` is the
/// minimal snowball distance to any seed record (0 for seeds).
struct PaperRecord {
    std::string id;
    std::string title;
    std::optional<int> year;
    std::vector<std::string> raw_ids;       // sorted, unique
    std::vector<std::string> seed_queries;  // sorted, unique; non-empty iff depth == 0 in a seed corpus
    int depth = 0;
};

/// A record as it arrives from a provider or a record file, before
/// canonicalization.
struct RawRecord {
    std::string provider_id;  // may be empty
    std::string title;
    std::optional<int> year;
    std::vector<std::string> extra_ids;
};

/// One keyword request: a label, a result-size cap and the file of records
/// the request resolved to.
struct SeedSpec {
    std::string query_label;
    std::string record_file;
    int max_results = 200;
};

/// Manually curated exclusions. Entries match either a canonical id or a
/// normalized-title key; applying the list twice equals applying it once.
struct ExclusionList {
    std::set<std::string> entries;
    std::map<std::string, std::string> reasons;  // optional, keyed by entry

    bool matches(const PaperRecord& record) const;
};

struct CorpusResult {
    std::vector<PaperRecord> records;  // sorted by id
    std::vector<std::string> warnings;
};

/// Canonical identity: the provider id when present, otherwise the
/// normalized-title + year key. Throws ConfigError when neither is available.
std::string canonical_id(const RawRecord& raw);

/// Canonicalizes a raw record into a PaperRecord with depth 0 and no queries.
PaperRecord canonicalize(const RawRecord& raw);

/// Merges `other` into `base`: union of raw_ids and seed_queries, keeps the
/// smaller depth, fills missing title/year.
void merge_record(PaperRecord& base, const PaperRecord& other);

/// Union of per-query results, deduplicated by canonical id with seed_queries
/// merged, exclusions removed. Every returned record has depth 0. A query
/// resolving to zero records or an exclusion entry matching nothing produces
/// a warning, not a failure. A query resolving to more than max_results
/// records violates its cap and throws ConfigError.
CorpusResult build_seed_corpus(const std::vector<SeedSpec>& specs, const ExclusionList& exclusions);

// --- record / exclusion file IO (JSON Lines; see README for field names) ---

std::vector<PaperRecord> read_records_jsonl(const std::string& path);
std::vector<PaperRecord> parse_records_jsonl(const std::string& content, const std::string& origin);
void write_records_jsonl(const std::string& path, const std::vector<PaperRecord>& records);
std::string record_to_json_line(const PaperRecord& record);

/// One key per line, `#` starts a comment, blank lines ignored.
ExclusionList read_exclusion_file(const std::string& path);

}  // namespace citegraph
