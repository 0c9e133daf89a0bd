#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "citegraph/corpus.hpp"

namespace citegraph {

/// Behavioral interface: given a canonical id, returns the records citing
/// that paper. Implementations must be safe for concurrent read requests.
class CitationProvider {
public:
    virtual ~CitationProvider() = default;
    virtual std::vector<PaperRecord> citers(const std::string& id) const = 0;
    virtual std::string name() const = 0;
};

/// Reads per-id citing lists from a directory: <dir>/<sanitized-id>.jsonl,
/// one JSON record per line. This is also the on-disk cache layout, so a
/// cache directory can be replayed as a fixture bit-exactly.
class FixtureProvider : public CitationProvider {
public:
    explicit FixtureProvider(std::string dir);
    std::vector<PaperRecord> citers(const std::string& id) const override;
    std::string name() const override { return "fixture"; }

private:
    std::string dir_;
};

/// Token bucket; acquire() blocks until a token is available. The clock and
/// sleeper are injectable so the arithmetic is testable without real waits.
class RateLimiter {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    RateLimiter(double requests_per_second, double burst = 1.0);
    void set_clock(Clock clock, Sleeper sleeper);
    void acquire();

private:
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
    Clock clock_;
    Sleeper sleeper_;
};

/// Client for an OpenAlex-style bibliographic HTTP API with a cited-by
/// filter: GET <base>/works?filter=cites:<id>&per-page=N&cursor=C returning
/// {"results": [...], "meta": {"next_cursor": ...}}. An API key is read from
/// the CITEGRAPH_API_KEY environment variable and passed as a query
/// parameter. Requests are rate limited through the shared RateLimiter.
class HttpApiProvider : public CitationProvider {
public:
    explicit HttpApiProvider(std::string base_url, double requests_per_second = 5.0,
                             int per_page = 200);
    ~HttpApiProvider() override;
    std::vector<PaperRecord> citers(const std::string& id) const override;
    std::string name() const override { return "api"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Wraps a backend with a mandatory on-disk response cache keyed by
/// (provider name, id). A hit never touches the backend, which makes
/// responses stable within one harvest run even if the backend changes.
class CachingProvider : public CitationProvider {
public:
    CachingProvider(std::shared_ptr<CitationProvider> backend, std::string cache_dir);
    std::vector<PaperRecord> citers(const std::string& id) const override;
    std::string name() const override;

private:
    std::shared_ptr<CitationProvider> backend_;
    std::string dir_;
    mutable std::mutex write_mutex_;
};

/// Parses "fixture:<dir>" or "api:<base-url>" into a provider, wrapping it in
/// a cache when cache_dir is non-empty.
std::shared_ptr<CitationProvider> make_provider(const std::string& spec,
                                                const std::string& cache_dir = "",
                                                double requests_per_second = 5.0);

}  // namespace citegraph
