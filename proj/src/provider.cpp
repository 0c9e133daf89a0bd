#include "citegraph/provider.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "citegraph/http.hpp"

#include "citegraph/errors.hpp"
#include "citegraph/text.hpp"

namespace fs = std::filesystem;

namespace citegraph {

namespace {

std::string citers_file(const std::string& dir, const std::string& id) {
    return (fs::path(dir) / (sanitize_for_filename(id) + ".jsonl")).string();
}

std::vector<PaperRecord> parse_citers_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProviderError("cannot open citing list: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_records_jsonl(buf.str(), path);
    } catch (const ConfigError& e) {
        throw ProviderError(e.what());
    }
}

void write_citers_file(const std::string& path, const std::vector<PaperRecord>& records) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ProviderError("cannot write cache file: " + tmp);
        for (const auto& rec : records) out << record_to_json_line(rec) << '\n';
    }
    fs::rename(tmp, path);
}

}  // namespace

FixtureProvider::FixtureProvider(std::string dir) : dir_(std::move(dir)) {
    if (!fs::is_directory(dir_)) throw ProviderError("fixture directory not found: " + dir_);
}

std::vector<PaperRecord> FixtureProvider::citers(const std::string& id) const {
    return parse_citers_file(citers_file(dir_, id));
}

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second),
      burst_(burst < 1.0 ? 1.0 : burst),
      tokens_(burst_),
      last_(std::chrono::steady_clock::now()),
      clock_([] { return std::chrono::steady_clock::now(); }),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

void RateLimiter::set_clock(Clock clock, Sleeper sleeper) {
    clock_ = std::move(clock);
    sleeper_ = std::move(sleeper);
    last_ = clock_();
}

void RateLimiter::acquire() {
    if (rate_ <= 0) return;  // unlimited
    std::unique_lock lock(mutex_);
    for (;;) {
        auto now = clock_();
        double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        auto wait = std::chrono::milliseconds(
            static_cast<long>((1.0 - tokens_) / rate_ * 1000.0) + 1);
        lock.unlock();
        sleeper_(wait);
        lock.lock();
    }
}

struct HttpApiProvider::Impl {
    std::string host;       // scheme://authority
    std::string base_path;  // path prefix, no trailing slash
    std::string api_key;
    int per_page;
    mutable RateLimiter limiter;

    Impl(double rps, int pp) : per_page(pp), limiter(rps) {}
};

HttpApiProvider::HttpApiProvider(std::string base_url, double requests_per_second, int per_page)
    : impl_(std::make_unique<Impl>(requests_per_second, per_page)) {
    // Split scheme://host[:port] from the path prefix.
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ProviderError("api base url must include a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        impl_->host = base_url;
    } else {
        impl_->host = base_url.substr(0, path_start);
        impl_->base_path = base_url.substr(path_start);
        while (!impl_->base_path.empty() && impl_->base_path.back() == '/') {
            impl_->base_path.pop_back();
        }
    }
    if (const char* key = std::getenv("CITEGRAPH_API_KEY")) impl_->api_key = key;
}

HttpApiProvider::~HttpApiProvider() = default;

std::vector<PaperRecord> HttpApiProvider::citers(const std::string& id) const {
    std::vector<PaperRecord> all;
    std::string cursor = "*";
    httplib::Client client(impl_->host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    while (!cursor.empty()) {
        impl_->limiter.acquire();
        std::string path = impl_->base_path + "/works?filter=cites:" + httplib::detail::encode_url(id) +
                           "&per-page=" + std::to_string(impl_->per_page) +
                           "&cursor=" + httplib::detail::encode_url(cursor);
        if (!impl_->api_key.empty()) path += "&api_key=" + httplib::detail::encode_url(impl_->api_key);
        auto res = client.Get(path);
        if (!res) {
            throw ProviderError("api request failed for " + id + ": " +
                                httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw ProviderError("api request for " + id + " returned status " +
                                std::to_string(res->status));
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw ProviderError("api response for " + id + " is not valid JSON: " + e.what());
        }
        if (!j.contains("results") || !j["results"].is_array()) {
            throw ProviderError("api response for " + id + " has no results array");
        }
        for (const auto& item : j["results"]) {
            RawRecord raw;
            if (item.contains("id") && item["id"].is_string()) {
                raw.provider_id = item["id"].get<std::string>();
            }
            if (item.contains("title") && item["title"].is_string()) {
                raw.title = item["title"].get<std::string>();
            } else if (item.contains("display_name") && item["display_name"].is_string()) {
                raw.title = item["display_name"].get<std::string>();
            }
            if (item.contains("publication_year") && item["publication_year"].is_number_integer()) {
                raw.year = item["publication_year"].get<int>();
            } else if (item.contains("year") && item["year"].is_number_integer()) {
                raw.year = item["year"].get<int>();
            }
            try {
                all.push_back(canonicalize(raw));
            } catch (const ConfigError&) {
                // Provider rows with neither id nor title are unusable; skip.
            }
        }
        cursor.clear();
        if (j.contains("meta") && j["meta"].contains("next_cursor") &&
            j["meta"]["next_cursor"].is_string()) {
            cursor = j["meta"]["next_cursor"].get<std::string>();
        }
    }
    return all;
}

CachingProvider::CachingProvider(std::shared_ptr<CitationProvider> backend, std::string cache_dir)
    : backend_(std::move(backend)), dir_(std::move(cache_dir)) {
    fs::create_directories(fs::path(dir_) / backend_->name());
}

std::string CachingProvider::name() const { return backend_->name(); }

std::vector<PaperRecord> CachingProvider::citers(const std::string& id) const {
    std::string path = citers_file((fs::path(dir_) / backend_->name()).string(), id);
    if (fs::exists(path)) return parse_citers_file(path);
    std::vector<PaperRecord> fresh = backend_->citers(id);
    {
        std::lock_guard lock(write_mutex_);
        if (!fs::exists(path)) write_citers_file(path, fresh);
    }
    return fresh;
}

std::shared_ptr<CitationProvider> make_provider(const std::string& spec,
                                                const std::string& cache_dir,
                                                double requests_per_second) {
    std::shared_ptr<CitationProvider> backend;
    if (spec.rfind("fixture:", 0) == 0) {
        backend = std::make_shared<FixtureProvider>(spec.substr(8));
    } else if (spec.rfind("api:", 0) == 0) {
        backend = std::make_shared<HttpApiProvider>(spec.substr(4), requests_per_second);
    } else {
        throw ConfigError("provider spec must be fixture:<dir> or api:<base-url>, got: " + spec);
    }
    if (!cache_dir.empty()) return std::make_shared<CachingProvider>(backend, cache_dir);
    return backend;
}

}  // namespace citegraph
