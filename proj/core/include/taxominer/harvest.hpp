#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "taxominer/errors.hpp"
#include "taxominer/matcher.hpp"

namespace taxominer {

struct Event {
    std::string id;
    std::string title;
    int year = 0;
    std::string format;    // jeopardy | attack-defense | hack-quest
    std::string location;  // remote | onsite
};

struct Task {
    std::string id;
    std::string event_id;
    std::string name;
};

struct WriteupRef {
    std::string id;
    std::string task_id;
    std::optional<std::string> inline_body;
    std::optional<std::string> external_url;
};

struct CatalogSnapshot {
    std::vector<Event> events;
    std::vector<Task> tasks;
    std::vector<WriteupRef> writeups;
    std::vector<std::string> warnings;  // malformed pages, skipped and logged
};

struct ResolvedDocument {
    std::string writeup_id;
    RawDocument::SourceKind chosen_source = RawDocument::SourceKind::inline_text;
    RawDocument raw;
    long long keyword_hits_inline = 0;
    long long keyword_hits_external = 0;
};

struct Skipped {
    std::string reason;
};

using ResolveOutcome = std::variant<ResolvedDocument, Skipped>;

struct HttpResponse {
    int status = 0;
    std::string body;
};

struct TransportError : IoError {
    using IoError::IoError;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

// Serves URLs from a directory; map.json inside the root maps URLs to
// relative file paths. Records every request for test assertions and can
// simulate transient failures ("fail_first" in a map entry).
class FixtureTransport final : public Transport {
public:
    explicit FixtureTransport(const std::string& root_dir);
    HttpResponse get(const std::string& url) override;

    const std::vector<std::string>& call_log() const { return call_log_; }
    void clear_call_log() { call_log_.clear(); }

private:
    struct Entry {
        std::string path;
        int fail_first = 0;  // remaining simulated transient failures
    };
    std::string root_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> call_log_;
    std::mutex mutex_;
};

// Live GET-only transport (cpp-httplib) with a custom user agent and an
// optional robots.txt policy.
class HttpTransport final : public Transport {
public:
    struct Options {
        std::string user_agent = "taxominer/0.1 (research corpus tool)";
        bool honor_robots = true;
        int timeout_seconds = 30;
    };
    HttpTransport();
    explicit HttpTransport(Options options);
    ~HttpTransport() override;
    HttpResponse get(const std::string& url) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Token bucket; clock and sleep are injectable so tests run instantly.
class RateLimiter {
public:
    using NowFn = std::function<double()>;            // seconds
    using SleepFn = std::function<void(double)>;      // seconds

    explicit RateLimiter(double requests_per_second);
    RateLimiter(double requests_per_second, NowFn now, SleepFn sleep);

    void acquire();

private:
    double rate_;
    double tokens_;
    double last_refill_;
    NowFn now_;
    SleepFn sleep_;
    std::mutex mutex_;
};

struct HarvestConfig {
    std::string base_url;
    int year_from = 0;
    int year_to = 0;
    double rate_limit = 1.0;            // requests per second
    std::vector<std::string> allowlist; // external hosts we may fetch from
    int max_retries = 3;
    int concurrency = 4;
    std::size_t min_length = 2;         // clean_document threshold
};

// Enumerates events -> tasks -> writeup refs from the catalog's JSON
// endpoints for the configured year range.
CatalogSnapshot crawl_catalog(Transport& transport, RateLimiter& limiter,
                              const HarvestConfig& config);

// The three resolution cases: inline only, external only (allowlisted and
// containing at least one keyword), or both (keep the side with more
// keyword hits, ties to inline).
ResolveOutcome resolve_writeup(const WriteupRef& ref, Transport& transport,
                               RateLimiter& limiter, const CompiledMatcher& matcher,
                               const HarvestConfig& config);

struct ManifestEntry {
    std::string status;  // "fetched" | "skipped"
    std::string reason;  // for skipped
    std::string content_hash;
    std::string path;    // relative corpus path for fetched docs
    std::string timestamp;
};

// Append-only record of processed writeups; persisted as JSON and written
// atomically (temp file + rename).
class HarvestManifest {
public:
    static HarvestManifest load(const std::string& path);

    bool contains(const std::string& writeup_id) const;
    void record(const std::string& writeup_id, ManifestEntry entry);
    void save() const;

    const std::map<std::string, ManifestEntry>& entries() const { return entries_; }

private:
    std::string path_;
    std::map<std::string, ManifestEntry> entries_;
};

struct HarvestStats {
    std::size_t fetched = 0;
    std::size_t skipped = 0;
    std::size_t already_done = 0;
};

// End-to-end run: crawl, resolve every new writeup, clean, store under
// out_root/corpus/<year>/<format>/, update the manifest.
HarvestStats run_harvest(Transport& transport, RateLimiter& limiter,
                         const CompiledMatcher& matcher, const HarvestConfig& config,
                         const std::string& out_root,
                         std::vector<std::string>* log = nullptr);

std::string fnv1a_hex(std::string_view data);
bool host_allowlisted(const std::string& url, const std::vector<std::string>& allowlist);

}  // namespace taxominer
