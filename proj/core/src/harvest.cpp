#include "taxominer/harvest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "taxominer/corpus.hpp"
#include "taxominer/textprep.hpp"

namespace taxominer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UrlParts {
    std::string scheme;
    std::string host;
    std::string origin;  // scheme://host[:port]
    std::string path;    // path + query, starts with '/'
};

std::optional<UrlParts> parse_url(const std::string& url) {
    auto sep = url.find("://");
    if (sep == std::string::npos) return std::nullopt;
    UrlParts parts;
    parts.scheme = url.substr(0, sep);
    auto rest = url.substr(sep + 3);
    auto slash = rest.find('/');
    std::string hostport = (slash == std::string::npos) ? rest : rest.substr(0, slash);
    parts.path = (slash == std::string::npos) ? "/" : rest.substr(slash);
    auto colon = hostport.find(':');
    parts.host = (colon == std::string::npos) ? hostport : hostport.substr(0, colon);
    parts.origin = parts.scheme + "://" + hostport;
    return parts;
}

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string canonical_format_tag(const std::string& format) {
    std::string f = fold_case(format);
    std::replace(f.begin(), f.end(), '_', '-');
    if (f == "jeopardy" || f == "hack-quest") return "jeopardy";
    if (f == "attack-defense") return "attack-defense";
    throw InputError("unknown event format tag \"" + format + "\"");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool host_allowlisted(const std::string& url, const std::vector<std::string>& allowlist) {
    auto parts = parse_url(url);
    if (!parts) return false;
    std::string host = fold_case(parts->host);
    for (const std::string& allowed : allowlist) {
        std::string a = fold_case(allowed);
        if (host == a) return true;
        // subdomains of an allowlisted host count as well
        if (host.size() > a.size() && host.ends_with("." + a)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// FixtureTransport
// ---------------------------------------------------------------------------

FixtureTransport::FixtureTransport(const std::string& root_dir) : root_(root_dir) {
    fs::path map_path = fs::path(root_) / "map.json";
    json map;
    try {
        map = json::parse(read_file(map_path));
    } catch (const json::exception& e) {
        throw IoError("fixture map " + map_path.string() + " is invalid: " + e.what());
    }
    for (auto& [url, value] : map.items()) {
        Entry entry;
        if (value.is_string()) {
            entry.path = value.get<std::string>();
        } else {
            entry.path = value.at("path").get<std::string>();
            entry.fail_first = value.value("fail_first", 0);
        }
        entries_[url] = std::move(entry);
    }
}

HttpResponse FixtureTransport::get(const std::string& url) {
    std::lock_guard lock(mutex_);
    call_log_.push_back(url);
    auto it = entries_.find(url);
    if (it == entries_.end()) return {404, ""};
    if (it->second.fail_first > 0) {
        --it->second.fail_first;
        throw TransportError("simulated transient failure for " + url);
    }
    return {200, read_file(fs::path(root_) / it->second.path)};
}

// ---------------------------------------------------------------------------
// HttpTransport
// ---------------------------------------------------------------------------

struct HttpTransport::Impl {
    Options options;
    // host -> disallowed path prefixes for User-agent: *
    std::unordered_map<std::string, std::vector<std::string>> robots;
    std::mutex mutex;

    httplib::Result do_get(const UrlParts& parts, const std::string& path) {
        httplib::Client client(parts.origin);
        client.set_follow_location(true);
        client.set_connection_timeout(options.timeout_seconds);
        client.set_read_timeout(options.timeout_seconds);
        httplib::Headers headers{{"User-Agent", options.user_agent}};
        return client.Get(path, headers);
    }

    const std::vector<std::string>& disallowed_for(const UrlParts& parts) {
        std::lock_guard lock(mutex);
        auto it = robots.find(parts.origin);
        if (it != robots.end()) return it->second;
        std::vector<std::string> rules;
        if (auto res = do_get(parts, "/robots.txt"); res && res->status == 200) {
            bool star_block = false;
            std::istringstream in(res->body);
            std::string line;
            while (std::getline(in, line)) {
                if (auto hash = line.find('#'); hash != std::string::npos)
                    line.resize(hash);
                line = trim(line);
                std::string lower = fold_case(line);
                if (lower.rfind("user-agent:", 0) == 0)
                    star_block = trim(line.substr(11)) == "*";
                else if (star_block && lower.rfind("disallow:", 0) == 0) {
                    std::string prefix = trim(line.substr(9));
                    if (!prefix.empty()) rules.push_back(prefix);
                }
            }
        }
        return robots.emplace(parts.origin, std::move(rules)).first->second;
    }
};

HttpTransport::HttpTransport() : HttpTransport(Options{}) {}

HttpTransport::HttpTransport(Options options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
}

HttpTransport::~HttpTransport() = default;

HttpResponse HttpTransport::get(const std::string& url) {
    auto parts = parse_url(url);
    if (!parts) throw TransportError("malformed URL: " + url);
    if (impl_->options.honor_robots)
        for (const std::string& prefix : impl_->disallowed_for(*parts))
            if (parts->path.rfind(prefix, 0) == 0)
                throw TransportError("blocked by robots.txt: " + url);

    auto res = impl_->do_get(*parts, parts->path);
    if (!res)
        throw TransportError("request failed for " + url + ": " +
                             httplib::to_string(res.error()));
    return {res->status, res->body};
}

// ---------------------------------------------------------------------------
// RateLimiter
// ---------------------------------------------------------------------------

namespace {

double monotonic_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void real_sleep(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

RateLimiter::RateLimiter(double requests_per_second)
    : RateLimiter(requests_per_second, monotonic_seconds, real_sleep) {}

RateLimiter::RateLimiter(double requests_per_second, NowFn now, SleepFn sleep)
    : rate_(requests_per_second > 0 ? requests_per_second : 1.0),
      tokens_(0.0),
      last_refill_(-1e18),
      now_(std::move(now)),
      sleep_(std::move(sleep)) {}

void RateLimiter::acquire() {
    // Enforces a minimum spacing of 1/rate between requests, so no one-second
    // window ever holds more than `rate` requests.
    std::lock_guard lock(mutex_);
    double interval = 1.0 / rate_;
    double t = now_();
    double next_free = last_refill_ + interval;
    if (t < next_free) {
        sleep_(next_free - t);
        t = next_free;
    }
    last_refill_ = t;
}

// ---------------------------------------------------------------------------
// Catalog crawling
// ---------------------------------------------------------------------------

namespace {

HttpResponse fetch_with_retries(Transport& transport, RateLimiter& limiter,
                                const std::string& url, int max_retries) {
    double backoff = 0.5;
    for (int attempt = 1;; ++attempt) {
        limiter.acquire();
        try {
            return transport.get(url);
        } catch (const TransportError&) {
            if (attempt >= max_retries) throw;
            real_sleep(backoff * 1e-3);  // token spacing already paces retries
            backoff *= 2.0;
        }
    }
}

std::optional<json> fetch_json(Transport& transport, RateLimiter& limiter,
                               const std::string& url, int max_retries,
                               std::vector<std::string>& warnings) {
    HttpResponse res;
    try {
        res = fetch_with_retries(transport, limiter, url, max_retries);
    } catch (const TransportError& e) {
        warnings.push_back(std::string("fetch failed: ") + e.what());
        return std::nullopt;
    }
    if (res.status != 200) {
        warnings.push_back("HTTP " + std::to_string(res.status) + " for " + url);
        return std::nullopt;
    }
    try {
        return json::parse(res.body);
    } catch (const json::exception& e) {
        warnings.push_back("malformed page " + url + ": " + e.what());
        return std::nullopt;
    }
}

}  // namespace

CatalogSnapshot crawl_catalog(Transport& transport, RateLimiter& limiter,
                              const HarvestConfig& config) {
    if (config.base_url.empty()) throw InputError("crawl_catalog: base_url is empty");
    CatalogSnapshot snapshot;

    for (int year = config.year_from; year <= config.year_to; ++year) {
        std::string url = config.base_url + "/api/events?year=" + std::to_string(year);
        auto page = fetch_json(transport, limiter, url, config.max_retries,
                               snapshot.warnings);
        if (!page) continue;
        if (!page->contains("events") || !(*page)["events"].is_array()) {
            snapshot.warnings.push_back("malformed page " + url +
                                        ": missing \"events\" array");
            continue;
        }
        for (const json& je : (*page)["events"]) {
            try {
                Event ev;
                ev.id = je.at("id").get<std::string>();
                ev.title = je.value("title", std::string{});
                ev.year = je.at("year").get<int>();
                ev.format = je.at("format").get<std::string>();
                ev.location = je.value("location", std::string{"remote"});
                if (ev.year < 2000 || ev.year > 2100) {
                    snapshot.warnings.push_back("event " + ev.id +
                                                " has implausible year, skipped");
                    continue;
                }
                snapshot.events.push_back(std::move(ev));
            } catch (const json::exception& e) {
                snapshot.warnings.push_back("malformed event entry in " + url + ": " +
                                            e.what());
            }
        }
    }

    for (const Event& ev : snapshot.events) {
        std::string url = config.base_url + "/api/event/" + ev.id + "/tasks";
        auto page = fetch_json(transport, limiter, url, config.max_retries,
                               snapshot.warnings);
        if (!page || !page->contains("tasks")) continue;
        for (const json& jt : (*page)["tasks"]) {
            try {
                Task task;
                task.id = jt.at("id").get<std::string>();
                task.event_id = ev.id;
                task.name = jt.value("name", std::string{});
                snapshot.tasks.push_back(std::move(task));
            } catch (const json::exception& e) {
                snapshot.warnings.push_back("malformed task entry in " + url + ": " +
                                            e.what());
            }
        }
    }

    for (const Task& task : snapshot.tasks) {
        std::string url = config.base_url + "/api/task/" + task.id + "/writeups";
        auto page = fetch_json(transport, limiter, url, config.max_retries,
                               snapshot.warnings);
        if (!page || !page->contains("writeups")) continue;
        for (const json& jw : (*page)["writeups"]) {
            try {
                WriteupRef ref;
                ref.id = jw.at("id").get<std::string>();
                ref.task_id = task.id;
                if (jw.contains("body") && jw["body"].is_string())
                    ref.inline_body = jw["body"].get<std::string>();
                if (jw.contains("url") && jw["url"].is_string())
                    ref.external_url = jw["url"].get<std::string>();
                snapshot.writeups.push_back(std::move(ref));
            } catch (const json::exception& e) {
                snapshot.warnings.push_back("malformed writeup entry in " + url + ": " +
                                            e.what());
            }
        }
    }
    return snapshot;
}

// ---------------------------------------------------------------------------
// Writeup resolution
// ---------------------------------------------------------------------------

namespace {

long long keyword_hits(const CompiledMatcher& matcher, const std::string& text) {
    auto cleaned = clean_text(text, 0);
    return matcher.total_hits(tokenize(cleaned ? cleaned->text : std::string{}));
}

}  // namespace

ResolveOutcome resolve_writeup(const WriteupRef& ref, Transport& transport,
                               RateLimiter& limiter, const CompiledMatcher& matcher,
                               const HarvestConfig& config) {
    bool has_inline = ref.inline_body && !trim(*ref.inline_body).empty();
    bool has_external = ref.external_url && !trim(*ref.external_url).empty();

    if (!has_inline && !has_external) return Skipped{"empty"};

    auto make_inline = [&](long long hits_inline, long long hits_external) {
        ResolvedDocument doc;
        doc.writeup_id = ref.id;
        doc.chosen_source = RawDocument::SourceKind::inline_text;
        doc.raw = {*ref.inline_body, RawDocument::SourceKind::inline_text, {}};
        doc.keyword_hits_inline = hits_inline;
        doc.keyword_hits_external = hits_external;
        return doc;
    };

    if (has_inline && !has_external)
        return make_inline(keyword_hits(matcher, *ref.inline_body), 0);

    bool allowed = host_allowlisted(*ref.external_url, config.allowlist);

    if (!has_inline) {  // external only
        if (!allowed) return Skipped{"non-allowlisted host"};
        HttpResponse res;
        try {
            res = fetch_with_retries(transport, limiter, *ref.external_url,
                                     config.max_retries);
        } catch (const TransportError&) {
            return Skipped{"fetch failed"};
        }
        if (res.status != 200) return Skipped{"fetch failed"};
        long long hits = keyword_hits(matcher, res.body);
        if (hits < 1) return Skipped{"no keywords"};
        ResolvedDocument doc;
        doc.writeup_id = ref.id;
        doc.chosen_source = RawDocument::SourceKind::external;
        doc.raw = {res.body, RawDocument::SourceKind::external, *ref.external_url};
        doc.keyword_hits_external = hits;
        return doc;
    }

    // both present
    long long hits_inline = keyword_hits(matcher, *ref.inline_body);
    if (!allowed) return make_inline(hits_inline, 0);
    HttpResponse res;
    try {
        res = fetch_with_retries(transport, limiter, *ref.external_url,
                                 config.max_retries);
    } catch (const TransportError&) {
        return Skipped{"fetch failed"};
    }
    if (res.status != 200) return Skipped{"fetch failed"};
    long long hits_external = keyword_hits(matcher, res.body);
    if (hits_external > hits_inline) {
        ResolvedDocument doc;
        doc.writeup_id = ref.id;
        doc.chosen_source = RawDocument::SourceKind::external;
        doc.raw = {res.body, RawDocument::SourceKind::external, *ref.external_url};
        doc.keyword_hits_inline = hits_inline;
        doc.keyword_hits_external = hits_external;
        return doc;
    }
    return make_inline(hits_inline, hits_external);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

HarvestManifest HarvestManifest::load(const std::string& path) {
    HarvestManifest m;
    m.path_ = path;
    if (!fs::exists(path)) return m;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw IoError("manifest " + path + " is corrupt: " + e.what());
    }
    json writeups = j.value("writeups", json::object());
    for (auto& [id, entry] : writeups.items()) {
        ManifestEntry e;
        e.status = entry.value("status", std::string{});
        e.reason = entry.value("reason", std::string{});
        e.content_hash = entry.value("hash", std::string{});
        e.path = entry.value("path", std::string{});
        e.timestamp = entry.value("timestamp", std::string{});
        m.entries_[id] = std::move(e);
    }
    return m;
}

bool HarvestManifest::contains(const std::string& writeup_id) const {
    return entries_.count(writeup_id) > 0;
}

void HarvestManifest::record(const std::string& writeup_id, ManifestEntry entry) {
    entries_.emplace(writeup_id, std::move(entry));  // append-only
}

void HarvestManifest::save() const {
    json j;
    json& w = j["writeups"] = json::object();
    for (const auto& [id, e] : entries_) {
        json je{{"status", e.status}, {"timestamp", e.timestamp}};
        if (!e.reason.empty()) je["reason"] = e.reason;
        if (!e.content_hash.empty()) je["hash"] = e.content_hash;
        if (!e.path.empty()) je["path"] = e.path;
        w[id] = std::move(je);
    }
    fs::path target(path_);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write manifest " + tmp.string());
        out << j.dump(2) << '\n';
    }
    fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// End-to-end harvest
// ---------------------------------------------------------------------------

HarvestStats run_harvest(Transport& transport, RateLimiter& limiter,
                         const CompiledMatcher& matcher, const HarvestConfig& config,
                         const std::string& out_root, std::vector<std::string>* log) {
    fs::create_directories(out_root);
    HarvestManifest manifest = HarvestManifest::load(
        (fs::path(out_root) / "manifest.json").string());
    std::string corpus_root = (fs::path(out_root) / "corpus").string();

    CatalogSnapshot snapshot = crawl_catalog(transport, limiter, config);
    if (log)
        for (const std::string& w : snapshot.warnings) log->push_back(w);

    std::unordered_map<std::string, const Event*> events;
    for (const Event& ev : snapshot.events) events[ev.id] = &ev;
    std::unordered_map<std::string, const Event*> task_event;
    for (const Task& task : snapshot.tasks) {
        auto it = events.find(task.event_id);
        task_event[task.id] = (it == events.end()) ? nullptr : it->second;
    }

    HarvestStats stats;
    std::vector<const WriteupRef*> pending;
    for (const WriteupRef& ref : snapshot.writeups) {
        if (manifest.contains(ref.id)) {
            ++stats.already_done;
            continue;
        }
        pending.push_back(&ref);
    }

    // Resolve with bounded concurrency; results land in ref order so the
    // manifest and corpus are independent of scheduling.
    std::vector<std::optional<ResolveOutcome>> outcomes(pending.size());
    std::size_t workers = std::max(1, config.concurrency);
    workers = std::min(workers, pending.size() == 0 ? std::size_t{1} : pending.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= pending.size()) break;
            outcomes[i] = resolve_writeup(*pending[i], transport, limiter, matcher,
                                          config);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < pending.size(); ++i) {
        const WriteupRef& ref = *pending[i];
        const ResolveOutcome& outcome = *outcomes[i];
        std::string ts = iso8601_now();

        if (const Skipped* skip = std::get_if<Skipped>(&outcome)) {
            manifest.record(ref.id, {"skipped", skip->reason, "", "", ts});
            ++stats.skipped;
            if (log) log->push_back("skipped " + ref.id + ": " + skip->reason);
            continue;
        }
        const ResolvedDocument& resolved = std::get<ResolvedDocument>(outcome);

        const Event* ev = task_event.count(ref.task_id) ? task_event[ref.task_id]
                                                        : nullptr;
        if (!ev) {
            manifest.record(ref.id, {"skipped", "unknown event", "", "", ts});
            ++stats.skipped;
            continue;
        }

        auto cleaned = clean_document(resolved.raw, config.min_length);
        if (!cleaned) {
            manifest.record(ref.id, {"skipped", "too short", "", "", ts});
            ++stats.skipped;
            if (log) log->push_back("skipped " + ref.id + ": too short");
            continue;
        }

        Document doc;
        doc.id = ref.id;
        doc.text = cleaned->text;
        doc.year = ev->year;
        doc.format = canonical_format_tag(ev->format);
        doc.source = resolved.raw.url;
        write_document(corpus_root, doc);

        std::string rel = std::to_string(doc.year) + "/" + doc.format + "/" +
                          doc.id + ".txt";
        manifest.record(ref.id, {"fetched", "", fnv1a_hex(doc.text), rel, ts});
        ++stats.fetched;
        if (log) log->push_back("fetched " + ref.id + " -> " + rel);
    }

    manifest.save();
    return stats;
}

}  // namespace taxominer
