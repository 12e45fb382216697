// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Usage: acceptance <taxominer-binary> <repo-root>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxominer/analysis.hpp"
#include "taxominer/harvest.hpp"
#include "taxominer/matcher.hpp"
#include "taxominer/stats.hpp"
#include "taxominer/taxonomy.hpp"
#include "taxominer/textprep.hpp"

using namespace taxominer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void require(bool ok, const std::string& what) {
    if (!ok) {
        ++g_failures;
        g_notes.push_back(what);
        throw std::runtime_error(what);
    }
}

void criterion(int number, const std::string& title, const std::function<void()>& body) {
    g_notes.clear();
    try {
        body();
        std::cout << "PASS criterion " << number << ": " << title << "\n";
    } catch (const std::exception& e) {
        ++g_failures;
        std::cout << "FAIL criterion " << number << ": " << title << " — " << e.what()
                  << "\n";
    }
}

Taxonomy flat_taxonomy(std::vector<Keyword> keywords) {
    Taxonomy t;
    t.areas.push_back({"KA1", {{"KU1", {{"KT1", std::move(keywords)}}}}});
    return t;
}

TFRow make_row(const std::string& id, const std::vector<int>& dense) {
    TFRow row;
    row.doc_id = id;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] > 0) row.counts[static_cast<int>(i)] = dense[i];
    return row;
}

// quadratic reference matcher, written independently of CompiledMatcher
std::map<int, int> oracle_counts(const KeywordIndex& idx, const TokenStream& doc) {
    std::map<int, int> counts;
    std::vector<std::string> stems(doc.tokens.size());
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) stems[i] = stem(doc.tokens[i]);
    for (const Keyword& kw : idx.keywords) {
        std::vector<std::string> pat;
        for (const std::string& w : tokenize(kw.text).tokens)
            pat.push_back(kw.is_abbreviation ? w : stem(w));
        const std::vector<std::string>& space = kw.is_abbreviation ? doc.tokens : stems;
        std::size_t pos = 0;
        int c = 0;
        while (pos + pat.size() <= space.size()) {
            bool hit = true;
            for (std::size_t k = 0; hit && k < pat.size(); ++k)
                hit = space[pos + k] == pat[k];
            if (hit) {
                ++c;
                pos += pat.size();
            } else {
                ++pos;
            }
        }
        if (c > 0) counts[kw.id] = c;
    }
    return counts;
}

std::string g_binary;
fs::path g_repo_root;
fs::path g_scratch;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    static int seq = 0;
    fs::path out = g_scratch / ("cli_out_" + std::to_string(seq++) + ".txt");
    std::string cmd = g_binary + " " + args + " > " + out.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    std::ifstream in(out, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, buf.str()};
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

// ---------------------------------------------------------------------------

void c1_ntf_worked_example() {
    NTFRow ntf = normalize_row(make_row("w1", {0, 0, 1, 0, 0, 0, 3, 1}));
    std::vector<double> dense(8, 0.0);
    for (const auto& [id, v] : ntf.values) dense[id] = v;
    require(dense == std::vector<double>{0, 0, 0.2, 0, 0, 0, 0.6, 0.2},
            "normalized row differs from [0,0,0.2,0,0,0,0.6,0.2]");
}

void c2_ku_aggregation_worked_example() {
    Taxonomy t;
    t.areas.push_back(
        {"KA1",
         {{"KU1", {{"KT1", {{"kw1", false, -1}, {"kw2", false, -1}, {"kw3", false, -1}}}}},
          {"KU2", {{"KT2", {{"kw4", false, -1}, {"kw5", false, -1}}}}},
          {"KU3", {{"KT3", {{"kw6", false, -1}, {"kw7", false, -1}, {"kw8", false, -1}}}}}}});
    KeywordIndex idx = keyword_index(t);
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("w1", {0, 0, 1, 0, 0, 0, 3, 1})};
    ScoreTable table = aggregate(matrix, idx, {"w1", {"w1"}}, DivisorMode::matched_docs);
    require(table.ku_scores[0] == 0.2, "KU1 != 0.2 exactly");
    require(table.ku_scores[1] == 0.0, "KU2 != 0 exactly");
    require(table.ku_scores[2] == 0.8, "KU3 != 0.8 exactly");
}

void c3_matcher_oracle() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(424242);
    const std::vector<std::string> vocab = {
        "exploit",  "exploits", "exploiting", "buffer", "overflow", "lan",
        "plan",     "network",  "networks",   "cipher", "ciphers",  "log",
        "logging",  "password", "passwords",  "shell",  "code",     "coding",
        "http",     "https",    "packet",     "hash",   "hashing",  "key",
        "keys",     "heap",     "stack",      "race",   "racing",   "kernel"};
    for (int iter = 0; iter < 1000; ++iter) {
        std::set<std::string> texts;
        std::vector<Keyword> kws;
        int want = 1 + static_cast<int>(rng() % 10);
        while (static_cast<int>(kws.size()) < want) {
            int words = 1 + static_cast<int>(rng() % 3);
            std::string phrase;
            for (int w = 0; w < words; ++w) {
                if (w) phrase += ' ';
                phrase += vocab[rng() % vocab.size()];
            }
            if (!texts.insert(phrase).second) continue;
            kws.push_back({phrase, words == 1 && rng() % 3 == 0, -1});
        }
        KeywordIndex idx = keyword_index(flat_taxonomy(std::move(kws)));
        CompiledMatcher matcher(idx);

        std::string text;
        for (int w = 0, len = static_cast<int>(rng() % 80); w < len; ++w)
            text += vocab[rng() % vocab.size()] + " ";
        TokenStream doc = tokenize(text);
        require(matcher.count_keywords(doc).counts == oracle_counts(idx, doc),
                "fast matcher disagrees with the oracle on instance " +
                    std::to_string(iter));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    require(secs < 10.0, "oracle comparison took too long: " + std::to_string(secs));
}

void c4_stemming_rules() {
    KeywordIndex enc = keyword_index(flat_taxonomy({{"encryption", false, -1}}));
    CompiledMatcher m1(enc);
    TFRow row = m1.count_keywords(tokenize("We kept encrypting the flag"));
    require(row.counts.count(0) == 1 && row.counts.at(0) == 1,
            "\"encryption\" should match \"encrypting\" exactly once");

    KeywordIndex lan = keyword_index(flat_taxonomy({{"lan", true, -1}}));
    CompiledMatcher m2(lan);
    require(m2.count_keywords(tokenize("lan party on LAN")).counts.at(0) == 2,
            "\"LAN\" should match twice in \"lan party on LAN\"");
    require(m2.count_keywords(tokenize("plan local area network")).counts.empty(),
            "\"LAN\" must not match \"plan local area network\"");
}

void c5_normalization_invariants() {
    Taxonomy t;
    t.areas.push_back(
        {"KA1",
         {{"KU1", {{"KT1", {{"kw1", false, -1}, {"kw2", false, -1}, {"kw3", false, -1}}}}},
          {"KU2", {{"KT2", {{"kw4", false, -1}, {"kw5", false, -1}}}}}}});
    t.areas.push_back(
        {"KA2", {{"KU3", {{"KT3", {{"kw6", false, -1}, {"kw7", false, -1},
                                   {"kw8", false, -1}}}}}}});
    KeywordIndex idx = keyword_index(t);

    std::mt19937 rng(5150);
    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<int> dense(8, 0);
        for (int k = 0; k < 8; ++k)
            if (rng() % 3 == 0) dense[k] = static_cast<int>(rng() % 50 + 1);
        TFRow row = make_row("d", dense);
        NTFRow ntf = normalize_row(row);
        if (!ntf.values.empty()) {
            double sum = 0.0;
            for (const auto& [id, v] : ntf.values) sum += v;
            require(std::fabs(sum - 1.0) <= 1e-9, "NTF row sum off by more than 1e-9");
        }
    }

    for (int iter = 0; iter < 500; ++iter) {
        TFMatrix matrix;
        matrix.n_keywords = 8;
        Partition part{"p", {}};
        for (int d = 0, docs = 1 + static_cast<int>(rng() % 7); d < docs; ++d) {
            std::vector<int> dense(8, 0);
            for (int k = 0; k < 8; ++k)
                if (rng() % 3 == 0) dense[k] = static_cast<int>(rng() % 9 + 1);
            std::string id = "d" + std::to_string(d);
            matrix.rows.push_back(make_row(id, dense));
            part.doc_ids.insert(id);
        }
        ScoreTable table = aggregate(matrix, idx, part, DivisorMode::matched_docs);
        require(table.ka_scores[0] == table.ku_scores[0] + table.ku_scores[1],
                "KA1 is not exactly the sum of its child KUs");
        require(table.ka_scores[1] == table.ku_scores[2],
                "KA2 is not exactly the sum of its child KUs");
        if (!table.no_matches) {
            double share_sum = 0.0;
            for (double s : table.ka_shares) share_sum += s;
            require(std::fabs(share_sum - 100.0) <= 1e-6,
                    "KA shares do not sum to 100 within 1e-6");
        }
    }
}

void c6_mann_whitney() {
    TestResult separated = mann_whitney_u({1, 2, 3}, {4, 5, 6});
    require(separated.statistic == 0.0, "U1 != 0 for fully separated samples");
    require(std::fabs(*separated.p_value - 0.1) < 1e-12,
            "exact two-sided p != 0.1 for fully separated samples");

    TestResult identical = mann_whitney_u({1, 2, 3}, {1, 2, 3});
    require(*identical.p_value == 1.0, "identical samples should give p = 1.0");

    std::mt19937 rng(31);
    for (int iter = 0; iter < 1000; ++iter) {
        int n1 = 2 + static_cast<int>(rng() % 10);
        int n2 = 2 + static_cast<int>(rng() % 10);
        std::vector<double> x, y;
        for (int i = 0; i < n1; ++i) x.push_back(static_cast<double>(rng() % 6));
        for (int i = 0; i < n2; ++i) y.push_back(static_cast<double>(rng() % 6));
        double u1 = mann_whitney_u(x, y).statistic;
        double u2 = mann_whitney_u(y, x).statistic;
        require(std::fabs(u1 + u2 - n1 * n2) < 1e-9, "U1 + U2 != n1*n2 with ties");
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> x, y;
        for (int i = 0; i < 10; ++i) x.push_back(gauss(rng));
        for (int i = 0; i < 10; ++i) y.push_back(gauss(rng) + 0.4);
        MwuOptions exact, normal;
        exact.method = MwuMethod::exact;
        normal.method = MwuMethod::normal;
        double pe = *mann_whitney_u(x, y, exact).p_value;
        double pn = *mann_whitney_u(x, y, normal).p_value;
        require(std::fabs(pe - pn) < 0.02,
                "exact and normal p differ by more than 0.02");
    }
}

void c7_kruskal_wallis() {
    TestResult spread = kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    require(std::fabs(spread.statistic - 7.2) <= 1e-9, "H != 7.2");
    require(std::fabs(*spread.p_value - std::exp(-3.6)) <= 1e-6, "p != exp(-3.6)");

    TestResult tied = kruskal_wallis({{5, 5, 5}, {5, 5}});
    require(tied.statistic == 0.0 && *tied.p_value == 1.0 && !tied.warnings.empty(),
            "all-tied input should return (0, 1) with a warning");

    std::mt19937 rng(37);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<std::vector<double>> groups(2 + rng() % 3);
        for (auto& g : groups)
            for (int i = 0, n = 2 + static_cast<int>(rng() % 6); i < n; ++i)
                g.push_back(static_cast<double>(static_cast<int>(rng() % 11) - 5));
        auto mapped = groups;
        for (auto& g : mapped)
            for (double& v : g) v = v * v * v + 2.0 * v;  // strictly increasing
        require(std::fabs(kruskal_wallis(groups).statistic -
                          kruskal_wallis(mapped).statistic) <= 1e-9,
                "H not invariant under a strictly monotone transform");
    }
}

void c8_special_functions() {
    require(std::fabs(normal_cdf(1.96) - 0.9750) <= 1e-4, "Phi(1.96) off by > 1e-4");
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> xs(0.01, 20.0);
    for (int i = 0; i < 20; ++i) {
        double x = xs(rng);
        require(std::fabs(chi2_sf(x, 2) - std::exp(-x / 2.0)) <= 1e-8,
                "chi2_sf(x,2) != exp(-x/2) within 1e-8");
    }
    require(std::fabs(chi2_sf(3.84, 1) - 0.0500) <= 5e-4, "chi2_sf(3.84,1) off");
}

void c9_anderson_darling() {
    auto probit = [](double p) {
        double lo = -10, hi = 10;
        for (int i = 0; i < 200; ++i) {
            double mid = (lo + hi) / 2;
            (normal_cdf(mid) < p ? lo : hi) = mid;
        }
        return (lo + hi) / 2;
    };
    std::vector<double> ideal;
    for (int i = 1; i <= 50; ++i) ideal.push_back(probit((i - 0.5) / 50.0));
    TestResult normal_scores = anderson_darling_normal(ideal);
    require(normal_scores.statistic < 0.576,
            "ideal normal scores should not be rejected at 15%");
    for (const auto& d : normal_scores.decisions)
        require(!d.rejected, "ideal normal scores rejected at some level");

    std::vector<double> skewed(45, 0.0);
    skewed.insert(skewed.end(), 5, 10.0);
    TestResult rej = anderson_darling_normal(skewed);
    require(rej.statistic > 1.092, "45 zeros / 5 tens should exceed the 1% critical value");

    bool threw = false;
    try {
        anderson_darling_normal(std::vector<double>(12, 3.0));
    } catch (const InputError&) {
        threw = true;
    }
    require(threw, "zero-variance input should be an error");
}

void c10_harvest_fixture() {
    auto start = std::chrono::steady_clock::now();
    fs::path out = g_scratch / "harvest";
    fs::remove_all(out);

    Taxonomy t = load_taxonomy_file((g_repo_root / "data/sample_taxonomy.json").string());
    KeywordIndex idx = keyword_index(t);
    CompiledMatcher matcher(idx);

    FixtureTransport transport((g_repo_root / "fixtures/catalog").string());
    auto clock = std::make_shared<double>(0.0);
    RateLimiter limiter(
        100.0, [clock] { return *clock; }, [clock](double s) { *clock += s; });

    HarvestConfig config;
    config.base_url = "http://catalog.test";
    config.year_from = 2018;
    config.year_to = 2018;
    config.allowlist = {"gist.example.com"};

    HarvestStats stats = run_harvest(transport, limiter, matcher, config, out.string());
    require(stats.fetched == 5 && stats.skipped == 4,
            "expected 5 kept / 4 skipped writeups, got " + std::to_string(stats.fetched) +
                "/" + std::to_string(stats.skipped));

    HarvestManifest manifest = HarvestManifest::load((out / "manifest.json").string());
    auto entry = [&](const std::string& id) { return manifest.entries().at(id); };
    for (const char* id : {"w1", "w2", "w4", "w5", "w9"})
        require(entry(id).status == "fetched", std::string(id) + " not fetched");
    require(entry("w3").reason == "non-allowlisted host", "w3 skip reason wrong");
    require(entry("w6").reason == "no keywords", "w6 skip reason wrong");
    require(entry("w7").reason == "too short", "w7 skip reason wrong");
    require(entry("w8").reason == "empty", "w8 skip reason wrong");

    // dual-source case: the side with more keyword hits was kept
    CatalogSnapshot snap = crawl_catalog(transport, limiter, config);
    for (const WriteupRef& ref : snap.writeups) {
        if (ref.id != "w4") continue;
        auto outcome = resolve_writeup(ref, transport, limiter, matcher, config);
        const auto* doc = std::get_if<ResolvedDocument>(&outcome);
        require(doc && doc->chosen_source == RawDocument::SourceKind::external &&
                    doc->keyword_hits_external > doc->keyword_hits_inline,
                "dual-source writeup did not keep the file with more keywords");
    }

    transport.clear_call_log();
    HarvestStats rerun = run_harvest(transport, limiter, matcher, config, out.string());
    require(rerun.fetched == 0 && rerun.already_done == 9,
            "second run should fetch nothing");
    for (const std::string& url : transport.call_log())
        require(url.rfind("http://catalog.test/api/", 0) == 0,
                "second run fetched writeup content: " + url);

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    require(secs < 5.0, "fixture harvest took too long");
}

void c11_end_to_end_pipeline() {
    auto start = std::chrono::steady_clock::now();

    // taxonomy: 25 single-keyword KUs across three KAs (5 / 10 / 10)
    int next = 0;
    auto make_ku = [&]() {
        std::string n = "kw" + std::to_string(10 + next);  // kw10..kw34
        ++next;
        KnowledgeUnit ku{"KU" + std::to_string(next),
                         {{"KT" + std::to_string(next), {{n, false, -1}}}}};
        return ku;
    };
    Taxonomy t;
    t.areas.push_back({"KA1", {}});
    for (int i = 0; i < 5; ++i) t.areas[0].units.push_back(make_ku());
    t.areas.push_back({"KA2", {}});
    for (int i = 0; i < 10; ++i) t.areas[1].units.push_back(make_ku());
    t.areas.push_back({"KA3", {}});
    for (int i = 0; i < 10; ++i) t.areas[2].units.push_back(make_ku());

    fs::path tax_path = g_scratch / "planted_taxonomy.json";
    write_file(tax_path, serialize_taxonomy(t));

    auto keyword_of_ku = [](int ku) { return "kw" + std::to_string(10 + ku); };

    // jeopardy docs spread evenly over all 25 KUs; attack-defense docs hit
    // only the first five, five times each
    fs::path planted = g_scratch / "planted_corpus";
    fs::remove_all(planted);
    for (int d = 0; d < 10; ++d) {
        std::string text;
        for (int ku = 0; ku < 25; ++ku) text += keyword_of_ku(ku) + " ";
        write_file(planted / "2018/jeopardy" / ("j" + std::to_string(d) + ".txt"), text);
    }
    for (int d = 0; d < 10; ++d) {
        std::string text;
        for (int ku = 0; ku < 5; ++ku)
            for (int rep = 0; rep < 5; ++rep) text += keyword_of_ku(ku) + " ";
        write_file(planted / "2018/attack-defense" / ("a" + std::to_string(d) + ".txt"),
                   text);
    }

    // analytic KA shares: per jeopardy doc each KU gets 1/25; per AD doc the
    // first five KUs get 1/5. Averaged over 20 docs:
    //   KU1..5 = 0.12 each, KU6..25 = 0.02 each, total 1
    //   KA1 = 60%, KA2 = 20%, KA3 = 20%
    fs::path analysis = g_scratch / "planted_analysis";
    fs::remove_all(analysis);
    RunResult r = run_cli("analyze --taxonomy " + tax_path.string() + " --corpus " +
                          planted.string() + " --out " + analysis.string());
    require(r.exit_code == 0, "analyze failed on the planted corpus");

    std::ifstream bundle_in(analysis / "bundle.json");
    json bundle = json::parse(bundle_in);
    std::vector<double> expected = {60.0, 20.0, 20.0};
    const json& entries = bundle.at("ka_distribution").at(0).at("entries");
    require(entries.size() == 3, "expected three knowledge areas");
    for (int i = 0; i < 3; ++i) {
        double share = entries.at(i).at("share_percent").get<double>();
        require(std::fabs(share - expected[i]) <= 0.5,
                "KA share off by more than 0.5 points: got " + std::to_string(share) +
                    ", expected " + std::to_string(expected[i]));
    }

    // planted difference between formats: strongly significant
    RunResult cmp = run_cli("compare --by format --json --taxonomy " + tax_path.string() +
                            " --corpus " + planted.string());
    require(cmp.exit_code == 0, "compare failed on the planted corpus");
    json cmp_json = json::parse(cmp.out);
    require(cmp_json.at("method").get<std::string>().rfind("mann_whitney_u", 0) == 0,
            "two partitions should run a Mann-Whitney test");
    require(cmp_json.at("p_value").get<double>() < 0.05,
            "planted difference should give p < 0.05, got " +
                cmp_json.at("p_value").dump());

    // identical partitions: no detectable difference
    fs::path same = g_scratch / "identical_corpus";
    fs::remove_all(same);
    for (int d = 0; d < 10; ++d) {
        std::string text;
        for (int ku = 0; ku < 25; ++ku) text += keyword_of_ku(ku) + " ";
        write_file(same / "2018/jeopardy" / ("j" + std::to_string(d) + ".txt"), text);
        write_file(same / "2018/attack-defense" / ("a" + std::to_string(d) + ".txt"),
                   text);
    }
    RunResult cmp2 = run_cli("compare --by format --json --taxonomy " + tax_path.string() +
                             " --corpus " + same.string());
    require(cmp2.exit_code == 0, "compare failed on the identical corpus");
    json cmp2_json = json::parse(cmp2.out);
    require(cmp2_json.at("p_value").get<double>() > 0.5,
            "identical partitions should give p > 0.5, got " +
                cmp2_json.at("p_value").dump());

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    require(secs < 30.0, "end-to-end pipeline took too long");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <taxominer-binary> <repo-root>\n";
        return 2;
    }
    g_binary = argv[1];
    g_repo_root = argv[2];
    g_scratch = fs::temp_directory_path() / "taxominer_acceptance";
    fs::remove_all(g_scratch);
    fs::create_directories(g_scratch);

    criterion(1, "row normalization worked example is exact", c1_ntf_worked_example);
    criterion(2, "knowledge-unit aggregation worked example is exact",
              c2_ku_aggregation_worked_example);
    criterion(3, "fast matcher equals the quadratic oracle on 1000 random instances",
              c3_matcher_oracle);
    criterion(4, "stem matching and exact abbreviation matching", c4_stemming_rules);
    criterion(5, "normalization and share invariants on random input",
              c5_normalization_invariants);
    criterion(6, "Mann-Whitney U worked examples and invariants", c6_mann_whitney);
    criterion(7, "Kruskal-Wallis worked examples and invariance", c7_kruskal_wallis);
    criterion(8, "normal CDF and chi-square survival reference values",
              c8_special_functions);
    criterion(9, "Anderson-Darling acceptance and rejection behavior",
              c9_anderson_darling);
    criterion(10, "fixture harvest end-to-end with resumability", c10_harvest_fixture);
    criterion(11, "synthetic corpus pipeline reproduces planted distributions",
              c11_end_to_end_pipeline);

    if (g_failures == 0) {
        std::cout << "all criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " criterion failure(s)\n";
    return 1;
}
