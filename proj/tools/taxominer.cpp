// Command-line front end wiring the pipeline: taxonomy validation, corpus
// harvesting, keyword analysis, partition comparison, statistical tests and
// report rendering.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "taxominer/analysis.hpp"
#include "taxominer/corpus.hpp"
#include "taxominer/errors.hpp"
#include "taxominer/harvest.hpp"
#include "taxominer/matcher.hpp"
#include "taxominer/report.hpp"
#include "taxominer/stats.hpp"
#include "taxominer/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace taxominer;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

DivisorMode parse_divisor(const std::string& name) {
    if (name == "all_docs" || name == "all") return DivisorMode::all_docs;
    if (name == "matched_docs" || name == "matched") return DivisorMode::matched_docs;
    throw InputError("unknown divisor mode \"" + name + "\"");
}

// Simple CSV reader for the stats subcommand: header row, comma separated,
// double quotes around fields that need them.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<double> csv_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + " is empty");
    auto header = split_csv_line(line);
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == column) col = i;
    if (col == header.size())
        throw InputError("column \"" + column + "\" not found in " + path);

    std::vector<double> values;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (col >= fields.size()) continue;
        std::string cell = trim(fields[col]);
        if (cell.empty()) continue;
        try {
            values.push_back(std::stod(cell));
        } catch (...) {
            throw InputError("non-numeric value \"" + cell + "\" in column \"" +
                             column + "\" of " + path);
        }
    }
    return values;
}

struct Pipeline {
    Taxonomy taxonomy;
    KeywordIndex index;
    std::vector<Document> docs;
    TFMatrix matrix;
};

Pipeline run_pipeline(const std::string& taxonomy_path, const std::string& corpus_root) {
    Pipeline p;
    p.taxonomy = load_taxonomy_file(taxonomy_path);
    p.index = keyword_index(p.taxonomy);
    p.docs = load_corpus(corpus_root);
    CompiledMatcher matcher(p.index);
    std::vector<CorpusDoc> corpus;
    corpus.reserve(p.docs.size());
    for (const Document& d : p.docs) corpus.push_back({d.id, d.text});
    p.matrix = build_matrix(matcher, corpus, 4);
    return p;
}

Partition whole_corpus_partition(const std::vector<Document>& docs) {
    Partition all{"overall", {}};
    for (const Document& d : docs) all.doc_ids.insert(d.id);
    return all;
}

int cmd_taxonomy_validate(const std::string& path) {
    ValidationReport report;
    try {
        Taxonomy t = load_taxonomy_file(path);
        report = validate_taxonomy(t);
    } catch (const InputError& e) {
        // parse-level violations, reported in the same shape as findings
        std::cout << "error at $: " << e.what() << '\n';
        std::cout << "1 errors, 0 warnings\n";
        return 1;
    }
    for (const auto& f : report.findings)
        std::cout << (f.level == ValidationFinding::Level::error ? "error" : "warning")
                  << " at " << f.path << ": " << f.message << '\n';
    std::cout << report.error_count() << " errors, " << report.warning_count()
              << " warnings\n";
    return report.ok() ? 0 : 1;
}

int cmd_analyze(const std::string& taxonomy_path, const std::string& corpus_root,
                const std::string& out_dir, bool dump_matrix,
                const std::string& divisor) {
    Pipeline p = run_pipeline(taxonomy_path, corpus_root);
    DivisorMode mode = parse_divisor(divisor);

    ScoreTable overall =
        aggregate(p.matrix, p.index, whole_corpus_partition(p.docs), mode);
    SummaryStats summary = corpus_summary(p.matrix, p.index);

    std::vector<ScoreTable> yearly;
    for (const Partition& part : partition_by_year(p.docs))
        yearly.push_back(aggregate(p.matrix, p.index, part, mode));

    ReportBundle bundle = build_bundle(p.index, {overall}, yearly, summary, {});

    write_file(out_dir + "/scores_overall.csv", score_table_to_csv(overall, p.index));
    write_file(out_dir + "/scores_overall.json", score_table_to_json(overall, p.index));
    for (const ScoreTable& t : yearly)
        write_file(out_dir + "/scores_" + t.partition + ".csv",
                   score_table_to_csv(t, p.index));
    write_file(out_dir + "/bundle.json", render(bundle, ReportFormat::json));
    if (dump_matrix) {
        write_file(out_dir + "/matrix.csv", matrix_to_csv(p.matrix));
        write_file(out_dir + "/keywords.csv", legend_to_csv(p.index));
    }

    // timestamps stay out of the data files so reruns are byte-identical
    {
        std::ostringstream log;
        log << "analyzed " << p.docs.size() << " documents, "
            << summary.total_matches << " keyword matches\n";
        std::ofstream out(out_dir + "/run.log", std::ios::app);
        out << log.str();
    }

    std::cout << "documents:         " << p.docs.size() << '\n'
              << "keyword matches:   " << summary.total_matches << '\n'
              << "matched documents: " << overall.matched_docs << '\n'
              << "unmatched keywords: " << summary.unmatched_keywords << '\n'
              << "outputs in " << out_dir << '\n';
    return 0;
}

int cmd_compare(const std::string& taxonomy_path, const std::string& corpus_root,
                const std::string& by, const std::string& out_dir,
                const std::string& divisor, bool as_json) {
    Pipeline p = run_pipeline(taxonomy_path, corpus_root);
    DivisorMode mode = parse_divisor(divisor);

    std::vector<Partition> parts;
    if (by == "format") parts = partition_by_format(p.docs);
    else if (by == "year") parts = partition_by_year(p.docs);
    else throw InputError("--by must be \"format\" or \"year\"");

    std::vector<ScoreTable> tables;
    for (const Partition& part : parts)
        tables.push_back(aggregate(p.matrix, p.index, part, mode));

    TestResult result;
    if (tables.size() == 2) {
        result = mann_whitney_u(tables[0].ku_scores, tables[1].ku_scores);
    } else if (tables.size() > 2) {
        std::vector<std::vector<double>> groups;
        for (const ScoreTable& t : tables) groups.push_back(t.ku_scores);
        result = kruskal_wallis(groups);
    } else {
        throw InputError("compare needs at least two partitions, got " +
                         std::to_string(tables.size()));
    }

    if (!out_dir.empty())
        for (const ScoreTable& t : tables)
            write_file(out_dir + "/scores_" + t.partition + ".csv",
                       score_table_to_csv(t, p.index));

    if (as_json) std::cout << test_result_to_json(result);
    else std::cout << test_result_to_text(result);
    return 0;
}

int cmd_stats(const std::string& test, const std::string& csv_path,
              const std::vector<std::string>& columns, const std::string& method,
              bool as_json) {
    std::vector<std::vector<double>> samples;
    for (const std::string& col : columns) samples.push_back(csv_column(csv_path, col));

    TestResult result;
    if (test == "mann-whitney" || test == "mwu") {
        if (samples.size() != 2)
            throw InputError("mann-whitney needs exactly two --col options");
        MwuOptions opts;
        if (method == "exact") opts.method = MwuMethod::exact;
        else if (method == "normal") opts.method = MwuMethod::normal;
        else if (method == "auto") opts.method = MwuMethod::automatic;
        else throw InputError("unknown --method \"" + method + "\"");
        result = mann_whitney_u(samples[0], samples[1], opts);
    } else if (test == "kruskal-wallis" || test == "kw") {
        result = kruskal_wallis(samples);
    } else if (test == "anderson-darling" || test == "ad") {
        if (samples.size() != 1)
            throw InputError("anderson-darling takes exactly one --col option");
        result = anderson_darling_normal(samples[0]);
    } else {
        throw InputError("unknown test \"" + test + "\"");
    }

    if (as_json) std::cout << test_result_to_json(result);
    else std::cout << test_result_to_text(result);
    return 0;
}

int cmd_report(const std::string& bundle_path, const std::string& format,
               const std::string& out_path) {
    ReportBundle bundle = bundle_from_json(read_file(bundle_path));
    std::string output = render(bundle, parse_report_format(format));
    if (out_path.empty()) std::cout << output;
    else write_file(out_path, output);
    return 0;
}

int cmd_harvest(const std::string& base_url, const std::string& years,
                const std::string& taxonomy_path, const std::string& out_dir,
                std::vector<std::string> allowlist, const std::string& transport_spec,
                double rate) {
    HarvestConfig config;
    config.base_url = base_url;
    config.allowlist = std::move(allowlist);
    if (config.allowlist.empty())
        config.allowlist.push_back("raw.githubusercontent.com");

    auto sep = years.find("..");
    try {
        if (sep == std::string::npos) {
            config.year_from = config.year_to = std::stoi(years);
        } else {
            config.year_from = std::stoi(years.substr(0, sep));
            config.year_to = std::stoi(years.substr(sep + 2));
        }
    } catch (const std::exception&) {
        throw InputError("cannot parse --years \"" + years + "\" (use e.g. 2012..2020)");
    }
    if (config.year_from > config.year_to)
        throw InputError("--years range is reversed");

    config.rate_limit = rate;
    if (const char* env = std::getenv("TAXOMINER_RATE_LIMIT")) {
        try {
            config.rate_limit = std::stod(env);
        } catch (...) {
            throw InputError("TAXOMINER_RATE_LIMIT is not a number");
        }
    }

    Taxonomy taxonomy = load_taxonomy_file(taxonomy_path);
    KeywordIndex index = keyword_index(taxonomy);
    config.min_length = index.min_keyword_length;
    CompiledMatcher matcher(index);

    std::unique_ptr<Transport> transport;
    std::unique_ptr<RateLimiter> limiter;
    if (transport_spec.rfind("fixture:", 0) == 0) {
        transport = std::make_unique<FixtureTransport>(transport_spec.substr(8));
        // virtual clock: fixture runs are offline, no need to really wait
        auto clock = std::make_shared<double>(0.0);
        limiter = std::make_unique<RateLimiter>(
            config.rate_limit, [clock] { return *clock; },
            [clock](double s) { *clock += s; });
    } else if (transport_spec.empty()) {
        transport = std::make_unique<HttpTransport>();
        limiter = std::make_unique<RateLimiter>(config.rate_limit);
    } else {
        throw InputError("unknown --transport \"" + transport_spec + "\"");
    }

    std::vector<std::string> log;
    HarvestStats stats = run_harvest(*transport, *limiter, matcher, config, out_dir,
                                     &log);
    for (const std::string& line : log) std::cerr << line << '\n';
    std::cout << "fetched: " << stats.fetched << '\n'
              << "skipped: " << stats.skipped << '\n'
              << "already done: " << stats.already_done << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taxominer: map CTF writeup corpora onto a cybersecurity "
                 "curriculum taxonomy"};
    app.set_config("--config");
    app.require_subcommand(1);

    // taxonomy validate
    auto* taxonomy_cmd = app.add_subcommand("taxonomy", "Taxonomy file utilities");
    taxonomy_cmd->require_subcommand(1);
    auto* validate_cmd = taxonomy_cmd->add_subcommand("validate", "Validate a taxonomy file");
    std::string validate_path;
    validate_cmd->add_option("file", validate_path, "Taxonomy JSON file")->required();

    // harvest
    auto* harvest_cmd = app.add_subcommand("harvest", "Crawl a CTF catalog and store a corpus");
    std::string base_url, years, harvest_taxonomy, harvest_out, transport_spec;
    std::vector<std::string> allowlist;
    double rate = 1.0;
    harvest_cmd->add_option("--base-url", base_url, "Catalog base URL")->required();
    harvest_cmd->add_option("--years", years, "Year range, e.g. 2012..2020")->required();
    harvest_cmd->add_option("--taxonomy", harvest_taxonomy, "Taxonomy JSON file")->required();
    harvest_cmd->add_option("--out", harvest_out, "Output directory")->required();
    harvest_cmd->add_option("--allowlist", allowlist,
                            "External host the harvester may fetch from");
    harvest_cmd->add_option("--transport", transport_spec,
                            "fixture:DIR to read from a local fixture directory");
    harvest_cmd->add_option("--rate", rate, "Requests per second (default 1)");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Build the keyword matrix and score tables");
    std::string analyze_taxonomy, analyze_corpus, analyze_out = "analysis";
    std::string divisor = "matched_docs";
    bool dump_matrix = false;
    analyze_cmd->add_option("--taxonomy", analyze_taxonomy, "Taxonomy JSON file")->required();
    analyze_cmd->add_option("--corpus", analyze_corpus, "Corpus root directory")->required();
    analyze_cmd->add_option("--out", analyze_out, "Output directory");
    analyze_cmd->add_option("--divisor", divisor, "all_docs or matched_docs");
    analyze_cmd->add_flag("--dump-matrix", dump_matrix,
                          "Also write the sparse matrix and keyword legend CSVs");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Compare partitions statistically");
    std::string compare_by, compare_taxonomy, compare_corpus, compare_out;
    std::string compare_divisor = "matched_docs";
    bool compare_json = false;
    compare_cmd->add_option("--by", compare_by, "format or year")->required();
    compare_cmd->add_option("--taxonomy", compare_taxonomy, "Taxonomy JSON file")->required();
    compare_cmd->add_option("--corpus", compare_corpus, "Corpus root directory")->required();
    compare_cmd->add_option("--out", compare_out, "Directory for per-partition score CSVs");
    compare_cmd->add_option("--divisor", compare_divisor, "all_docs or matched_docs");
    compare_cmd->add_flag("--json", compare_json, "Print the test result as JSON");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Run a statistical test on CSV columns");
    std::string stats_test, stats_csv, stats_method = "auto";
    std::vector<std::string> stats_cols;
    bool stats_json = false;
    stats_cmd->add_option("--test", stats_test,
                          "mann-whitney | kruskal-wallis | anderson-darling")->required();
    stats_cmd->add_option("--csv", stats_csv, "Input CSV file")->required();
    stats_cmd->add_option("--col", stats_cols, "Column name (repeatable)")->required();
    stats_cmd->add_option("--method", stats_method, "auto | exact | normal (mann-whitney)");
    stats_cmd->add_flag("--json", stats_json, "Print the result as JSON");

    // report
    auto* report_cmd = app.add_subcommand("report", "Render an analysis bundle");
    std::string report_bundle, report_format = "markdown", report_out;
    report_cmd->add_option("--bundle", report_bundle,
                           "bundle.json written by analyze")->required();
    report_cmd->add_option("--format", report_format, "markdown | csv | json");
    report_cmd->add_option("--out", report_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*validate_cmd) return cmd_taxonomy_validate(validate_path);
        if (*harvest_cmd)
            return cmd_harvest(base_url, years, harvest_taxonomy, harvest_out,
                               allowlist, transport_spec, rate);
        if (*analyze_cmd)
            return cmd_analyze(analyze_taxonomy, analyze_corpus, analyze_out,
                               dump_matrix, divisor);
        if (*compare_cmd)
            return cmd_compare(compare_taxonomy, compare_corpus, compare_by,
                               compare_out, compare_divisor, compare_json);
        if (*stats_cmd)
            return cmd_stats(stats_test, stats_csv, stats_cols, stats_method,
                             stats_json);
        if (*report_cmd) return cmd_report(report_bundle, report_format, report_out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
