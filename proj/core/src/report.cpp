#include "taxominer/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "taxominer/errors.hpp"

namespace taxominer {

using nlohmann::json;

ReportFormat parse_report_format(const std::string& name) {
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw InputError("unknown report format \"" + name + "\"");
}

namespace {

std::string fixed2(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << v;
    return out.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

std::string render_csv(const ReportBundle& b) {
    std::ostringstream out;
    out << "level,name,share_percent,score,partition\n";
    for (const auto& part : b.ka_distribution)
        for (const auto& e : part.entries)
            out << "KA," << csv_field(e.name) << ',' << fixed2(e.share_percent) << ','
                << e.score << ',' << csv_field(part.partition) << '\n';
    for (const auto& table : b.ku_top)
        for (const auto& e : table.entries)
            out << "KU," << csv_field(e.knowledge_unit) << ','
                << fixed2(e.share_percent) << ',' << e.score << ','
                << csv_field(table.partition) << '\n';
    for (const auto& [kw, count] : b.keyword_top)
        out << "keyword," << csv_field(kw) << ",," << count << ",\n";
    return out.str();
}

std::string render_markdown(const ReportBundle& b) {
    std::ostringstream out;
    for (const auto& part : b.ka_distribution) {
        out << "## Knowledge area distribution (" << part.partition << ")\n\n";
        out << "| % | Knowledge Area |\n|---:|---|\n";
        for (const auto& e : part.entries)
            out << "| " << fixed2(e.share_percent) << " | " << e.name << " |\n";
        out << '\n';
    }
    for (const auto& table : b.ku_top) {
        out << "## Top knowledge units (" << table.partition << ")\n\n";
        out << "| % | Knowledge Unit | Key Topic | Parent Knowledge Area |\n"
               "|---:|---|---|---|\n";
        for (const auto& e : table.entries)
            out << "| " << fixed2(e.share_percent) << " | " << e.knowledge_unit
                << " | " << e.key_topic << " | " << e.knowledge_area << " |\n";
        out << '\n';
    }
    if (!b.years.empty()) {
        out << "## Knowledge areas by year\n\n| Knowledge Area |";
        for (const auto& y : b.years) out << ' ' << y << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < b.years.size(); ++i) out << "---:|";
        out << '\n';
        for (std::size_t ka = 0; ka < b.ka_order.size(); ++ka) {
            out << "| " << b.ka_order[ka] << " |";
            for (std::size_t y = 0; y < b.years.size(); ++y)
                out << ' ' << fixed2(b.yearly_stack[y][ka]) << " |";
            out << '\n';
        }
        out << '\n';
    }
    if (!b.keyword_top.empty()) {
        out << "## Top keywords\n\n| Keyword | Matches |\n|---|---:|\n";
        for (const auto& [kw, count] : b.keyword_top)
            out << "| " << kw << " | " << count << " |\n";
        out << '\n';
    }
    if (!b.zero_kus.empty()) {
        out << "## Knowledge units never matched\n\n";
        for (const auto& ku : b.zero_kus) out << "- " << ku << '\n';
        out << '\n';
    }
    for (const auto& r : b.stats_results)
        out << "## Statistical test\n\n" << test_result_to_text(r) << '\n';
    return out.str();
}

json test_result_json(const TestResult& r) {
    json j;
    j["method"] = r.method;
    j["statistic"] = r.statistic;
    if (r.p_value) j["p_value"] = *r.p_value;
    if (r.df) j["df"] = *r.df;
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    if (!r.decisions.empty()) {
        json& d = j["critical_values"] = json::array();
        for (const auto& dec : r.decisions)
            d.push_back({{"significance_percent", dec.significance_percent},
                         {"critical_value", dec.critical_value},
                         {"rejected", dec.rejected}});
    }
    return j;
}

std::string render_json(const ReportBundle& b) {
    json j;
    json& dist = j["ka_distribution"] = json::array();
    for (const auto& part : b.ka_distribution) {
        json entries = json::array();
        for (const auto& e : part.entries)
            entries.push_back({{"name", e.name},
                               {"share_percent", e.share_percent},
                               {"score", e.score}});
        dist.push_back({{"partition", part.partition}, {"entries", entries}});
    }
    json& tops = j["ku_top"] = json::array();
    for (const auto& table : b.ku_top) {
        json entries = json::array();
        for (const auto& e : table.entries)
            entries.push_back({{"knowledge_unit", e.knowledge_unit},
                               {"key_topic", e.key_topic},
                               {"knowledge_area", e.knowledge_area},
                               {"share_percent", e.share_percent},
                               {"score", e.score}});
        tops.push_back({{"partition", table.partition}, {"entries", entries}});
    }
    j["years"] = b.years;
    j["ka_order"] = b.ka_order;
    j["yearly_stack"] = b.yearly_stack;
    json& kws = j["keyword_top"] = json::array();
    for (const auto& [kw, count] : b.keyword_top)
        kws.push_back({{"keyword", kw}, {"matches", count}});
    j["zero_kus"] = b.zero_kus;
    json& stats = j["stats_results"] = json::array();
    for (const auto& r : b.stats_results) stats.push_back(test_result_json(r));
    return j.dump(2) + "\n";
}

}  // namespace

std::string render(const ReportBundle& bundle, ReportFormat format) {
    switch (format) {
        case ReportFormat::markdown: return render_markdown(bundle);
        case ReportFormat::csv: return render_csv(bundle);
        case ReportFormat::json: return render_json(bundle);
    }
    throw InputError("unknown report format");
}

std::vector<ChartSeries> chart_data(const ReportBundle& bundle) {
    std::vector<ChartSeries> series;
    series.reserve(bundle.ka_order.size());
    for (std::size_t ka = 0; ka < bundle.ka_order.size(); ++ka) {
        ChartSeries s;
        s.knowledge_area = bundle.ka_order[ka];
        s.values.reserve(bundle.years.size());
        for (std::size_t y = 0; y < bundle.years.size(); ++y)
            s.values.push_back(bundle.yearly_stack[y][ka]);
        series.push_back(std::move(s));
    }
    return series;
}

ReportBundle build_bundle(const KeywordIndex& index,
                          const std::vector<ScoreTable>& partitions,
                          const std::vector<ScoreTable>& yearly,
                          const SummaryStats& summary,
                          const std::vector<TestResult>& stats_results,
                          std::size_t top_n) {
    ReportBundle b;
    for (const std::string& ka : index.ka_names) b.ka_order.push_back(ka);

    for (const ScoreTable& table : partitions) {
        PartitionShares shares;
        shares.partition = table.partition;
        for (std::size_t i = 0; i < index.ka_names.size(); ++i)
            shares.entries.push_back(
                {index.ka_names[i], table.ka_shares[i], table.ka_scores[i]});
        b.ka_distribution.push_back(std::move(shares));

        ReportBundle::KuTopTable top;
        top.partition = table.partition;
        std::vector<int> order(index.kus.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
            return table.ku_scores[a] > table.ku_scores[c];
        });
        for (int ku : order) {
            if (top.entries.size() >= top_n || table.ku_scores[ku] <= 0.0) break;
            // key topic: the KU's best-scoring KT
            int best_kt = -1;
            for (std::size_t kt = 0; kt < index.kts.size(); ++kt)
                if (index.kts[kt].ku == ku &&
                    (best_kt < 0 || table.kt_scores[kt] > table.kt_scores[best_kt]))
                    best_kt = static_cast<int>(kt);
            top.entries.push_back({index.kus[ku].name,
                                   best_kt >= 0 ? index.kts[best_kt].name : "",
                                   index.ka_names[index.kus[ku].ka],
                                   table.ku_shares[ku], table.ku_scores[ku]});
        }
        b.ku_top.push_back(std::move(top));
    }

    for (const ScoreTable& table : yearly) {
        b.years.push_back(table.partition);
        b.yearly_stack.push_back(table.ka_shares);
    }
    b.keyword_top = summary.top_keywords;
    if (b.keyword_top.size() > top_n) b.keyword_top.resize(top_n);
    b.zero_kus = summary.zero_kus;
    b.stats_results = stats_results;
    return b;
}

ReportBundle bundle_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bundle JSON parse error: ") + e.what());
    }
    ReportBundle b;
    try {
        for (const json& part : j.value("ka_distribution", json::array())) {
            PartitionShares shares;
            shares.partition = part.at("partition").get<std::string>();
            for (const json& e : part.at("entries"))
                shares.entries.push_back({e.at("name").get<std::string>(),
                                          e.at("share_percent").get<double>(),
                                          e.value("score", 0.0)});
            b.ka_distribution.push_back(std::move(shares));
        }
        for (const json& part : j.value("ku_top", json::array())) {
            ReportBundle::KuTopTable top;
            top.partition = part.at("partition").get<std::string>();
            for (const json& e : part.at("entries"))
                top.entries.push_back({e.at("knowledge_unit").get<std::string>(),
                                       e.value("key_topic", std::string{}),
                                       e.at("knowledge_area").get<std::string>(),
                                       e.at("share_percent").get<double>(),
                                       e.value("score", 0.0)});
            b.ku_top.push_back(std::move(top));
        }
        b.years = j.value("years", std::vector<std::string>{});
        b.ka_order = j.value("ka_order", std::vector<std::string>{});
        b.yearly_stack = j.value("yearly_stack", std::vector<std::vector<double>>{});
        for (const json& e : j.value("keyword_top", json::array()))
            b.keyword_top.emplace_back(e.at("keyword").get<std::string>(),
                                       e.at("matches").get<long long>());
        b.zero_kus = j.value("zero_kus", std::vector<std::string>{});
        for (const json& e : j.value("stats_results", json::array())) {
            TestResult r;
            r.method = e.value("method", std::string{});
            r.statistic = e.value("statistic", 0.0);
            if (e.contains("p_value")) r.p_value = e["p_value"].get<double>();
            if (e.contains("df")) r.df = e["df"].get<int>();
            r.warnings = e.value("warnings", std::vector<std::string>{});
            for (const json& d : e.value("critical_values", json::array()))
                r.decisions.push_back({d.at("significance_percent").get<double>(),
                                       d.at("critical_value").get<double>(),
                                       d.at("rejected").get<bool>()});
            b.stats_results.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bundle JSON schema error: ") + e.what());
    }
    return b;
}

std::string test_result_to_json(const TestResult& r) {
    return test_result_json(r).dump(2) + "\n";
}

std::string test_result_to_text(const TestResult& r) {
    std::ostringstream out;
    out << "method:    " << r.method << '\n';
    out << "statistic: " << r.statistic << '\n';
    if (r.p_value) out << "p-value:   " << *r.p_value << '\n';
    if (r.df) out << "df:        " << *r.df << '\n';
    for (const auto& d : r.decisions)
        out << "at " << d.significance_percent << "%: critical " << d.critical_value
            << " -> " << (d.rejected ? "rejected" : "not rejected") << '\n';
    for (const auto& w : r.warnings) out << "warning:   " << w << '\n';
    return out.str();
}

}  // namespace taxominer
