#pragma once

#include <string>
#include <vector>

#include "taxominer/analysis.hpp"
#include "taxominer/stats.hpp"

namespace taxominer {

struct ShareEntry {
    std::string name;
    double share_percent = 0.0;
    double score = 0.0;
};

struct PartitionShares {
    std::string partition;
    std::vector<ShareEntry> entries;  // taxonomy order for KA distributions
};

struct KuTopEntry {
    std::string knowledge_unit;
    std::string key_topic;       // highest-scoring KT inside the KU
    std::string knowledge_area;  // parent
    double share_percent = 0.0;
    double score = 0.0;
};

struct ReportBundle {
    std::vector<PartitionShares> ka_distribution;
    struct KuTopTable {
        std::string partition;
        std::vector<KuTopEntry> entries;  // descending by share
    };
    std::vector<KuTopTable> ku_top;
    std::vector<std::string> years;              // ascending labels
    std::vector<std::string> ka_order;           // taxonomy order
    std::vector<std::vector<double>> yearly_stack;  // [year][ka] shares
    std::vector<std::pair<std::string, long long>> keyword_top;
    std::vector<std::string> zero_kus;
    std::vector<TestResult> stats_results;
};

enum class ReportFormat { markdown, csv, json };

ReportFormat parse_report_format(const std::string& name);

// Deterministic; shares rendered to 2 decimals in markdown/csv, full
// precision in JSON.
std::string render(const ReportBundle& bundle, ReportFormat format);

struct ChartSeries {
    std::string knowledge_area;
    std::vector<double> values;  // one per year, in bundle.years order
};

std::vector<ChartSeries> chart_data(const ReportBundle& bundle);

// Assembles the full report bundle from per-partition score tables.
ReportBundle build_bundle(const KeywordIndex& index,
                          const std::vector<ScoreTable>& partitions,
                          const std::vector<ScoreTable>& yearly,
                          const SummaryStats& summary,
                          const std::vector<TestResult>& stats_results,
                          std::size_t top_n = 10);

// Parses the JSON produced by render(bundle, ReportFormat::json).
ReportBundle bundle_from_json(const std::string& text);

std::string test_result_to_json(const TestResult& r);
std::string test_result_to_text(const TestResult& r);

}  // namespace taxominer
