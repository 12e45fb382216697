#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "taxominer/corpus.hpp"
#include "taxominer/matcher.hpp"
#include "taxominer/taxonomy.hpp"

namespace taxominer {

// Normalized term frequencies: each row sums to 1 unless empty.
struct NTFRow {
    std::string doc_id;
    std::map<int, double> values;  // keyword id -> fraction in (0,1]
};

NTFRow normalize_row(const TFRow& tf);

struct Partition {
    std::string label;
    std::set<std::string> doc_ids;
};

enum class DivisorMode { all_docs, matched_docs };

struct ScoreTable {
    std::string partition;
    std::vector<double> ku_scores;  // flat KU order (taxonomy order)
    std::vector<double> ka_scores;  // taxonomy order
    std::vector<double> ku_shares;  // percent, sum to 100 when any match
    std::vector<double> ka_shares;
    std::vector<double> kt_scores;  // flat KT order, used for key-topic picks
    std::size_t matched_docs = 0;
    std::size_t total_docs = 0;
    DivisorMode divisor_mode = DivisorMode::matched_docs;
    bool no_matches = false;  // shares are all zero in that case
};

ScoreTable aggregate(const TFMatrix& matrix, const KeywordIndex& index,
                     const Partition& part, DivisorMode mode);

// jeopardy (hack-quest folded in) and attack-defense; unknown tags are errors.
std::vector<Partition> partition_by_format(const std::vector<Document>& docs);

// One partition per distinct year, ascending.
std::vector<Partition> partition_by_year(const std::vector<Document>& docs);

struct SummaryStats {
    long long total_matches = 0;
    double mean_matches_per_doc = 0.0;
    std::size_t unmatched_keywords = 0;
    std::vector<std::pair<std::string, long long>> top_keywords;  // descending
    std::vector<std::string> zero_kus;  // KUs whose keywords never matched
};

SummaryStats corpus_summary(const TFMatrix& matrix, const KeywordIndex& index,
                            std::size_t top_n = 10);

std::string score_table_to_csv(const ScoreTable& table, const KeywordIndex& index);
std::string score_table_to_json(const ScoreTable& table, const KeywordIndex& index);

}  // namespace taxominer
