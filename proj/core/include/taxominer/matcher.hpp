#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxominer/porter.hpp"
#include "taxominer/taxonomy.hpp"
#include "taxominer/textprep.hpp"

namespace taxominer {

// One row of the term-frequency matrix C; zero counts are absent.
struct TFRow {
    std::string doc_id;
    std::map<int, int> counts;  // keyword id -> count >= 1

    long long total() const;
};

struct TFMatrix {
    std::vector<TFRow> rows;  // sorted by doc_id, ids unique
    int n_keywords = 0;

    std::size_t n_documents() const { return rows.size(); }
};

// Keyword patterns over token sequences. Abbreviations are matched as exact
// lowercase tokens, everything else by stem.
class CompiledMatcher {
public:
    CompiledMatcher(const KeywordIndex& index, const Stemmer& stemmer = default_stemmer());

    // Greedy left-to-right, non-overlapping per keyword; distinct keywords
    // are counted independently (nested phrases each hit).
    TFRow count_keywords(const TokenStream& doc) const;

    long long total_hits(const TokenStream& doc) const;

    int n_keywords() const { return static_cast<int>(patterns_.size()); }
    const KeywordIndex& index() const { return *index_; }

private:
    struct Pattern {
        std::vector<std::string> tokens;  // stems, or exact tokens for abbreviations
        bool abbreviation = false;
    };

    const KeywordIndex* index_;
    const Stemmer* stemmer_;
    std::vector<Pattern> patterns_;
    // first pattern token -> candidate keyword ids, split by token space
    std::unordered_map<std::string, std::vector<int>> stem_heads_;
    std::unordered_map<std::string, std::vector<int>> exact_heads_;
};

struct CorpusDoc {
    std::string id;
    std::string text;  // cleaned
};

// One TFRow per document, merged in doc_id order; the result is identical
// for any worker count.
TFMatrix build_matrix(const CompiledMatcher& m, const std::vector<CorpusDoc>& corpus,
                      int n_workers = 1);

// Sparse triplet CSV: doc_id,keyword_id,count
std::string matrix_to_csv(const TFMatrix& m);
// Legend CSV: keyword_id,text,abbreviation,knowledge_topic,knowledge_unit,knowledge_area
std::string legend_to_csv(const KeywordIndex& index);

}  // namespace taxominer
