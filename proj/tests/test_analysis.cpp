#include <doctest.h>

#include <random>

#include "taxominer/analysis.hpp"
#include "taxominer/errors.hpp"

using namespace taxominer;

namespace {

// KA1 with KU1={k1,k2,k3}, KU2={k4,k5}, KU3={k6,k7,k8}
Taxonomy grouped_taxonomy() {
    Taxonomy t;
    t.areas.push_back(
        {"KA1",
         {{"KU1", {{"KT1", {{"kw1", false, -1}, {"kw2", false, -1}, {"kw3", false, -1}}}}},
          {"KU2", {{"KT2", {{"kw4", false, -1}, {"kw5", false, -1}}}}},
          {"KU3", {{"KT3", {{"kw6", false, -1}, {"kw7", false, -1}, {"kw8", false, -1}}}}}}});
    return t;
}

TFRow make_row(const std::string& id, const std::vector<int>& dense) {
    TFRow row;
    row.doc_id = id;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] > 0) row.counts[static_cast<int>(i)] = dense[i];
    return row;
}

}  // namespace

TEST_CASE("row normalization worked example is exact") {
    NTFRow ntf = normalize_row(make_row("w1", {0, 0, 1, 0, 0, 0, 3, 1}));
    REQUIRE(ntf.values.size() == 3);
    CHECK(ntf.values.at(2) == 0.2);
    CHECK(ntf.values.at(6) == 0.6);
    CHECK(ntf.values.at(7) == 0.2);
    double sum = 0.0;
    for (const auto& [id, v] : ntf.values) sum += v;
    CHECK(sum == 1.0);
}

TEST_CASE("normalization edge cases") {
    CHECK(normalize_row(make_row("empty", {0, 0, 0})).values.empty());
    NTFRow half = normalize_row(make_row("sym", {2, 2}));
    CHECK(half.values.at(0) == 0.5);
    CHECK(half.values.at(1) == 0.5);
}

TEST_CASE("KU aggregation worked example is exact") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("w1", {0, 0, 1, 0, 0, 0, 3, 1})};

    ScoreTable table = aggregate(matrix, idx, {"w1-only", {"w1"}},
                                 DivisorMode::matched_docs);
    REQUIRE(table.ku_scores.size() == 3);
    CHECK(table.ku_scores[0] == 0.2);
    CHECK(table.ku_scores[1] == 0.0);
    CHECK(table.ku_scores[2] == 0.8);
    CHECK(table.ka_scores[0] == 1.0);
    CHECK(table.matched_docs == 1);
}

TEST_CASE("two-doc aggregation with matched_docs divisor") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("a", {3, 0, 0, 0, 0, 0, 0, 0}),   // entirely KU1
                   make_row("b", {0, 0, 0, 2, 5, 0, 0, 0})};  // entirely KU2
    ScoreTable table = aggregate(matrix, idx, {"both", {"a", "b"}},
                                 DivisorMode::matched_docs);
    CHECK(table.ku_scores[0] == 0.5);
    CHECK(table.ku_scores[1] == 0.5);
    CHECK(table.ku_scores[2] == 0.0);
    CHECK(table.ku_shares[0] == 50.0);
    CHECK(table.ku_shares[1] == 50.0);
}

TEST_CASE("divisor modes differ when some docs are unmatched") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("a", {1, 0, 0, 0, 0, 0, 0, 0}),
                   make_row("b", {0, 0, 0, 0, 0, 0, 0, 0})};
    Partition part{"p", {"a", "b"}};
    ScoreTable matched = aggregate(matrix, idx, part, DivisorMode::matched_docs);
    ScoreTable all = aggregate(matrix, idx, part, DivisorMode::all_docs);
    CHECK(matched.ku_scores[0] == 1.0);
    CHECK(all.ku_scores[0] == 0.5);
    CHECK(matched.matched_docs == 1);
    CHECK(matched.total_docs == 2);
    // shares are divisor-independent
    CHECK(matched.ku_shares[0] == all.ku_shares[0]);
}

TEST_CASE("partition with zero matches reports the flag") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("a", {0, 0, 0, 0, 0, 0, 0, 0})};
    ScoreTable table = aggregate(matrix, idx, {"empty", {"a"}},
                                 DivisorMode::matched_docs);
    CHECK(table.no_matches);
    for (double s : table.ku_scores) CHECK(s == 0.0);
    for (double s : table.ku_shares) CHECK(s == 0.0);
}

TEST_CASE("aggregate rejects unknown doc ids") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    CHECK_THROWS_AS(aggregate(matrix, idx, {"p", {"ghost"}}, DivisorMode::matched_docs),
                    InputError);
}

TEST_CASE("normalization and share invariants hold on random input") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    std::mt19937 rng(99);
    for (int iter = 0; iter < 300; ++iter) {
        TFMatrix matrix;
        matrix.n_keywords = 8;
        Partition part{"p", {}};
        int docs = 1 + static_cast<int>(rng() % 6);
        for (int d = 0; d < docs; ++d) {
            std::vector<int> dense(8, 0);
            for (int k = 0; k < 8; ++k)
                if (rng() % 3 == 0) dense[k] = static_cast<int>(rng() % 9 + 1);
            std::string id = "d" + std::to_string(d);
            matrix.rows.push_back(make_row(id, dense));
            part.doc_ids.insert(id);

            NTFRow ntf = normalize_row(matrix.rows.back());
            if (!ntf.values.empty()) {
                double sum = 0.0;
                for (const auto& [kid, v] : ntf.values) sum += v;
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
        ScoreTable t = aggregate(matrix, idx, part, DivisorMode::matched_docs);
        // KA equals the sum of its child KUs exactly, by construction
        CHECK(t.ka_scores[0] == t.ku_scores[0] + t.ku_scores[1] + t.ku_scores[2]);
        if (!t.no_matches) {
            double ka_share_sum = 0.0, ku_share_sum = 0.0;
            for (double s : t.ka_shares) ka_share_sum += s;
            for (double s : t.ku_shares) ku_share_sum += s;
            CHECK(ka_share_sum == doctest::Approx(100.0).epsilon(1e-8));
            CHECK(ku_share_sum == doctest::Approx(100.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("format partitioning") {
    std::vector<Document> docs = {{"d1", "", 2018, "jeopardy", ""},
                                  {"d2", "", 2018, "Jeopardy", ""},
                                  {"d3", "", 2018, "attack-defense", ""}};
    auto parts = partition_by_format(docs);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].label == "jeopardy");
    CHECK(parts[0].doc_ids == std::set<std::string>{"d1", "d2"});
    CHECK(parts[1].label == "attack-defense");
    CHECK(parts[1].doc_ids == std::set<std::string>{"d3"});
}

TEST_CASE("hack-quest folds into jeopardy; unknown tags error") {
    std::vector<Document> docs = {{"d1", "", 2018, "hack-quest", ""},
                                  {"d2", "", 2018, "hack_quest", ""}};
    auto parts = partition_by_format(docs);
    CHECK(parts[0].doc_ids.size() == 2);
    CHECK(parts[1].doc_ids.empty());  // both partitions always present

    std::vector<Document> bad = {{"d1", "", 2018, "quiz", ""}};
    CHECK_THROWS_AS(partition_by_format(bad), InputError);
}

TEST_CASE("year partitioning") {
    std::vector<Document> docs = {{"a", "", 2012, "jeopardy", ""},
                                  {"b", "", 2020, "jeopardy", ""},
                                  {"c", "", 2012, "jeopardy", ""}};
    auto parts = partition_by_year(docs);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].label == "2012");
    CHECK(parts[0].doc_ids.size() == 2);
    CHECK(parts[1].label == "2020");
    CHECK(parts[1].doc_ids.size() == 1);

    CHECK(partition_by_year({}).empty());
    std::vector<Document> bad = {{"a", "", 77, "jeopardy", ""}};
    CHECK_THROWS_AS(partition_by_year(bad), InputError);
}

TEST_CASE("corpus summary on the reference matrix") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("w1", {0, 0, 1, 0, 0, 0, 3, 1}),
                   make_row("w2", {0, 0, 1, 2, 2, 0, 0, 0}),
                   make_row("w3", {5, 0, 1, 4, 0, 0, 1, 0})};
    SummaryStats s = corpus_summary(matrix, idx);
    CHECK(s.total_matches == 21);
    CHECK(s.mean_matches_per_doc == doctest::Approx(7.0));
    CHECK(s.unmatched_keywords == 2);  // kw2, kw6
    REQUIRE(!s.top_keywords.empty());
    CHECK(s.top_keywords[0].first == "kw4");  // 6 hits
    CHECK(s.top_keywords[0].second == 6);
    CHECK(s.zero_kus.empty());  // every KU has at least one matched keyword
}

TEST_CASE("corpus summary: empty corpus and zero KUs") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix empty;
    empty.n_keywords = 8;
    SummaryStats s = corpus_summary(empty, idx);
    CHECK(s.total_matches == 0);
    CHECK(s.mean_matches_per_doc == 0.0);
    CHECK(s.zero_kus.size() == 3);

    TFMatrix ku1_only;
    ku1_only.n_keywords = 8;
    ku1_only.rows = {make_row("a", {1, 0, 0, 0, 0, 0, 0, 0})};
    CHECK(corpus_summary(ku1_only, idx).zero_kus ==
          std::vector<std::string>{"KU2", "KU3"});
}

TEST_CASE("score table exports") {
    KeywordIndex idx = keyword_index(grouped_taxonomy());
    TFMatrix matrix;
    matrix.n_keywords = 8;
    matrix.rows = {make_row("w1", {0, 0, 1, 0, 0, 0, 3, 1})};
    ScoreTable table = aggregate(matrix, idx, {"overall", {"w1"}},
                                 DivisorMode::matched_docs);
    std::string csv = score_table_to_csv(table, idx);
    CHECK(csv.find("level,name,score,share_percent") == 0);
    CHECK(csv.find("KU,KU1,0.200000000,20.00") != std::string::npos);
    CHECK(csv.find("KU,KU3,0.800000000,80.00") != std::string::npos);
    std::string json = score_table_to_json(table, idx);
    CHECK(json.find("\"matched_docs\": 1") != std::string::npos);
}
