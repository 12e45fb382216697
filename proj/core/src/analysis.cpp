#include "taxominer/analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "taxominer/errors.hpp"

namespace taxominer {

NTFRow normalize_row(const TFRow& tf) {
    NTFRow out;
    out.doc_id = tf.doc_id;
    long long total = tf.total();
    if (total == 0) return out;
    for (const auto& [id, count] : tf.counts)
        out.values[id] = static_cast<double>(count) / static_cast<double>(total);
    return out;
}

ScoreTable aggregate(const TFMatrix& matrix, const KeywordIndex& index,
                     const Partition& part, DivisorMode mode) {
    std::unordered_map<std::string, const TFRow*> by_id;
    for (const TFRow& row : matrix.rows) by_id[row.doc_id] = &row;
    for (const std::string& id : part.doc_ids)
        if (!by_id.count(id))
            throw InputError("partition \"" + part.label +
                             "\" references unknown doc_id \"" + id + "\"");

    ScoreTable table;
    table.partition = part.label;
    table.divisor_mode = mode;
    table.total_docs = part.doc_ids.size();
    table.ku_scores.assign(index.kus.size(), 0.0);
    table.ka_scores.assign(index.ka_names.size(), 0.0);
    table.kt_scores.assign(index.kts.size(), 0.0);

    for (const std::string& id : part.doc_ids) {
        NTFRow ntf = normalize_row(*by_id.at(id));
        if (ntf.values.empty()) continue;
        ++table.matched_docs;
        for (const auto& [kw, v] : ntf.values) {
            table.ku_scores[index.keyword_ku[kw]] += v;
            table.kt_scores[index.keyword_kt[kw]] += v;
        }
    }

    std::size_t divisor =
        mode == DivisorMode::all_docs ? table.total_docs : table.matched_docs;
    if (divisor > 0) {
        for (double& s : table.ku_scores) s /= static_cast<double>(divisor);
        for (double& s : table.kt_scores) s /= static_cast<double>(divisor);
    }
    // KA = sum of child KUs, by construction
    for (std::size_t ku = 0; ku < index.kus.size(); ++ku)
        table.ka_scores[index.kus[ku].ka] += table.ku_scores[ku];

    double ku_total = 0.0, ka_total = 0.0;
    for (double s : table.ku_scores) ku_total += s;
    for (double s : table.ka_scores) ka_total += s;

    table.ku_shares.assign(index.kus.size(), 0.0);
    table.ka_shares.assign(index.ka_names.size(), 0.0);
    if (ku_total > 0.0) {
        for (std::size_t i = 0; i < table.ku_scores.size(); ++i)
            table.ku_shares[i] = table.ku_scores[i] / ku_total * 100.0;
        for (std::size_t i = 0; i < table.ka_scores.size(); ++i)
            table.ka_shares[i] = table.ka_scores[i] / ka_total * 100.0;
    } else {
        table.no_matches = true;
    }
    return table;
}

namespace {

// jeopardy | attack-defense, with hack-quest folded into jeopardy
std::string canonical_format(const Document& doc) {
    std::string f = fold_case(doc.format);
    std::replace(f.begin(), f.end(), '_', '-');
    if (f == "jeopardy" || f == "hack-quest") return "jeopardy";
    if (f == "attack-defense") return "attack-defense";
    throw InputError("document \"" + doc.id + "\" has unknown format tag \"" +
                     doc.format + "\"");
}

}  // namespace

std::vector<Partition> partition_by_format(const std::vector<Document>& docs) {
    Partition jeopardy{"jeopardy", {}};
    Partition ad{"attack-defense", {}};
    for (const Document& doc : docs) {
        if (canonical_format(doc) == "jeopardy")
            jeopardy.doc_ids.insert(doc.id);
        else
            ad.doc_ids.insert(doc.id);
    }
    return {std::move(jeopardy), std::move(ad)};
}

std::vector<Partition> partition_by_year(const std::vector<Document>& docs) {
    std::map<int, Partition> by_year;
    for (const Document& doc : docs) {
        if (doc.year < 1000 || doc.year > 9999)
            throw InputError("document \"" + doc.id + "\" has no 4-digit year");
        auto& part = by_year[doc.year];
        part.label = std::to_string(doc.year);
        part.doc_ids.insert(doc.id);
    }
    std::vector<Partition> out;
    out.reserve(by_year.size());
    for (auto& [year, part] : by_year) out.push_back(std::move(part));
    return out;
}

SummaryStats corpus_summary(const TFMatrix& matrix, const KeywordIndex& index,
                            std::size_t top_n) {
    SummaryStats s;
    std::vector<long long> per_keyword(index.size(), 0);
    for (const TFRow& row : matrix.rows)
        for (const auto& [id, count] : row.counts) {
            per_keyword[id] += count;
            s.total_matches += count;
        }
    if (!matrix.rows.empty())
        s.mean_matches_per_doc =
            static_cast<double>(s.total_matches) / static_cast<double>(matrix.rows.size());

    std::vector<int> order(index.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return per_keyword[a] > per_keyword[b];
    });
    for (int id : order) {
        if (per_keyword[id] == 0) ++s.unmatched_keywords;
        else if (s.top_keywords.size() < top_n)
            s.top_keywords.emplace_back(index.keywords[id].text, per_keyword[id]);
    }

    std::vector<bool> ku_hit(index.kus.size(), false);
    for (std::size_t i = 0; i < per_keyword.size(); ++i)
        if (per_keyword[i] > 0) ku_hit[index.keyword_ku[i]] = true;
    for (std::size_t ku = 0; ku < ku_hit.size(); ++ku)
        if (!ku_hit[ku]) s.zero_kus.push_back(index.kus[ku].name);
    return s;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

}  // namespace

std::string score_table_to_csv(const ScoreTable& table, const KeywordIndex& index) {
    std::ostringstream out;
    out << "level,name,score,share_percent\n";
    out << std::fixed;
    for (std::size_t i = 0; i < index.ka_names.size(); ++i)
        out << "KA," << csv_field(index.ka_names[i]) << ','
            << std::setprecision(9) << table.ka_scores[i] << ','
            << std::setprecision(2) << table.ka_shares[i] << '\n';
    for (std::size_t i = 0; i < index.kus.size(); ++i)
        out << "KU," << csv_field(index.kus[i].name) << ','
            << std::setprecision(9) << table.ku_scores[i] << ','
            << std::setprecision(2) << table.ku_shares[i] << '\n';
    return out.str();
}

std::string score_table_to_json(const ScoreTable& table, const KeywordIndex& index) {
    nlohmann::json j;
    j["partition"] = table.partition;
    j["divisor_mode"] =
        table.divisor_mode == DivisorMode::all_docs ? "all_docs" : "matched_docs";
    j["matched_docs"] = table.matched_docs;
    j["total_docs"] = table.total_docs;
    j["no_matches"] = table.no_matches;
    auto& kas = j["knowledge_areas"] = nlohmann::json::array();
    for (std::size_t i = 0; i < index.ka_names.size(); ++i)
        kas.push_back({{"name", index.ka_names[i]},
                       {"score", table.ka_scores[i]},
                       {"share_percent", table.ka_shares[i]}});
    auto& kus = j["knowledge_units"] = nlohmann::json::array();
    for (std::size_t i = 0; i < index.kus.size(); ++i)
        kus.push_back({{"name", index.kus[i].name},
                       {"knowledge_area", index.ka_names[index.kus[i].ka]},
                       {"score", table.ku_scores[i]},
                       {"share_percent", table.ku_shares[i]}});
    return j.dump(2) + "\n";
}

}  // namespace taxominer
