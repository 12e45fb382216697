#include "taxominer/matcher.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "taxominer/errors.hpp"

namespace taxominer {

long long TFRow::total() const {
    long long sum = 0;
    for (const auto& [id, c] : counts) sum += c;
    return sum;
}

CompiledMatcher::CompiledMatcher(const KeywordIndex& index, const Stemmer& stemmer)
    : index_(&index), stemmer_(&stemmer) {
    patterns_.reserve(index.keywords.size());
    for (const Keyword& kw : index.keywords) {
        Pattern p;
        p.abbreviation = kw.is_abbreviation;
        TokenStream words = tokenize(kw.text);
        for (const std::string& w : words.tokens)
            p.tokens.push_back(p.abbreviation ? w : stemmer.stem(w));
        if (p.tokens.empty())
            throw IntegrityError("keyword \"" + kw.text + "\" has no tokens");
        int id = static_cast<int>(patterns_.size());
        (p.abbreviation ? exact_heads_ : stem_heads_)[p.tokens.front()].push_back(id);
        patterns_.push_back(std::move(p));
    }
}

TFRow CompiledMatcher::count_keywords(const TokenStream& doc) const {
    TFRow row;
    const std::size_t n = doc.tokens.size();
    if (n == 0) return row;

    std::vector<std::string> stems(n);
    for (std::size_t i = 0; i < n; ++i) stems[i] = stemmer_->stem(doc.tokens[i]);

    // next position a keyword may match at (greedy non-overlap per keyword)
    std::unordered_map<int, std::size_t> next_ok;

    auto try_candidates = [&](const std::vector<int>& cands,
                              const std::vector<std::string>& space, std::size_t i) {
        for (int id : cands) {
            const Pattern& p = patterns_[id];
            if (i + p.tokens.size() > n) continue;
            auto it = next_ok.find(id);
            if (it != next_ok.end() && i < it->second) continue;
            bool hit = true;
            for (std::size_t k = 1; hit && k < p.tokens.size(); ++k)
                hit = space[i + k] == p.tokens[k];
            if (hit) {
                ++row.counts[id];
                next_ok[id] = i + p.tokens.size();
            }
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (auto it = exact_heads_.find(doc.tokens[i]); it != exact_heads_.end())
            try_candidates(it->second, doc.tokens, i);
        if (auto it = stem_heads_.find(stems[i]); it != stem_heads_.end())
            try_candidates(it->second, stems, i);
    }
    return row;
}

long long CompiledMatcher::total_hits(const TokenStream& doc) const {
    return count_keywords(doc).total();
}

TFMatrix build_matrix(const CompiledMatcher& m, const std::vector<CorpusDoc>& corpus,
                      int n_workers) {
    {
        std::vector<std::string> ids;
        ids.reserve(corpus.size());
        for (const auto& d : corpus) ids.push_back(d.id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw InputError("duplicate doc_id in corpus");
    }

    std::vector<TFRow> rows(corpus.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            rows[i] = m.count_keywords(tokenize(corpus[i].text));
            rows[i].doc_id = corpus[i].id;
        }
    };

    if (n_workers <= 1 || corpus.size() < 2) {
        work(0, corpus.size());
    } else {
        std::size_t workers = std::min<std::size_t>(n_workers, corpus.size());
        std::vector<std::thread> pool;
        std::size_t chunk = (corpus.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t b = w * chunk;
            std::size_t e = std::min(corpus.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) t.join();
    }

    std::sort(rows.begin(), rows.end(),
              [](const TFRow& a, const TFRow& b) { return a.doc_id < b.doc_id; });

    TFMatrix out;
    out.rows = std::move(rows);
    out.n_keywords = m.n_keywords();
    return out;
}

std::string matrix_to_csv(const TFMatrix& m) {
    std::ostringstream out;
    out << "doc_id,keyword_id,count\n";
    for (const TFRow& row : m.rows)
        for (const auto& [id, count] : row.counts)
            out << row.doc_id << ',' << id << ',' << count << '\n';
    return out.str();
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string legend_to_csv(const KeywordIndex& index) {
    std::ostringstream out;
    out << "keyword_id,text,abbreviation,knowledge_topic,knowledge_unit,knowledge_area\n";
    for (std::size_t i = 0; i < index.keywords.size(); ++i) {
        const Keyword& kw = index.keywords[i];
        int kt = index.keyword_kt[i];
        int ku = index.keyword_ku[i];
        int ka = index.kus[ku].ka;
        out << kw.id << ',' << csv_escape(kw.text) << ','
            << (kw.is_abbreviation ? "true" : "false") << ','
            << csv_escape(index.kts[kt].name) << ',' << csv_escape(index.kus[ku].name)
            << ',' << csv_escape(index.ka_names[ka]) << '\n';
    }
    return out.str();
}

}  // namespace taxominer
