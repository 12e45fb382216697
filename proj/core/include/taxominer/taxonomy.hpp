#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace taxominer {

struct Keyword {
    std::string text;            // lowercase-folded, trimmed phrase
    bool is_abbreviation = false;
    int id = -1;                 // dense index, assigned by keyword_index()
};

struct KnowledgeTopic {
    std::string name;
    std::vector<Keyword> keywords;
};

struct KnowledgeUnit {
    std::string name;
    std::vector<KnowledgeTopic> topics;
};

struct KnowledgeArea {
    std::string name;
    std::vector<KnowledgeUnit> units;
};

struct Taxonomy {
    std::string name;
    std::vector<KnowledgeArea> areas;
};

struct ValidationFinding {
    enum class Level { error, warning };
    Level level;
    std::string path;     // e.g. "areas[0].units[2]"
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;

    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool ok() const { return error_count() == 0; }
};

// Owner path of a keyword inside the hierarchy, by index.
struct OwnerPath {
    int ka = -1;
    int ku = -1;   // index within the KA
    int kt = -1;   // index within the KU
};

// Flattened view of a Taxonomy: dense keyword ids in document order plus
// the lookup tables the matcher and the aggregation stage need.
struct KeywordIndex {
    std::vector<Keyword> keywords;        // id -> keyword
    std::vector<OwnerPath> owner;         // id -> hierarchy path
    std::vector<std::string> ka_names;    // taxonomy order

    struct KuInfo {
        std::string name;
        int ka = -1;                      // index into ka_names
    };
    std::vector<KuInfo> kus;              // flat KU list in taxonomy order
    std::vector<int> keyword_ku;          // id -> flat KU index
    std::vector<int> keyword_kt;          // id -> flat KT index
    struct KtInfo {
        std::string name;
        int ku = -1;                      // flat KU index
    };
    std::vector<KtInfo> kts;              // flat KT list in taxonomy order

    std::size_t min_keyword_length = 0;   // in characters, over all keywords

    std::size_t size() const { return keywords.size(); }
};

// Parses the JSON taxonomy format (snake_case keys or the capitalized
// variants like "Knowledge Units"). Throws ParseError on malformed JSON,
// SchemaError on structural problems, IntegrityError on duplicate or
// empty keywords.
Taxonomy parse_taxonomy(std::string_view json_text);

// Inverse of parse_taxonomy up to formatting; emits the snake_case schema.
std::string serialize_taxonomy(const Taxonomy& t);

ValidationReport validate_taxonomy(const Taxonomy& t);

// Requires a valid taxonomy; throws IntegrityError otherwise.
KeywordIndex keyword_index(const Taxonomy& t);

Taxonomy load_taxonomy_file(const std::string& path);

// ASCII case-folding used for keywords and tokens throughout.
std::string fold_case(std::string_view s);
std::string trim(std::string_view s);

// Number of UTF-8 code points in s (invalid bytes count as one each).
std::size_t utf8_length(std::string_view s);

}  // namespace taxominer
