#include "taxominer/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "taxominer/errors.hpp"

namespace taxominer {

using nlohmann::json;

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(std::count_if(
        findings.begin(), findings.end(), [](const ValidationFinding& f) {
            return f.level == ValidationFinding::Level::error;
        }));
}

std::size_t ValidationReport::warning_count() const {
    return findings.size() - error_count();
}

std::string fold_case(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n\f\v";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;  // skip continuation bytes
    return n;
}

namespace {

bool all_uppercase_letters(std::string_view s) {
    if (s.empty()) return false;
    for (unsigned char c : s)
        if (!std::isupper(c)) return false;
    return true;
}

// Accepts both the published key spelling and the snake_case one.
const json* find_key(const json& obj, std::initializer_list<const char*> names) {
    for (const char* n : names) {
        auto it = obj.find(n);
        if (it != obj.end()) return &*it;
    }
    return nullptr;
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError("taxonomy schema error at " + path + ": " + what);
}

Keyword parse_keyword(const json& j, const std::string& path) {
    Keyword kw;
    if (j.is_string()) {
        std::string raw = trim(j.get<std::string>());
        kw.is_abbreviation = all_uppercase_letters(raw);
        kw.text = fold_case(raw);
    } else if (j.is_object()) {
        const json* text = find_key(j, {"text"});
        if (!text || !text->is_string())
            schema_fail(path, "keyword object needs a string \"text\" field");
        kw.text = fold_case(trim(text->get<std::string>()));
        if (const json* abbr = find_key(j, {"abbreviation", "is_abbreviation"})) {
            if (!abbr->is_boolean())
                schema_fail(path, "\"abbreviation\" must be a boolean");
            kw.is_abbreviation = abbr->get<bool>();
        } else {
            kw.is_abbreviation = all_uppercase_letters(trim(text->get<std::string>()));
        }
    } else {
        schema_fail(path, "keyword must be a string or an object");
    }
    if (kw.text.empty())
        throw IntegrityError("empty keyword at " + path);
    return kw;
}

template <typename Child>
std::vector<Child> parse_children(const json& obj, const std::string& path,
                                  std::initializer_list<const char*> keys,
                                  Child (*parse_one)(const json&, const std::string&),
                                  const char* what) {
    const json* arr = find_key(obj, keys);
    if (!arr || !arr->is_array() || arr->empty())
        schema_fail(path, std::string("expected a nonempty array of ") + what);
    std::vector<Child> out;
    out.reserve(arr->size());
    for (std::size_t i = 0; i < arr->size(); ++i)
        out.push_back(parse_one((*arr)[i],
                                path + "." + what + "[" + std::to_string(i) + "]"));
    return out;
}

std::string parse_name(const json& obj, const std::string& path,
                       std::initializer_list<const char*> keys) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    const json* name = find_key(obj, keys);
    if (!name || !name->is_string()) schema_fail(path, "missing string name");
    return trim(name->get<std::string>());
}

KnowledgeTopic parse_kt(const json& j, const std::string& path) {
    KnowledgeTopic kt;
    kt.name = parse_name(j, path, {"name", "Knowledge Topic"});
    const json* arr = find_key(j, {"keywords", "Keywords"});
    if (!arr || !arr->is_array() || arr->empty())
        schema_fail(path, "expected a nonempty array of keywords");
    for (std::size_t i = 0; i < arr->size(); ++i)
        kt.keywords.push_back(
            parse_keyword((*arr)[i], path + ".keywords[" + std::to_string(i) + "]"));
    return kt;
}

KnowledgeUnit parse_ku(const json& j, const std::string& path) {
    KnowledgeUnit ku;
    ku.name = parse_name(j, path, {"name", "Knowledge Unit"});
    ku.topics = parse_children<KnowledgeTopic>(
        j, path, {"knowledge_topics", "Knowledge Topics"}, parse_kt, "knowledge_topics");
    return ku;
}

KnowledgeArea parse_ka(const json& j, const std::string& path) {
    KnowledgeArea ka;
    ka.name = parse_name(j, path, {"name", "Knowledge Area"});
    ka.units = parse_children<KnowledgeUnit>(
        j, path, {"knowledge_units", "Knowledge Units"}, parse_ku, "knowledge_units");
    return ka;
}

void check_duplicates(const Taxonomy& t) {
    // keyword text -> first owner description
    std::unordered_map<std::string, std::string> seen;
    for (const auto& ka : t.areas)
        for (const auto& ku : ka.units)
            for (const auto& kt : ku.topics)
                for (const auto& kw : kt.keywords) {
                    std::string owner = ka.name + " > " + ku.name + " > " + kt.name;
                    auto [it, inserted] = seen.emplace(kw.text, owner);
                    if (!inserted)
                        throw IntegrityError("keyword \"" + kw.text +
                                             "\" appears under both \"" + it->second +
                                             "\" and \"" + owner + "\"");
                }
}

}  // namespace

Taxonomy parse_taxonomy(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("taxonomy JSON parse error: ") + e.what());
    }

    Taxonomy t;
    const json* areas = nullptr;
    if (root.is_object()) {
        if (const json* name = find_key(root, {"name"}); name && name->is_string())
            t.name = trim(name->get<std::string>());
        areas = find_key(root, {"knowledge_areas", "Knowledge Areas"});
    } else if (root.is_array()) {
        areas = &root;  // bare array of KA objects
    }
    if (!areas || !areas->is_array() || areas->empty())
        schema_fail("$", "expected a nonempty array of knowledge_areas");

    for (std::size_t i = 0; i < areas->size(); ++i)
        t.areas.push_back(
            parse_ka((*areas)[i], "knowledge_areas[" + std::to_string(i) + "]"));

    check_duplicates(t);
    return t;
}

std::string serialize_taxonomy(const Taxonomy& t) {
    json root;
    root["name"] = t.name;
    json& areas = root["knowledge_areas"] = json::array();
    for (const auto& ka : t.areas) {
        json jka;
        jka["name"] = ka.name;
        json& units = jka["knowledge_units"] = json::array();
        for (const auto& ku : ka.units) {
            json jku;
            jku["name"] = ku.name;
            json& topics = jku["knowledge_topics"] = json::array();
            for (const auto& kt : ku.topics) {
                json jkt;
                jkt["name"] = kt.name;
                json& kws = jkt["keywords"] = json::array();
                for (const auto& kw : kt.keywords) {
                    if (kw.is_abbreviation)
                        kws.push_back(json{{"text", kw.text}, {"abbreviation", true}});
                    else
                        kws.push_back(kw.text);
                }
                topics.push_back(std::move(jkt));
            }
            units.push_back(std::move(jku));
        }
        areas.push_back(std::move(jka));
    }
    return root.dump(2) + "\n";
}

ValidationReport validate_taxonomy(const Taxonomy& t) {
    ValidationReport report;
    auto error = [&](std::string path, std::string msg) {
        report.findings.push_back(
            {ValidationFinding::Level::error, std::move(path), std::move(msg)});
    };
    auto warning = [&](std::string path, std::string msg) {
        report.findings.push_back(
            {ValidationFinding::Level::warning, std::move(path), std::move(msg)});
    };

    if (t.areas.empty()) error("$", "taxonomy has no knowledge areas");

    std::unordered_map<std::string, std::string> seen_keywords;
    auto check_sibling_names = [&](const auto& children, const std::string& path) {
        std::unordered_map<std::string, int> names;
        for (const auto& c : children)
            if (++names[c.name] == 2)
                error(path, "duplicate sibling name \"" + c.name + "\"");
    };

    check_sibling_names(t.areas, "$");
    for (std::size_t a = 0; a < t.areas.size(); ++a) {
        const auto& ka = t.areas[a];
        std::string apath = "areas[" + std::to_string(a) + "]";
        if (ka.name.empty()) warning(apath, "empty knowledge area name");
        if (ka.units.empty()) error(apath, "knowledge area has no knowledge units");
        check_sibling_names(ka.units, apath);
        for (std::size_t u = 0; u < ka.units.size(); ++u) {
            const auto& ku = ka.units[u];
            std::string upath = apath + ".units[" + std::to_string(u) + "]";
            if (ku.name.empty()) warning(upath, "empty knowledge unit name");
            if (ku.topics.empty()) error(upath, "knowledge unit has no knowledge topics");
            check_sibling_names(ku.topics, upath);
            for (std::size_t k = 0; k < ku.topics.size(); ++k) {
                const auto& kt = ku.topics[k];
                std::string tpath = upath + ".topics[" + std::to_string(k) + "]";
                if (kt.name.empty()) warning(tpath, "empty knowledge topic name");
                if (kt.keywords.empty()) error(tpath, "knowledge topic has no keywords");
                for (const auto& kw : kt.keywords) {
                    if (kw.text.empty()) {
                        error(tpath, "empty keyword");
                        continue;
                    }
                    if (kw.text != trim(kw.text))
                        error(tpath, "keyword \"" + kw.text + "\" has stray whitespace");
                    if (kw.text != fold_case(kw.text))
                        error(tpath, "keyword \"" + kw.text + "\" is not case-folded");
                    if (utf8_length(kw.text) < 2)
                        warning(tpath, "single-character keyword \"" + kw.text + "\"");
                    std::string folded = fold_case(kw.text);
                    auto [it, inserted] = seen_keywords.emplace(folded, tpath);
                    if (!inserted)
                        error(tpath, "keyword \"" + folded + "\" also appears at " +
                                         it->second);
                }
            }
        }
    }
    return report;
}

KeywordIndex keyword_index(const Taxonomy& t) {
    ValidationReport report = validate_taxonomy(t);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "cannot index an invalid taxonomy:";
        for (const auto& f : report.findings)
            if (f.level == ValidationFinding::Level::error)
                msg << " [" << f.path << "] " << f.message << ";";
        throw IntegrityError(msg.str());
    }

    KeywordIndex idx;
    idx.min_keyword_length = 0;
    for (std::size_t a = 0; a < t.areas.size(); ++a) {
        const auto& ka = t.areas[a];
        idx.ka_names.push_back(ka.name);
        for (std::size_t u = 0; u < ka.units.size(); ++u) {
            const auto& ku = ka.units[u];
            int ku_flat = static_cast<int>(idx.kus.size());
            idx.kus.push_back({ku.name, static_cast<int>(a)});
            for (std::size_t k = 0; k < ku.topics.size(); ++k) {
                const auto& kt = ku.topics[k];
                int kt_flat = static_cast<int>(idx.kts.size());
                idx.kts.push_back({kt.name, ku_flat});
                for (const auto& kw : kt.keywords) {
                    Keyword copy = kw;
                    copy.id = static_cast<int>(idx.keywords.size());
                    idx.keywords.push_back(std::move(copy));
                    idx.owner.push_back({static_cast<int>(a), static_cast<int>(u),
                                         static_cast<int>(k)});
                    idx.keyword_ku.push_back(ku_flat);
                    idx.keyword_kt.push_back(kt_flat);
                    std::size_t len = utf8_length(kw.text);
                    if (idx.min_keyword_length == 0 || len < idx.min_keyword_length)
                        idx.min_keyword_length = len;
                }
            }
        }
    }
    return idx;
}

Taxonomy load_taxonomy_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open taxonomy file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_taxonomy(buf.str());
}

}  // namespace taxominer
