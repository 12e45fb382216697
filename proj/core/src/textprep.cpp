#include "taxominer/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "taxominer/taxonomy.hpp"

namespace taxominer {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Replaces malformed UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view in, CleaningReport* report) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        unsigned char c = static_cast<unsigned char>(in[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
        else len = 0;

        bool ok = len > 0 && i + len <= in.size();
        for (std::size_t k = 1; ok && k < len; ++k)
            ok = (static_cast<unsigned char>(in[i + k]) & 0xC0) == 0x80;

        if (ok) {
            out.append(in.substr(i, len));
            i += len;
        } else {
            out.append("\xEF\xBF\xBD");
            if (report) ++report->invalid_byte_sequences;
            ++i;
        }
    }
    return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0x10FFFF) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the entity starting at in[i] (which is '&'). Returns replacement
// text and advances i past the entity, or returns nullopt leaving i alone.
std::optional<std::string> decode_entity(std::string_view in, std::size_t& i) {
    std::size_t end = in.find(';', i + 1);
    if (end == std::string_view::npos || end - i > 12) return std::nullopt;
    std::string_view name = in.substr(i + 1, end - i - 1);
    std::string out;
    if (name == "amp") out = "&";
    else if (name == "lt") out = "<";
    else if (name == "gt") out = ">";
    else if (name == "quot") out = "\"";
    else if (name == "apos") out = "'";
    else if (name == "nbsp") out = " ";
    else if (!name.empty() && name[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = false;
        if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
            for (std::size_t k = 2; k < name.size(); ++k) {
                char c = name[k];
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else return std::nullopt;
                cp = cp * 16 + d;
                ok = true;
            }
        } else {
            for (std::size_t k = 1; k < name.size(); ++k) {
                if (!std::isdigit(static_cast<unsigned char>(name[k])))
                    return std::nullopt;
                cp = cp * 10 + (name[k] - '0');
                ok = true;
            }
        }
        if (!ok || cp > 0x10FFFF) return std::nullopt;
        append_utf8(out, cp);
    } else {
        return std::nullopt;
    }
    i = end + 1;
    return out;
}

bool tag_name_at(std::string_view in, std::size_t i, std::string_view name) {
    if (in.size() - i < name.size()) return false;
    for (std::size_t k = 0; k < name.size(); ++k)
        if (std::tolower(static_cast<unsigned char>(in[i + k])) != name[k])
            return false;
    // must be followed by a tag delimiter
    std::size_t after = i + name.size();
    return after >= in.size() || in[after] == '>' || is_ws(in[after]) ||
           in[after] == '/';
}

std::string strip_markup(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        char c = in[i];
        if (c == '<') {
            if (in.compare(i, 4, "<!--") == 0) {
                std::size_t end = in.find("-->", i + 4);
                i = (end == std::string_view::npos) ? in.size() : end + 3;
                out.push_back(' ');
                continue;
            }
            std::size_t name_start = i + 1;
            bool looks_like_tag =
                name_start < in.size() &&
                (std::isalpha(static_cast<unsigned char>(in[name_start])) ||
                 in[name_start] == '/' || in[name_start] == '!' ||
                 in[name_start] == '?');
            if (!looks_like_tag) {
                out.push_back(c);
                ++i;
                continue;
            }
            // script/style: drop the whole element contents
            for (std::string_view elem : {"script", "style"}) {
                if (tag_name_at(in, name_start, elem)) {
                    std::string close = "</" + std::string(elem);
                    std::size_t pos = i;
                    std::size_t end = std::string_view::npos;
                    while (true) {
                        pos = in.find('<', pos + 1);
                        if (pos == std::string_view::npos) break;
                        if (pos + close.size() <= in.size() &&
                            tag_name_at(in, pos + 2, elem) && in[pos + 1] == '/') {
                            end = in.find('>', pos);
                            break;
                        }
                    }
                    i = (end == std::string_view::npos) ? in.size() : end + 1;
                    goto next_char;
                }
            }
            {
                std::size_t end = in.find('>', i);
                i = (end == std::string_view::npos) ? in.size() : end + 1;
                out.push_back(' ');
            }
        next_char:
            continue;
        }
        if (c == '&') {
            if (auto repl = decode_entity(in, i)) {
                out.append(*repl);
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

bool scheme_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
           c == '.';
}

std::string remove_urls(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        std::size_t sep = in.find("://", i);
        if (sep == std::string_view::npos) {
            out.append(in.substr(i));
            break;
        }
        // expand leftwards over the scheme
        std::size_t start = sep;
        while (start > i && scheme_char(in[start - 1])) --start;
        bool has_scheme =
            start < sep && std::isalpha(static_cast<unsigned char>(in[start]));
        if (!has_scheme) {
            out.append(in.substr(i, sep + 3 - i));
            i = sep + 3;
            continue;
        }
        out.append(in.substr(i, start - i));
        // expand rightwards to the next whitespace
        std::size_t end = sep + 3;
        while (end < in.size() && !is_ws(in[end])) ++end;
        out.push_back(' ');
        i = end;
    }
    return out;
}

std::string collapse_whitespace(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    bool in_ws = true;  // suppress leading whitespace
    for (char c : in) {
        if (is_ws(c)) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_ws = false;
        }
    }
    return out;
}

}  // namespace

std::optional<CleanDocument> clean_text(std::string_view body,
                                        std::size_t min_length,
                                        CleaningReport* report) {
    std::string text = sanitize_utf8(body, report);
    text = strip_markup(text);
    text = remove_urls(text);
    text = collapse_whitespace(text);
    CleanDocument doc{std::move(text), 0};
    doc.char_length = utf8_length(doc.text);
    if (doc.char_length < min_length) return std::nullopt;
    return doc;
}

std::optional<CleanDocument> clean_document(const RawDocument& raw,
                                            std::size_t min_length,
                                            CleaningReport* report) {
    return clean_text(raw.body, min_length, report);
}

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::string current;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isalnum(c)) {
            current.push_back(
                static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            out.tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.tokens.push_back(std::move(current));
    return out;
}

std::string stem(std::string_view token) {
    return default_stemmer().stem(token);
}

}  // namespace taxominer
