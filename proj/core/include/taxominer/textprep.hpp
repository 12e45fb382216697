#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taxominer/porter.hpp"

namespace taxominer {

struct RawDocument {
    enum class SourceKind { inline_text, external };
    std::string body;
    SourceKind source_kind = SourceKind::inline_text;
    std::string url;  // empty when none
};

struct CleanDocument {
    std::string text;
    std::size_t char_length = 0;  // UTF-8 code points
};

struct CleaningReport {
    std::size_t invalid_byte_sequences = 0;
};

// Strips markup (script/style contents dropped, entities decoded), removes
// URL-shaped substrings, collapses whitespace. Returns nullopt (Discarded)
// when the cleaned text is shorter than min_length characters.
std::optional<CleanDocument> clean_document(const RawDocument& raw,
                                            std::size_t min_length,
                                            CleaningReport* report = nullptr);

// Convenience overload for plain text bodies.
std::optional<CleanDocument> clean_text(std::string_view body,
                                        std::size_t min_length,
                                        CleaningReport* report = nullptr);

struct TokenStream {
    std::vector<std::string> tokens;  // lowercase alphanumeric runs, in order
};

TokenStream tokenize(std::string_view text);

// Porter stem of a lowercase token; see PorterStemmer.
std::string stem(std::string_view token);

}  // namespace taxominer
