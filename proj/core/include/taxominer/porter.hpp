#pragma once

#include <string>
#include <string_view>

namespace taxominer {

// Interface so the stemming algorithm can be swapped out.
class Stemmer {
public:
    virtual ~Stemmer() = default;
    virtual std::string stem(std::string_view token) const = 0;
};

// Porter (1980) suffix-stripping algorithm. Expects lowercase input.
// Tokens containing non-alphabetic characters pass through unchanged.
class PorterStemmer final : public Stemmer {
public:
    std::string stem(std::string_view token) const override;
};

const Stemmer& default_stemmer();

}  // namespace taxominer
