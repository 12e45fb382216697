#pragma once

#include <string>
#include <vector>

namespace taxominer {

// One cleaned writeup on disk plus its sidecar metadata.
struct Document {
    std::string id;
    std::string text;
    int year = 0;
    std::string format;  // jeopardy | attack-defense | hack-quest
    std::string source;  // original URL, may be empty
};

// Reads corpus/<year>/<format>/<id>.txt (+ optional <id>.meta.json) laid
// out by the harvester. Directory names supply year/format when no sidecar
// is present. Documents are returned sorted by id.
std::vector<Document> load_corpus(const std::string& root);

void write_document(const std::string& root, const Document& doc);

}  // namespace taxominer
