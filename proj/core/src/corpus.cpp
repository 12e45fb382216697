#include "taxominer/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "taxominer/errors.hpp"

namespace taxominer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<Document> load_corpus(const std::string& root) {
    fs::path base(root);
    if (!fs::is_directory(base)) throw IoError("corpus root is not a directory: " + root);

    std::vector<Document> docs;
    for (const auto& year_entry : fs::directory_iterator(base)) {
        if (!year_entry.is_directory()) continue;
        std::string year_name = year_entry.path().filename().string();
        int year = 0;
        try {
            year = std::stoi(year_name);
        } catch (...) {
            continue;  // not a year directory
        }
        for (const auto& fmt_entry : fs::directory_iterator(year_entry.path())) {
            if (!fmt_entry.is_directory()) continue;
            std::string format = fmt_entry.path().filename().string();
            for (const auto& file : fs::directory_iterator(fmt_entry.path())) {
                if (file.path().extension() != ".txt") continue;
                Document doc;
                doc.id = file.path().stem().string();
                doc.text = read_file(file.path());
                doc.year = year;
                doc.format = format;
                fs::path meta = file.path();
                meta.replace_extension(".meta.json");
                if (fs::exists(meta)) {
                    try {
                        json j = json::parse(read_file(meta));
                        if (j.contains("year")) doc.year = j["year"].get<int>();
                        if (j.contains("format")) doc.format = j["format"].get<std::string>();
                        if (j.contains("source_url"))
                            doc.source = j["source_url"].get<std::string>();
                    } catch (const json::exception& e) {
                        throw InputError("bad sidecar " + meta.string() + ": " + e.what());
                    }
                }
                docs.push_back(std::move(doc));
            }
        }
    }
    std::sort(docs.begin(), docs.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    return docs;
}

void write_document(const std::string& root, const Document& doc) {
    fs::path dir = fs::path(root) / std::to_string(doc.year) / doc.format;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    fs::path txt = dir / (doc.id + ".txt");
    {
        std::ofstream out(txt, std::ios::binary);
        if (!out) throw IoError("cannot write " + txt.string());
        out << doc.text;
    }
    json meta{{"year", doc.year}, {"format", doc.format}, {"source_url", doc.source}};
    fs::path mpath = dir / (doc.id + ".meta.json");
    std::ofstream mout(mpath, std::ios::binary);
    if (!mout) throw IoError("cannot write " + mpath.string());
    mout << meta.dump(2) << '\n';
}

}  // namespace taxominer
