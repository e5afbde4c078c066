#include "cmek/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cmek/error.hpp"
#include "cmek/rng.hpp"

namespace cmek {

using nlohmann::json;

bool Corpus::fully_labeled() const noexcept {
    return std::all_of(documents.begin(), documents.end(),
                       [](const Document& d) { return d.label.has_value(); });
}

std::array<std::size_t, 2> Corpus::class_counts() const noexcept {
    std::array<std::size_t, 2> counts{0, 0};
    for (const auto& d : documents) {
        if (d.label) ++counts[static_cast<std::size_t>(*d.label)];
    }
    return counts;
}

bool is_punctuation(char ch) noexcept {
    const auto c = static_cast<unsigned char>(ch);
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
           (c >= 123 && c <= 126);
}

namespace {

bool is_space(char ch) noexcept {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f';
}

}  // namespace

std::vector<std::string> preprocess(std::string_view raw_text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : raw_text) {
        if (is_space(ch)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else if (!is_punctuation(ch)) {
            if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
            current.push_back(ch);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Corpus load_corpus(const std::filesystem::path& path, std::string name, LabelPolicy policy) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file " + path.string());

    Corpus corpus;
    corpus.name = std::move(name);
    corpus.provenance = path.string();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), is_space)) continue;
        const auto where = " at line " + std::to_string(line_no) + " of " + path.string();

        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error&) {
            throw Error("malformed JSON" + where);
        }
        if (!row.is_object() || !row.contains("text") || !row["text"].is_string()) {
            throw Error("missing text field" + where);
        }

        Document doc;
        doc.id = corpus.documents.size();
        doc.tokens = preprocess(row["text"].get<std::string>());
        if (row.contains("label") && !row["label"].is_null()) {
            const auto& label = row["label"];
            if (!label.is_number_integer() || (label.get<long long>() != 0 && label.get<long long>() != 1)) {
                throw Error("invalid label" + where);
            }
            doc.label = static_cast<int>(label.get<long long>());
        } else if (policy == LabelPolicy::required) {
            throw Error("missing label" + where);
        }
        corpus.documents.push_back(std::move(doc));
    }
    if (corpus.documents.empty()) throw Error("empty corpus: " + path.string());
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write corpus file " + path.string());
    for (const auto& doc : corpus.documents) {
        std::string text;
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            if (i) text.push_back(' ');
            text += doc.tokens[i];
        }
        json row;
        row["text"] = text;
        if (doc.label) row["label"] = *doc.label;
        out << row.dump() << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

Corpus strip_labels(const Corpus& corpus) {
    Corpus out = corpus;
    for (auto& d : out.documents) d.label.reset();
    return out;
}

Corpus make_corpus(std::string name,
                   const std::vector<std::pair<std::string, std::optional<int>>>& rows) {
    Corpus corpus;
    corpus.name = std::move(name);
    corpus.provenance = "memory";
    for (const auto& [text, label] : rows) {
        if (label && *label != 0 && *label != 1) throw Error("invalid label in make_corpus");
        corpus.documents.push_back({preprocess(text), label, corpus.documents.size()});
    }
    return corpus;
}

std::vector<Fold> stratified_folds(const Corpus& corpus, const SplitSpec& spec) {
    const std::size_t k = spec.fold_count;
    if (k < 2) throw Error("fold_count must be at least 2");
    if (!corpus.fully_labeled()) throw Error("stratified_folds requires labels in " + corpus.name);
    if (k > corpus.size()) {
        throw Error("fold_count " + std::to_string(k) + " exceeds document count of " + corpus.name);
    }

    std::array<std::vector<std::pair<std::uint64_t, std::size_t>>, 2> by_class;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& d = corpus.documents[i];
        by_class[static_cast<std::size_t>(*d.label)].emplace_back(derive_seed(spec.seed, d.id), d.id);
    }

    // Ids map back to positions; ids are unique within a corpus.
    std::vector<std::pair<std::size_t, std::size_t>> id_to_index;
    id_to_index.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) id_to_index.emplace_back(corpus.documents[i].id, i);
    std::sort(id_to_index.begin(), id_to_index.end());

    std::vector<std::size_t> fold_of(corpus.size());
    std::size_t cursor = 0;
    for (int label : {1, 0}) {
        auto& members = by_class[static_cast<std::size_t>(label)];
        std::sort(members.begin(), members.end());
        for (const auto& [key, id] : members) {
            auto it = std::lower_bound(id_to_index.begin(), id_to_index.end(),
                                       std::make_pair(id, std::size_t{0}));
            fold_of[it->second] = cursor % k;
            ++cursor;
        }
    }

    std::vector<Fold> folds(k);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t f = 0; f < k; ++f) {
            (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
        }
    }
    return folds;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("malformed manifest " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw Error("manifest must be a JSON array: " + path.string());

    std::vector<ManifestEntry> entries;
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const auto where = " in manifest entry " + std::to_string(i) + " of " + path.string();
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
            !item.contains("path") || !item["path"].is_string()) {
            throw Error("manifest entry needs string name and path" + where);
        }
        ManifestEntry e;
        e.name = item["name"].get<std::string>();
        e.path = item["path"].get<std::string>();
        if (e.path.is_relative()) e.path = path.parent_path() / e.path;
        const std::string role = item.value("role", std::string("candidate"));
        if (role == "candidate") {
            e.role = CorpusRole::candidate;
        } else if (role == "target") {
            e.role = CorpusRole::target;
        } else {
            throw Error("unknown role '" + role + "'" + where);
        }
        if (!names.insert(e.name).second) throw Error("duplicate corpus name '" + e.name + "'" + where);
        entries.push_back(std::move(e));
    }
    return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
    json doc = json::array();
    for (const auto& e : entries) {
        doc.push_back({{"name", e.name},
                       {"path", e.path.generic_string()},
                       {"role", e.role == CorpusRole::target ? "target" : "candidate"}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace cmek
