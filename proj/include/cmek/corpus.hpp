#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmek {

/// One preprocessed document. `label` is 0/1 when known.
struct Document {
    std::vector<std::string> tokens;
    std::optional<int> label;
    std::size_t id = 0;
};

/// A domain sample: the empirical stand-in for a joint distribution over
/// documents and labels. Immutable once built; share by const reference.
struct Corpus {
    std::string name;
    std::vector<Document> documents;
    std::string provenance;

    std::size_t size() const noexcept { return documents.size(); }
    bool empty() const noexcept { return documents.empty(); }
    bool fully_labeled() const noexcept;
    /// Counts of label 0 and label 1; unlabeled documents are not counted.
    std::array<std::size_t, 2> class_counts() const noexcept;
};

/// Lowercases ASCII letters, deletes the 32 printable ASCII punctuation
/// symbols and splits on ASCII whitespace. Non-ASCII bytes pass through.
std::vector<std::string> preprocess(std::string_view raw_text);

bool is_punctuation(char ch) noexcept;

enum class LabelPolicy { required, optional };

/// Reads the JSONL corpus format: one {"text": str, "label": 0|1} per line.
/// Blank lines are skipped. Errors name the offending 1-based line.
Corpus load_corpus(const std::filesystem::path& path, std::string name,
                   LabelPolicy policy = LabelPolicy::required);

/// Writes the JSONL corpus format; text is the space-joined token list.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Same documents with every label removed.
Corpus strip_labels(const Corpus& corpus);

/// Builds a corpus from (text, label) pairs, preprocessing each text.
Corpus make_corpus(std::string name,
                   const std::vector<std::pair<std::string, std::optional<int>>>& rows);

struct SplitSpec {
    std::size_t fold_count = 10;
    std::uint64_t seed = 0;
};

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Label-stratified k-fold partition of document indices. Documents of each
/// class are ordered by a hash of (seed, document id) and dealt round-robin,
/// the second class continuing where the first stopped, so fold sizes differ
/// by at most one and per-fold class counts differ by at most one.
std::vector<Fold> stratified_folds(const Corpus& corpus, const SplitSpec& spec);

enum class CorpusRole { candidate, target };

struct ManifestEntry {
    std::string name;
    std::filesystem::path path;
    CorpusRole role = CorpusRole::candidate;
};

/// Reads [{"name", "path", "role"}]; relative paths resolve against the
/// manifest's directory. Names must be unique.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

void save_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);

}  // namespace cmek
