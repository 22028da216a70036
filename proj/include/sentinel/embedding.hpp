#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentinel/corpus.hpp"

namespace sentinel {

// Static token -> vector table in GloVe text layout. Insertion order is kept
// so that the table writes back out deterministically.
class WordVectorTable {
public:
    explicit WordVectorTable(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    // Returns true when the token replaced an existing entry.
    bool insert(std::string token, std::span<const double> values);
    std::span<const double> find(std::string_view token) const;

private:
    std::size_t dim_;
    std::vector<std::string> tokens_;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Duplicate tokens: the last line wins and a warning is logged.
WordVectorTable load_word_vectors(const std::filesystem::path& path);
WordVectorTable parse_word_vectors(std::istream& in);
void write_word_vectors(std::ostream& out, const WordVectorTable& table);

struct SectionVector {
    std::vector<double> values;
    bool oov = false;  // no in-vocabulary token; values is the zero vector
};

// Mean of the vectors of in-vocabulary tokens, each occurrence counted.
SectionVector embed_section(std::string_view text, const WordVectorTable& table);

// One present section: E_j is the section text embedding, em_tag is the
// embedding of its tag.
struct SectionEmbedding {
    SectionTag tag = SectionTag::Education;
    std::vector<double> e;
    std::vector<double> em_tag;
};

struct SectionEmbeddingSet {
    std::string profile_id;
    std::string encoder;
    std::vector<SectionEmbedding> items;

    std::size_t dim() const { return items.empty() ? 0 : items.front().e.size(); }
};

struct SteVector {
    std::string profile_id;
    std::vector<double> values;
};

// Section Tag Embedding: F = (1/N) * sum_j (E_j - Em(Tag_j)).
SteVector ste_aggregate(const SectionEmbeddingSet& set);

inline constexpr std::string_view kBuiltinEncoder = "wordvec-mean";

// Built-in encoder: every non-empty section text (all seven tags) is embedded
// with embed_section; the tag embedding is embed_section of the tag word.
// All-OOV sections still count toward N and contribute (0 - Em(Tag_j)).
SectionEmbeddingSet embed_profile(const Profile& profile, const WordVectorTable& table,
                                  std::string_view encoder = kBuiltinEncoder);

struct EmbeddingIngest {
    std::vector<SectionEmbeddingSet> sets;
    std::vector<Rejection> rejections;
};

EmbeddingIngest ingest_external_embeddings(const std::filesystem::path& path);
EmbeddingIngest parse_embeddings(std::istream& in);
void write_embeddings(std::ostream& out, std::span<const SectionEmbeddingSet> sets);

}  // namespace sentinel
