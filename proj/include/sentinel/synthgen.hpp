#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentinel/corpus.hpp"
#include "sentinel/embedding.hpp"

namespace sentinel {

// Vocabulary pools read from a directory of one-item-per-line text files:
// first_names, last_names, locations, institutions, degrees, companies,
// spam_phrases, summary_templates, recommendation_templates, synonyms, and
// domains/<domain>/{titles,skills,duties,fields}.txt.
struct DomainPools {
    std::string name;
    std::vector<std::string> titles;
    std::vector<std::string> skills;
    std::vector<std::string> duties;
    std::vector<std::string> fields;
};

struct VocabPools {
    std::vector<std::string> first_names;
    std::vector<std::string> last_names;
    std::vector<std::string> locations;
    std::vector<std::string> institutions;
    std::vector<std::string> degrees;
    std::vector<std::string> companies;
    std::vector<std::string> spam_phrases;
    std::vector<std::string> summary_templates;         // {title}, {skill}
    std::vector<std::string> recommendation_templates;  // {name}, {skill}
    // word -> (GPT35P-style synonym, GPT4P-style synonym)
    std::map<std::string, std::pair<std::string, std::string>> synonyms;
    std::vector<DomainPools> domains;
};

// Throws EmptyPool naming the pool when a file is missing or has no items.
VocabPools load_vocab(const std::filesystem::path& dir);

std::filesystem::path default_vocab_dir();

// Structural shape of one class: inclusive ranges.
struct ShapeParams {
    int jobs_min = 1, jobs_max = 5;
    int duties_min = 1, duties_max = 2;
    int education_min = 1, education_max = 3;
    int skills_min = 4, skills_max = 12;
    int recommendations_min = 1, recommendations_max = 3;
    int summary_min = 2, summary_max = 4;  // sentences
};

// connections ~ round(LogNormal(mu, sigma)); followers = connections * ratio
// with ratio ~ LogNormal(ratio_mu, ratio_sigma) clamped to [ratio_min, ratio_max].
struct NumericParams {
    double connections_mu = 6.0;
    double connections_sigma = 0.5;
    double ratio_mu = 0.0;
    double ratio_sigma = 0.3;
    double ratio_min = 0.3;
    double ratio_max = 3.0;
};

struct GenConfig {
    std::map<Label, std::size_t> counts{{Label::LLP, 300}, {Label::FLP, 100}, {Label::GPT35P, 200}, {Label::GPT4P, 100}};
    // Probability that a template word with a known synonym is kept.
    double llm_similarity = 0.9;
    std::uint64_t seed = 0;
    std::filesystem::path vocab_dir = default_vocab_dir();

    std::map<Label, ShapeParams> shape;
    std::map<Label, NumericParams> numeric;

    // Manual-fake anomalies, each applied independently.
    double flp_missing_section = 0.4;
    double flp_truncated_summary = 0.3;
    double flp_inconsistent_counts = 0.3;
    // Probability that an FLP section draws from a random domain, and that its
    // summary and skills carry spam phrases.
    double flp_domain_mix = 0.9;
    double flp_spam = 0.9;

    // Word vectors: topic center plus isotropic noise; LLM-style synonyms sit
    // at their source word's vector plus a class-specific style offset.
    std::size_t vector_dim = 200;
    double topic_scale = 1.0;
    double noise_scale = 0.3;
    double style_scale_gpt35 = 5.0;
    double style_scale_gpt4 = 10.0;

    GenConfig();
    void validate() const;
};

GenConfig gen_config_from_json(const nlohmann::json& overrides);
nlohmann::json to_json(const GenConfig& config);

struct GenReport {
    std::map<Label, std::size_t> counts;
    // Mean cosine similarity between each profile's mean section embedding
    // and the legit centroid, per class.
    std::map<Label, double> similarity_to_legit;
    std::size_t vocabulary_size = 0;
    std::uint64_t seed = 0;
    double llm_similarity = 0.0;
};

nlohmann::json to_json(const GenReport& report);

struct GeneratedCorpus {
    std::vector<Profile> profiles;
    WordVectorTable word_vectors;
    // For LLM-like profiles: the legit-style template each was derived from.
    std::map<std::string, Profile> templates;
    GenReport report;
};

GeneratedCorpus generate(const GenConfig& config);

// Writes corpus.jsonl, word_vectors.txt and gen_report.json into dir.
GenReport generate_to(const GenConfig& config, const std::filesystem::path& dir);

// Regularities every legit-like profile satisfies by construction. Returns
// the names of the violated ones.
std::vector<std::string> structural_violations(const Profile& profile);

struct CorpusDiagnostics {
    std::size_t records = 0;
    std::map<Label, std::size_t> class_counts;
    std::vector<Rejection> violations;
    std::vector<std::string> duplicate_ids;

    bool ok() const { return violations.empty(); }
};

CorpusDiagnostics validate_corpus(const std::filesystem::path& path);
nlohmann::json to_json(const CorpusDiagnostics& diagnostics);

}  // namespace sentinel
