#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/corpus.hpp"
#include "sentinel/matrix.hpp"

namespace sentinel {

inline constexpr std::size_t kNumericFeatureCount = 17;
inline constexpr std::size_t kDefaultPcaComponents = 150;

using NumericFeatures = std::array<double, kNumericFeatureCount>;

// Canonical order of the numeric block; serialized models depend on it.
inline constexpr std::array<std::string_view, kNumericFeatureCount> kNumericFeatureNames{
    "job_count",
    "education_count",
    "skills_count",
    "recommendations_count",
    "followers",
    "connections",
    "summary_word_count",
    "summary_char_count",
    "name_token_count",
    "location_token_count",
    "total_experience_word_count",
    "total_education_word_count",
    "mean_words_per_job",
    "mean_words_per_education",
    "follower_connection_ratio",
    "sections_present_count",
    "has_summary_flag",
};

NumericFeatures extract_numeric(const Profile& profile);

inline constexpr double kStdFloor = 1e-12;

// Per-dimension z-score. Dimensions whose population standard deviation is
// below kStdFloor are constant on the training data and always map to 0.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t dim() const { return mean.size(); }
    std::vector<double> apply(std::span<const double> x) const;

    friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

Normalizer fit_normalizer(const Matrix& train);

struct PcaModel {
    std::vector<double> mean;
    // k rows of length d, orthonormal, sorted by decreasing eigenvalue. Each
    // row's largest-magnitude entry is positive.
    std::vector<std::vector<double>> components;
    std::vector<double> explained_variance;
    std::vector<double> explained_variance_ratio;

    std::size_t input_dim() const { return mean.size(); }
    std::size_t output_dim() const { return components.size(); }
    std::vector<double> transform(std::span<const double> x) const;
    std::vector<double> cumulative_ratio() const;

    friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

// Top-k principal components from the SVD of the mean-centered data matrix.
// k is clamped to min(d, n - 1).
PcaModel fit_pca(const Matrix& train, std::size_t k = kDefaultPcaComponents);

// CSV: component_index, ratio, cumulative.
void write_variance_curve(std::ostream& out, const PcaModel& pca);

enum class Layout { Fused, TextOnly, NumericOnly };

inline constexpr std::array<Layout, 3> kAllLayouts{Layout::Fused, Layout::TextOnly, Layout::NumericOnly};

// Short name ("fused", "text", "numeric").
std::string_view layout_name(Layout layout);
// Canonical name ("Fused167", "TextOnly150", "NumericOnly17").
std::string_view layout_label(Layout layout);
// Accepts both spellings.
std::optional<Layout> parse_layout(std::string_view text);

struct FeatureVector {
    std::string profile_id;
    std::vector<double> values;
    Layout layout = Layout::Fused;
};

// Fused = text part followed by the numeric part; the single-block layouts
// pass their part through and ignore the other.
FeatureVector fuse(std::string profile_id, std::span<const double> text_part, std::span<const double> numeric_part,
                   Layout layout, std::size_t text_dim = kDefaultPcaComponents);

// Fitted preprocessing for one layout: numeric normalizer and/or text PCA.
struct FeaturePipeline {
    Layout layout = Layout::Fused;
    std::optional<Normalizer> normalizer;
    std::optional<PcaModel> pca;

    std::size_t text_dim() const { return pca ? pca->output_dim() : 0; }
    std::size_t output_dim() const;
    FeatureVector transform(const std::string& profile_id, const NumericFeatures& numeric,
                            std::span<const double> ste) const;

    friend bool operator==(const FeaturePipeline&, const FeaturePipeline&) = default;
};

// Fits only on the rows given; callers pass training profiles exclusively.
FeaturePipeline fit_feature_pipeline(Layout layout, std::span<const NumericFeatures> numeric, const Matrix& ste,
                                     std::size_t pca_components = kDefaultPcaComponents);

}  // namespace sentinel
