#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sentinel/featurize.hpp"
#include "sentinel/learn.hpp"

namespace sentinel {

inline constexpr int kModelFormatVersion = 1;

// A classifier together with the preprocessing it was fitted with and the
// encoder whose embeddings it expects.
struct TrainedModel {
    std::string encoder;
    FeaturePipeline pipeline;
    ClassifierConfig config;
    Classifier classifier;

    double predict_proba(const std::string& profile_id, const NumericFeatures& numeric,
                         std::span<const double> ste) const;
};

// Versioned document: {version, encoder, layout, normalizer, pca,
// classifier_kind, classifier_params, trees | weights | points}.
nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& document);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
// Throws Corrupt for unreadable/truncated documents and Version for any
// format version other than kModelFormatVersion.
TrainedModel load_model(const std::filesystem::path& path);

nlohmann::json classifier_params_to_json(const ClassifierConfig& config);
ClassifierConfig classifier_config_from_json(ClassifierKind kind, const nlohmann::json& params);

}  // namespace sentinel
