#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sentinel/corpus.hpp"
#include "sentinel/embedding.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/featurize.hpp"
#include "sentinel/model.hpp"
#include "sentinel/report.hpp"
#include "sentinel/tune.hpp"

namespace sentinel {

// Training compositions. Every scenario trains on LLP + FLP; the retrain
// scenarios add LLM-like fakes.
enum class TrainScenario { Baseline, Gpt35Retrain, Gpt4Retrain, Gpt35And4Retrain };
// Test compositions. Every test set contains LLP + FLP; the attacks add
// LLM-like fakes. The LLP test subset is the same in all four.
enum class TestScenario { Baseline, Gpt35Attack, Gpt4Attack, CombinedAttack };

inline constexpr std::array<TrainScenario, 4> kAllTrainScenarios{
    TrainScenario::Baseline, TrainScenario::Gpt35Retrain, TrainScenario::Gpt4Retrain,
    TrainScenario::Gpt35And4Retrain};
inline constexpr std::array<TestScenario, 4> kAllTestScenarios{TestScenario::Baseline, TestScenario::Gpt35Attack,
                                                               TestScenario::Gpt4Attack, TestScenario::CombinedAttack};

// "baseline", "gpt35_retrain", "gpt4_retrain", "combined_retrain"
std::string_view scenario_name(TrainScenario scenario);
// "baseline", "gpt35_attack", "gpt4_attack", "combined_attack"
std::string_view scenario_name(TestScenario scenario);
std::optional<TrainScenario> parse_train_scenario(std::string_view text);
std::optional<TestScenario> parse_test_scenario(std::string_view text);

std::vector<Label> train_labels(TrainScenario scenario);
std::vector<Label> test_labels(TestScenario scenario);

// Full-scale per-class counts: LLP 1260/540, FLP 420/180, GPT35P 840/360,
// GPT4P 420/180 (train/test).
std::map<Label, SplitCounts> canonical_counts();
// Canonical counts multiplied by `scale` and rounded to the nearest integer.
std::map<Label, SplitCounts> scaled_counts(double scale);

// Per-scenario compositions at a scale; classes absent from the scenario are
// omitted.
std::map<Label, SplitCounts> scenario_composition(TrainScenario train, TestScenario test, double scale);

// Everything the runner needs per profile: the cleaned profile, its numeric
// features and its STE vector from one encoder.
struct BenchmarkData {
    std::string encoder;
    std::vector<Profile> profiles;
    std::unordered_map<std::string, std::size_t> index;
    std::unordered_map<std::string, NumericFeatures> numeric;
    std::unordered_map<std::string, std::vector<double>> ste;

    const Profile& profile(const std::string& id) const;
    // Throws MissingEmbedding when the id has no STE vector.
    const std::vector<double>& ste_of(const std::string& id) const;
};

// Built-in encoder over a word-vector table.
BenchmarkData build_benchmark(std::vector<Profile> profiles, const WordVectorTable& table, std::size_t jobs = 1);
// Precomputed section embeddings; all sets must share one encoder name.
BenchmarkData build_benchmark(std::vector<Profile> profiles, std::span<const SectionEmbeddingSet> sets);

// One split of the corpus shared by every scenario: per-class train and test
// pools sized for the largest composition.
struct BenchmarkSplit {
    double scale = 1.0;
    std::uint64_t seed = 0;
    std::map<Label, std::vector<std::string>> train;
    std::map<Label, std::vector<std::string>> test;
};

BenchmarkSplit make_benchmark_split(const BenchmarkData& data, double scale, std::uint64_t seed);

struct ResolvedScenario {
    std::vector<std::string> train_ids;
    std::map<Label, std::vector<std::string>> test_ids;
};

ResolvedScenario resolve_scenario(TrainScenario scenario, const BenchmarkSplit& split);

enum class TuneMethod { None, Bo, Ga };
std::string_view tune_method_name(TuneMethod method);
std::optional<TuneMethod> parse_tune_method(std::string_view text);

struct ScenarioSpec {
    TrainScenario train = TrainScenario::Baseline;
    Layout layout = Layout::Fused;
    ClassifierConfig classifier;
    TuneMethod tune = TuneMethod::None;
    TuneBudget budget;
    std::size_t pca_components = kDefaultPcaComponents;
    std::uint64_t seed = 0;
    std::size_t tune_jobs = 1;
};

struct LabeledPrediction {
    std::string profile_id;
    Label label = Label::LLP;
    double p_fake = 0.0;
};

// Per-class subsets are named after the label ("LLP", "FLP", "GPT35P",
// "GPT4P") plus "LLM" for GPT35P and GPT4P pooled. The LLP view carries FRR,
// the fake views carry FAR.
inline constexpr std::string_view kLlmSubset = "LLM";

struct ScenarioResult {
    ScenarioSpec spec;
    std::size_t train_size = 0;
    std::vector<MetricReport> class_reports;
    std::vector<MetricReport> test_reports;  // subset = test scenario name
    std::vector<LabeledPrediction> predictions;
    TrainedModel model;
    std::optional<TuneResult> tuning;

    const MetricReport& class_report(std::string_view subset) const;
    const MetricReport& test_report(TestScenario scenario) const;
    // Reliability curve over a test scenario's profiles.
    CalibrationCurve calibration(TestScenario scenario, std::size_t bins = 10) const;
};

// Fits preprocessing and classifier on the training ids only, then scores
// every test id. Throws Leakage when a test id appears among the training ids.
ScenarioResult run_scenario(const ScenarioSpec& spec, const ResolvedScenario& resolved, const BenchmarkData& data);

// Pure evaluation of a trained model on the given profiles. Throws
// EncoderMismatch when the model expects another encoder and EmptySet on an
// empty id list.
MetricReport run_attack(const TrainedModel& model, std::span<const std::string> ids, const BenchmarkData& data,
                        std::string subset);

struct GridSpec {
    std::vector<TrainScenario> scenarios{kAllTrainScenarios.begin(), kAllTrainScenarios.end()};
    std::vector<Layout> layouts{Layout::Fused};
    std::vector<ClassifierConfig> classifiers{default_classifier_config(ClassifierKind::Gbdt)};
    TuneMethod tune = TuneMethod::None;
    TuneBudget budget;
    std::size_t pca_components = kDefaultPcaComponents;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

struct GridCell {
    TrainScenario scenario = TrainScenario::Baseline;
    Layout layout = Layout::Fused;
    ClassifierConfig classifier;
    std::optional<ScenarioResult> result;
    std::string error;  // set when the cell failed

    std::string key() const;  // "<scenario>_<layout>_<classifier>"
};

// Cells are ordered layout, then classifier, then scenario regardless of the
// order in which parallel workers finish.
struct GridResult {
    std::string encoder;
    std::vector<GridCell> cells;

    const GridCell* find(TrainScenario scenario, Layout layout, ClassifierKind kind) const;
};

GridResult run_grid(const GridSpec& spec, const BenchmarkSplit& split, const BenchmarkData& data);

// One row per (cell, test scenario); failed cells contribute NA rows.
std::vector<GridRow> grid_rows(const GridResult& grid);
// One row per (cell, class subset).
std::vector<GridRow> class_grid_rows(const GridResult& grid);

// Pearson r between each cell's Brier score on the combined attack set and
// its FAR on LLM-like profiles.
std::optional<double> brier_far_correlation(const GridResult& grid, std::size_t* points = nullptr);

ReportBundle make_report_bundle(const GridResult& grid);

// CSV: cell,train_scenario,layout,classifier,profile_id,label,p_fake
void write_predictions_csv(std::ostream& out, const GridResult& grid);

// Scenario config file:
// {"scenarios": [...], "layouts": [...], "classifiers": [...], "encoder": str,
//  "seed": int, "scale": real, "tune": "none|bo|ga", "jobs": int,
//  "pca_components": int, "corpus": path, "word_vectors": path,
//  "embeddings": path, "generator": {...}}
// Relative paths resolve against the config file's directory.
struct ScenarioConfig {
    GridSpec grid;
    std::string encoder{kBuiltinEncoder};
    double scale = 1.0 / 6.0;
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> word_vectors;
    std::optional<std::filesystem::path> embeddings;
    nlohmann::json generator = nlohmann::json::object();
};

ScenarioConfig parse_scenario_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

}  // namespace sentinel
