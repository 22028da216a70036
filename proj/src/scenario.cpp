#include "sentinel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/parallel.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

std::string_view scenario_name(TrainScenario scenario) {
    switch (scenario) {
        case TrainScenario::Baseline: return "baseline";
        case TrainScenario::Gpt35Retrain: return "gpt35_retrain";
        case TrainScenario::Gpt4Retrain: return "gpt4_retrain";
        case TrainScenario::Gpt35And4Retrain: return "combined_retrain";
    }
    return "unknown";
}

std::string_view scenario_name(TestScenario scenario) {
    switch (scenario) {
        case TestScenario::Baseline: return "baseline";
        case TestScenario::Gpt35Attack: return "gpt35_attack";
        case TestScenario::Gpt4Attack: return "gpt4_attack";
        case TestScenario::CombinedAttack: return "combined_attack";
    }
    return "unknown";
}

std::optional<TrainScenario> parse_train_scenario(std::string_view text) {
    for (const auto s : kAllTrainScenarios) {
        if (scenario_name(s) == text) {
            return s;
        }
    }
    return std::nullopt;
}

std::optional<TestScenario> parse_test_scenario(std::string_view text) {
    for (const auto s : kAllTestScenarios) {
        if (scenario_name(s) == text) {
            return s;
        }
    }
    return std::nullopt;
}

std::vector<Label> train_labels(TrainScenario scenario) {
    switch (scenario) {
        case TrainScenario::Baseline: return {Label::LLP, Label::FLP};
        case TrainScenario::Gpt35Retrain: return {Label::LLP, Label::FLP, Label::GPT35P};
        case TrainScenario::Gpt4Retrain: return {Label::LLP, Label::FLP, Label::GPT4P};
        case TrainScenario::Gpt35And4Retrain: return {Label::LLP, Label::FLP, Label::GPT35P, Label::GPT4P};
    }
    return {};
}

std::vector<Label> test_labels(TestScenario scenario) {
    switch (scenario) {
        case TestScenario::Baseline: return {Label::LLP, Label::FLP};
        case TestScenario::Gpt35Attack: return {Label::LLP, Label::FLP, Label::GPT35P};
        case TestScenario::Gpt4Attack: return {Label::LLP, Label::FLP, Label::GPT4P};
        case TestScenario::CombinedAttack: return {Label::LLP, Label::FLP, Label::GPT35P, Label::GPT4P};
    }
    return {};
}

std::map<Label, SplitCounts> canonical_counts() {
    return {{Label::LLP, {1260, 540}}, {Label::FLP, {420, 180}}, {Label::GPT35P, {840, 360}},
            {Label::GPT4P, {420, 180}}};
}

std::map<Label, SplitCounts> scaled_counts(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    }
    auto counts = canonical_counts();
    for (auto& [label, c] : counts) {
        c.train = static_cast<std::size_t>(std::llround(static_cast<double>(c.train) * scale));
        c.test = static_cast<std::size_t>(std::llround(static_cast<double>(c.test) * scale));
    }
    return counts;
}

std::map<Label, SplitCounts> scenario_composition(TrainScenario train, TestScenario test, double scale) {
    const auto counts = scaled_counts(scale);
    std::map<Label, SplitCounts> out;
    for (const auto label : train_labels(train)) {
        out[label].train = counts.at(label).train;
    }
    for (const auto label : test_labels(test)) {
        out[label].test = counts.at(label).test;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark data.
// ---------------------------------------------------------------------------

const Profile& BenchmarkData::profile(const std::string& id) const {
    const auto it = index.find(id);
    if (it == index.end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown profile id " + id);
    }
    return profiles[it->second];
}

const std::vector<double>& BenchmarkData::ste_of(const std::string& id) const {
    const auto it = ste.find(id);
    if (it == ste.end()) {
        throw Error(ErrorCode::MissingEmbedding, "no " + encoder + " embedding for profile " + id);
    }
    return it->second;
}

namespace {

BenchmarkData index_profiles(std::vector<Profile> profiles) {
    BenchmarkData data;
    data.profiles = std::move(profiles);
    for (std::size_t i = 0; i < data.profiles.size(); ++i) {
        const auto& p = data.profiles[i];
        if (!data.index.emplace(p.id, i).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate profile id " + p.id);
        }
        data.numeric.emplace(p.id, extract_numeric(p));
    }
    return data;
}

}  // namespace

BenchmarkData build_benchmark(std::vector<Profile> profiles, const WordVectorTable& table, std::size_t jobs) {
    BenchmarkData data = index_profiles(std::move(profiles));
    data.encoder = std::string(kBuiltinEncoder);
    std::vector<std::vector<double>> vectors(data.profiles.size());
    parallel_for(data.profiles.size(), jobs, [&](std::size_t i) {
        vectors[i] = ste_aggregate(embed_profile(data.profiles[i], table)).values;
    });
    for (std::size_t i = 0; i < data.profiles.size(); ++i) {
        data.ste.emplace(data.profiles[i].id, std::move(vectors[i]));
    }
    return data;
}

BenchmarkData build_benchmark(std::vector<Profile> profiles, std::span<const SectionEmbeddingSet> sets) {
    BenchmarkData data = index_profiles(std::move(profiles));
    std::size_t dim = 0;
    for (const auto& set : sets) {
        if (data.encoder.empty()) {
            data.encoder = set.encoder;
        } else if (set.encoder != data.encoder) {
            throw Error(ErrorCode::EncoderMismatch,
                        fmt::format("embeddings mix encoders '{}' and '{}'", data.encoder, set.encoder));
        }
        auto ste = ste_aggregate(set);
        if (dim == 0) {
            dim = ste.values.size();
        } else if (ste.values.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "embedding dimension differs for profile " + set.profile_id);
        }
        data.ste.emplace(set.profile_id, std::move(ste.values));
    }
    return data;
}

BenchmarkSplit make_benchmark_split(const BenchmarkData& data, double scale, std::uint64_t seed) {
    const auto counts = scaled_counts(scale);
    const auto split = stratified_split(data.profiles, counts, seed);
    BenchmarkSplit out;
    out.scale = scale;
    out.seed = seed;
    for (const auto& id : split.train) {
        out.train[data.profile(id).label].push_back(id);
    }
    for (const auto& id : split.test) {
        out.test[data.profile(id).label].push_back(id);
    }
    return out;
}

ResolvedScenario resolve_scenario(TrainScenario scenario, const BenchmarkSplit& split) {
    ResolvedScenario resolved;
    for (const auto label : train_labels(scenario)) {
        const auto it = split.train.find(label);
        if (it != split.train.end()) {
            resolved.train_ids.insert(resolved.train_ids.end(), it->second.begin(), it->second.end());
        }
    }
    // Every scenario is scored on all four test pools; the per-test-scenario
    // views are unions of these.
    resolved.test_ids = split.test;
    return resolved;
}

std::string_view tune_method_name(TuneMethod method) {
    switch (method) {
        case TuneMethod::None: return "none";
        case TuneMethod::Bo: return "bo";
        case TuneMethod::Ga: return "ga";
    }
    return "none";
}

std::optional<TuneMethod> parse_tune_method(std::string_view text) {
    for (const auto m : {TuneMethod::None, TuneMethod::Bo, TuneMethod::Ga}) {
        if (tune_method_name(m) == text) {
            return m;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Single scenario.
// ---------------------------------------------------------------------------

const MetricReport& ScenarioResult::class_report(std::string_view subset) const {
    for (const auto& r : class_reports) {
        if (r.subset == subset) {
            return r;
        }
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("no class subset '{}'", subset));
}

const MetricReport& ScenarioResult::test_report(TestScenario scenario) const {
    for (const auto& r : test_reports) {
        if (r.subset == scenario_name(scenario)) {
            return r;
        }
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("no test subset '{}'", scenario_name(scenario)));
}

namespace {

void subset_arrays(std::span<const LabeledPrediction> predictions, const std::vector<Label>& labels,
                   std::vector<double>& p, std::vector<int>& truth) {
    p.clear();
    truth.clear();
    for (const auto& pred : predictions) {
        if (std::find(labels.begin(), labels.end(), pred.label) != labels.end()) {
            p.push_back(pred.p_fake);
            truth.push_back(is_fake(pred.label) ? 1 : 0);
        }
    }
}

void guard_leakage(const ResolvedScenario& resolved) {
    std::unordered_set<std::string> train(resolved.train_ids.begin(), resolved.train_ids.end());
    if (train.size() != resolved.train_ids.size()) {
        throw Error(ErrorCode::InvalidArgument, "duplicate id in training list");
    }
    for (const auto& [label, ids] : resolved.test_ids) {
        for (const auto& id : ids) {
            if (train.count(id) != 0) {
                throw Error(ErrorCode::Leakage, "test profile " + id + " appears in the training inputs");
            }
        }
    }
}

}  // namespace

CalibrationCurve ScenarioResult::calibration(TestScenario scenario, std::size_t bins) const {
    std::vector<double> p;
    std::vector<int> truth;
    subset_arrays(predictions, test_labels(scenario), p, truth);
    return reliability(p, truth, bins);
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const ResolvedScenario& resolved, const BenchmarkData& data) {
    guard_leakage(resolved);
    if (resolved.train_ids.empty()) {
        throw Error(ErrorCode::EmptySet, "scenario has no training profiles");
    }

    // Fitting inputs: training ids only.
    std::vector<NumericFeatures> numeric;
    Matrix ste;
    std::vector<int> y;
    for (const auto& id : resolved.train_ids) {
        numeric.push_back(data.numeric.at(id));
        if (spec.layout != Layout::NumericOnly) {
            ste.append_row(data.ste_of(id));
        }
        y.push_back(is_fake(data.profile(id).label) ? 1 : 0);
    }
    ScenarioResult result;
    result.spec = spec;
    result.train_size = resolved.train_ids.size();
    result.model.encoder = data.encoder;
    result.model.pipeline = fit_feature_pipeline(spec.layout, numeric, ste, spec.pca_components);

    static const std::vector<double> kNoText;
    Matrix x;
    for (std::size_t i = 0; i < resolved.train_ids.size(); ++i) {
        const auto& id = resolved.train_ids[i];
        const auto& text = spec.layout == Layout::NumericOnly ? kNoText : data.ste_of(id);
        x.append_row(result.model.pipeline.transform(id, numeric[i], text).values);
    }

    ClassifierConfig config = spec.classifier;
    if (spec.tune != TuneMethod::None) {
        const auto space = default_search_space(config.kind);
        const auto objective = classifier_objective(x, y, config.kind, space, derive_seed(spec.seed, "tune-split"));
        TuneOptions options;
        options.warm_start = point_from_config(config, space);
        options.jobs = spec.tune_jobs;
        auto tuned = spec.tune == TuneMethod::Bo ? tune_bo(space, objective, spec.budget, spec.seed, options)
                                                 : tune_ga(space, objective, spec.budget, spec.seed, options);
        config = config_from_point(config.kind, space, tuned.best.params);
        result.tuning = std::move(tuned);
    }
    result.model.config = config;
    result.model.classifier = train_classifier(config, x, y);

    for (const auto label : kAllLabels) {
        const auto it = resolved.test_ids.find(label);
        if (it == resolved.test_ids.end()) {
            continue;
        }
        for (const auto& id : it->second) {
            const auto& text = spec.layout == Layout::NumericOnly ? kNoText : data.ste_of(id);
            result.predictions.push_back({id, label, result.model.predict_proba(id, data.numeric.at(id), text)});
        }
    }

    std::vector<double> p;
    std::vector<int> truth;
    for (const auto label : kAllLabels) {
        subset_arrays(result.predictions, {label}, p, truth);
        if (!p.empty()) {
            result.class_reports.push_back(evaluate(p, truth, std::string(to_string(label))));
        }
    }
    subset_arrays(result.predictions, {Label::GPT35P, Label::GPT4P}, p, truth);
    if (!p.empty()) {
        result.class_reports.push_back(evaluate(p, truth, std::string(kLlmSubset)));
    }
    for (const auto test : kAllTestScenarios) {
        subset_arrays(result.predictions, test_labels(test), p, truth);
        if (!p.empty()) {
            result.test_reports.push_back(evaluate(p, truth, std::string(scenario_name(test))));
        }
    }
    return result;
}

MetricReport run_attack(const TrainedModel& model, std::span<const std::string> ids, const BenchmarkData& data,
                        std::string subset) {
    if (model.encoder != data.encoder) {
        throw Error(ErrorCode::EncoderMismatch,
                    fmt::format("model expects '{}' embeddings, subset has '{}'", model.encoder, data.encoder));
    }
    if (ids.empty()) {
        throw Error(ErrorCode::EmptySet, "attack subset is empty");
    }
    static const std::vector<double> kNoText;
    std::vector<double> p;
    std::vector<int> truth;
    for (const auto& id : ids) {
        const auto& text = model.pipeline.layout == Layout::NumericOnly ? kNoText : data.ste_of(id);
        p.push_back(model.predict_proba(id, data.numeric.at(id), text));
        truth.push_back(is_fake(data.profile(id).label) ? 1 : 0);
    }
    return evaluate(p, truth, std::move(subset));
}

// ---------------------------------------------------------------------------
// Grid.
// ---------------------------------------------------------------------------

std::string GridCell::key() const {
    return fmt::format("{}_{}_{}", scenario_name(scenario), layout_name(layout), classifier_name(classifier.kind));
}

const GridCell* GridResult::find(TrainScenario scenario, Layout layout, ClassifierKind kind) const {
    for (const auto& cell : cells) {
        if (cell.scenario == scenario && cell.layout == layout && cell.classifier.kind == kind) {
            return &cell;
        }
    }
    return nullptr;
}

GridResult run_grid(const GridSpec& spec, const BenchmarkSplit& split, const BenchmarkData& data) {
    GridResult grid;
    grid.encoder = data.encoder;
    for (const auto layout : spec.layouts) {
        for (const auto& classifier : spec.classifiers) {
            for (const auto scenario : spec.scenarios) {
                grid.cells.push_back({scenario, layout, classifier, std::nullopt, {}});
            }
        }
    }
    parallel_for(grid.cells.size(), spec.jobs, [&](std::size_t i) {
        auto& cell = grid.cells[i];
        ScenarioSpec cell_spec;
        cell_spec.train = cell.scenario;
        cell_spec.layout = cell.layout;
        cell_spec.classifier = cell.classifier;
        cell_spec.tune = spec.tune;
        cell_spec.budget = spec.budget;
        cell_spec.pca_components = spec.pca_components;
        cell_spec.seed = derive_seed(spec.seed, "cell:" + cell.key());
        try {
            cell.result = run_scenario(cell_spec, resolve_scenario(cell.scenario, split), data);
            spdlog::info("cell {} done", cell.key());
        } catch (const std::exception& e) {
            cell.error = e.what();
            spdlog::error("cell {} failed: {}", cell.key(), e.what());
        }
    });
    return grid;
}

std::vector<GridRow> grid_rows(const GridResult& grid) {
    std::vector<GridRow> rows;
    for (const auto& cell : grid.cells) {
        for (const auto test : kAllTestScenarios) {
            GridRow row{std::string(scenario_name(cell.scenario)), std::string(scenario_name(test)), grid.encoder,
                        std::string(classifier_name(cell.classifier.kind)), std::string(layout_name(cell.layout)),
                        {}};
            row.metrics.subset = row.test_subset;
            if (cell.result) {
                row.metrics = cell.result->test_report(test);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<GridRow> class_grid_rows(const GridResult& grid) {
    std::vector<GridRow> rows;
    const std::vector<std::string> subsets{"LLP", "FLP", "GPT35P", "GPT4P", std::string(kLlmSubset)};
    for (const auto& cell : grid.cells) {
        for (const auto& subset : subsets) {
            GridRow row{std::string(scenario_name(cell.scenario)), subset, grid.encoder,
                        std::string(classifier_name(cell.classifier.kind)), std::string(layout_name(cell.layout)),
                        {}};
            row.metrics.subset = subset;
            if (cell.result) {
                row.metrics = cell.result->class_report(subset);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::optional<double> brier_far_correlation(const GridResult& grid, std::size_t* points) {
    std::vector<double> briers;
    std::vector<double> fars;
    for (const auto& cell : grid.cells) {
        if (!cell.result) {
            continue;
        }
        const auto& pooled = cell.result->test_report(TestScenario::CombinedAttack);
        const auto& llm = cell.result->class_report(kLlmSubset);
        if (pooled.brier && llm.far) {
            briers.push_back(*pooled.brier);
            fars.push_back(*llm.far);
        }
    }
    if (points != nullptr) {
        *points = briers.size();
    }
    if (briers.size() < 3) {
        return std::nullopt;
    }
    return pearson(briers, fars);
}

ReportBundle make_report_bundle(const GridResult& grid) {
    ReportBundle bundle;
    bundle.grid = grid_rows(grid);
    bundle.class_grid = class_grid_rows(grid);
    std::set<std::string> variance_done;
    for (const auto& cell : grid.cells) {
        if (!cell.result) {
            continue;
        }
        bundle.calibration.push_back({cell.key(), cell.result->calibration(TestScenario::CombinedAttack)});
        const auto& pca = cell.result->model.pipeline.pca;
        const auto name = fmt::format("{}_{}", scenario_name(cell.scenario), layout_name(cell.layout));
        if (pca && variance_done.insert(name).second) {
            bundle.variance.push_back({name, pca->explained_variance_ratio});
        }
    }
    bundle.brier_far_pearson = brier_far_correlation(grid, &bundle.correlation_points);
    return bundle;
}

void write_predictions_csv(std::ostream& out, const GridResult& grid) {
    out << "cell,train_scenario,layout,classifier,profile_id,label,p_fake\n";
    for (const auto& cell : grid.cells) {
        if (!cell.result) {
            continue;
        }
        for (const auto& p : cell.result->predictions) {
            csv::write_row(out, {cell.key(), std::string(scenario_name(cell.scenario)),
                                 std::string(layout_name(cell.layout)),
                                 std::string(classifier_name(cell.classifier.kind)), p.profile_id,
                                 std::string(to_string(p.label)), csv::format_exact(p.p_fake)});
        }
    }
}

// ---------------------------------------------------------------------------
// Config file.
// ---------------------------------------------------------------------------

ScenarioConfig parse_scenario_config(const nlohmann::json& document, const std::filesystem::path& base_dir) {
    if (!document.is_object()) {
        throw Error(ErrorCode::Parse, "scenario config must be a JSON object");
    }
    static const std::set<std::string> kKnown{"scenarios", "layouts", "classifiers", "encoder", "seed",
                                              "scale",     "tune",    "jobs",        "pca_components",
                                              "corpus",    "word_vectors", "embeddings", "generator",
                                              "classifier_params"};
    for (const auto& [key, value] : document.items()) {
        if (kKnown.count(key) == 0) {
            throw Error(ErrorCode::Parse, "unknown scenario config key '" + key + "'");
        }
    }
    ScenarioConfig config;
    try {
        if (document.contains("scenarios")) {
            config.grid.scenarios.clear();
            for (const auto& s : document.at("scenarios")) {
                const auto parsed = parse_train_scenario(s.get<std::string>());
                if (!parsed) {
                    throw Error(ErrorCode::Parse, "unknown scenario '" + s.get<std::string>() + "'");
                }
                config.grid.scenarios.push_back(*parsed);
            }
        }
        if (document.contains("layouts")) {
            config.grid.layouts.clear();
            for (const auto& l : document.at("layouts")) {
                const auto parsed = parse_layout(l.get<std::string>());
                if (!parsed) {
                    throw Error(ErrorCode::Parse, "unknown layout '" + l.get<std::string>() + "'");
                }
                config.grid.layouts.push_back(*parsed);
            }
        }
        const nlohmann::json overrides = document.value("classifier_params", nlohmann::json::object());
        if (document.contains("classifiers")) {
            config.grid.classifiers.clear();
            for (const auto& c : document.at("classifiers")) {
                const auto name = c.get<std::string>();
                const auto kind = parse_classifier(name);
                if (!kind) {
                    throw Error(ErrorCode::Parse, "unknown classifier '" + name + "'");
                }
                config.grid.classifiers.push_back(
                    classifier_config_from_json(*kind, overrides.value(name, nlohmann::json::object())));
            }
        }
        config.encoder = document.value("encoder", config.encoder);
        config.grid.seed = document.value("seed", config.grid.seed);
        config.scale = document.value("scale", config.scale);
        config.grid.jobs = document.value("jobs", config.grid.jobs);
        config.grid.pca_components = document.value("pca_components", config.grid.pca_components);
        if (document.contains("tune")) {
            const auto method = parse_tune_method(document.at("tune").get<std::string>());
            if (!method) {
                throw Error(ErrorCode::Parse, "unknown tune method");
            }
            config.grid.tune = *method;
        }
        auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!document.contains(key) || document.at(key).is_null()) {
                return std::nullopt;
            }
            std::filesystem::path p = document.at(key).get<std::string>();
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        config.corpus = path_of("corpus");
        config.word_vectors = path_of("word_vectors");
        config.embeddings = path_of("embeddings");
        config.generator = document.value("generator", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("scenario config: ") + e.what());
    }
    if (config.grid.scenarios.empty() || config.grid.layouts.empty() || config.grid.classifiers.empty()) {
        throw Error(ErrorCode::InvalidArgument, "scenario config needs at least one scenario, layout and classifier");
    }
    if (!(config.scale > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    }
    return config;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read scenario config " + path.string());
    }
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, "scenario config " + path.string() + ": " + e.what());
    }
    return parse_scenario_config(document, path.parent_path());
}

}  // namespace sentinel
