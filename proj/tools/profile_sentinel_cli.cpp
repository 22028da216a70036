// profile-sentinel: one verb per pipeline stage plus `all` for the quickstart.
//
// Seeds: a single --seed S feeds every stage. The generator, the benchmark
// split and the grid all receive S; each stage separates its random streams
// internally by deriving child seeds from S and a stage label
// ("synthgen:vectors", "synthgen:profiles", "split", "cell:<key>",
// "trial:<i>", ...).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "manifest.hpp"
#include "sentinel/corpus.hpp"
#include "sentinel/csv.hpp"
#include "sentinel/embedding.hpp"
#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/model.hpp"
#include "sentinel/report.hpp"
#include "sentinel/scenario.hpp"
#include "sentinel/synthgen.hpp"
#include "sentinel/tune.hpp"
#include "sentinel/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sentinel;
using sentinel::cli::RunManifest;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("profile-sentinel");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("PROFILE_SENTINEL_LOG")) {
        const std::string wanted = env;
        const auto level = spdlog::level::from_str(wanted);
        // from_str maps unknown names to "off"; only honour "off" when asked.
        if (level != spdlog::level::off || wanted == "off") {
            spdlog::set_level(level);
        } else {
            spdlog::warn("unknown PROFILE_SENTINEL_LOG level '{}', keeping info", wanted);
        }
    }
}

void report_error(const std::string& code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    return out;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
}

// Runs `body` under a manifest: digests first, status "running" before any
// work, final status and output digests afterwards, also on failure.
int run_with_manifest(RunManifest& manifest, const std::function<void()>& prepare, const std::function<void()>& body) {
    try {
        prepare();
        manifest.begin();
        body();
        manifest.finish_ok();
        return 0;
    } catch (const Error& e) {
        report_error(std::string(to_string(e.code())), e.what());
        try {
            manifest.finish_failed(std::string(to_string(e.code())), e.what());
        } catch (const std::exception&) {
        }
        return kExitFailure;
    } catch (const std::exception& e) {
        report_error("Internal", e.what());
        try {
            manifest.finish_failed("Internal", e.what());
        } catch (const std::exception&) {
        }
        return kExitFailure;
    }
}

// Flags shared across verbs. Empty strings / nullopt mean "not given".
struct Options {
    std::string config;
    std::string corpus;
    std::string embeddings;
    std::string word_vectors;
    std::string out;
    std::string input;
    std::optional<std::uint64_t> seed;
    std::optional<double> scale;
    std::string layout;
    std::string classifier;
    std::string scenario;
    std::string method = "bo";
    std::optional<std::size_t> jobs;
};

void record_arguments(RunManifest& manifest, const Options& o) {
    auto text = [&](const char* flag, const std::string& value) {
        if (!value.empty()) {
            manifest.set_argument(flag, value);
        }
    };
    text("--config", o.config);
    text("--corpus", o.corpus);
    text("--embeddings", o.embeddings);
    text("--word-vectors", o.word_vectors);
    text("--out", o.out);
    text("--input", o.input);
    text("--layout", o.layout);
    text("--classifier", o.classifier);
    text("--scenario", o.scenario);
    if (o.seed) {
        manifest.set_argument("--seed", *o.seed);
    }
    if (o.scale) {
        manifest.set_argument("--scale", *o.scale);
    }
    if (o.jobs) {
        manifest.set_argument("--jobs", *o.jobs);
    }
}

Layout layout_or_throw(const std::string& text) {
    const auto parsed = parse_layout(text);
    if (!parsed) {
        throw Error(ErrorCode::InvalidArgument, "unknown layout '" + text + "'");
    }
    return *parsed;
}

ClassifierKind classifier_or_throw(const std::string& text) {
    const auto parsed = parse_classifier(text);
    if (!parsed) {
        throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + text + "'");
    }
    return *parsed;
}

// A generator override file may be a bare generator object or a scenario
// config carrying one under "generator".
json generator_overrides(const fs::path& path) {
    auto doc = read_json_file(path);
    if (doc.is_object() && doc.contains("generator")) {
        return doc.at("generator");
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Data sources shared by train, tune and scenario.
// ---------------------------------------------------------------------------

struct Sources {
    std::optional<fs::path> corpus;
    std::optional<fs::path> word_vectors;
    std::optional<fs::path> embeddings;
    json generator = json::object();
    std::string encoder{kBuiltinEncoder};
};

void add_source_inputs(RunManifest& manifest, const Sources& sources) {
    for (const auto& p : {sources.corpus, sources.word_vectors, sources.embeddings}) {
        if (p) {
            manifest.add_input(*p);
        }
    }
}

BenchmarkData load_benchmark(const Sources& sources, std::uint64_t seed, std::size_t jobs, RunManifest& manifest) {
    if (!sources.corpus) {
        if (sources.word_vectors || sources.embeddings) {
            throw Error(ErrorCode::InvalidArgument, "word vectors or embeddings given without a corpus");
        }
        auto config = gen_config_from_json(sources.generator);
        if (!sources.generator.contains("seed")) {
            config.seed = seed;
        }
        manifest.set_seed("generate", config.seed);
        spdlog::info("no corpus given; synthesizing one in-process (seed {})", config.seed);
        auto corpus = generate(config);
        return build_benchmark(std::move(corpus.profiles), corpus.word_vectors, jobs);
    }
    auto loaded = load_corpus(*sources.corpus);
    if (!loaded.rejections.empty()) {
        spdlog::warn("{} corpus records rejected", loaded.rejections.size());
    }
    if (sources.embeddings) {
        auto ingest = ingest_external_embeddings(*sources.embeddings);
        if (!ingest.rejections.empty()) {
            spdlog::warn("{} embedding records rejected", ingest.rejections.size());
        }
        auto data = build_benchmark(std::move(loaded.profiles), ingest.sets);
        if (data.encoder != sources.encoder && sources.encoder != kBuiltinEncoder) {
            throw Error(ErrorCode::EncoderMismatch,
                        "embeddings come from '" + data.encoder + "', config expects '" + sources.encoder + "'");
        }
        return data;
    }
    if (!sources.word_vectors) {
        throw Error(ErrorCode::InvalidArgument, "a corpus needs --word-vectors or --embeddings");
    }
    return build_benchmark(std::move(loaded.profiles), load_word_vectors(*sources.word_vectors), jobs);
}

// Flag values override whatever the config file provides.
Sources sources_from(const Options& o, const std::optional<ScenarioConfig>& config) {
    Sources s;
    if (config) {
        s.corpus = config->corpus;
        s.word_vectors = config->word_vectors;
        s.embeddings = config->embeddings;
        s.generator = config->generator;
        s.encoder = config->encoder;
    }
    if (!o.corpus.empty()) {
        s.corpus = o.corpus;
    }
    if (!o.word_vectors.empty()) {
        s.word_vectors = o.word_vectors;
        s.embeddings.reset();
    }
    if (!o.embeddings.empty()) {
        s.embeddings = o.embeddings;
    }
    return s;
}

void write_cells_json(const fs::path& path, const GridResult& grid, double scale) {
    json cells = json::array();
    for (const auto& cell : grid.cells) {
        json entry{{"cell", cell.key()}, {"status", cell.result ? "ok" : "failed"}};
        if (cell.result) {
            entry["train_size"] = cell.result->train_size;
            entry["classifier_params"] = classifier_params_to_json(cell.result->model.config);
        } else {
            entry["error"] = cell.error;
        }
        cells.push_back(std::move(entry));
    }
    auto out = open_out(path);
    out << json{{"encoder", grid.encoder}, {"scale", scale}, {"cells", cells}}.dump(2) << '\n';
}

void emit_grid_outputs(const GridResult& grid, const fs::path& out_dir, double scale) {
    emit_reports(make_report_bundle(grid), out_dir);
    {
        auto out = open_out(out_dir / "predictions.csv");
        write_predictions_csv(out, grid);
    }
    write_cells_json(out_dir / "cells.json", grid, scale);
}

// ---------------------------------------------------------------------------
// Verbs.
// ---------------------------------------------------------------------------

int cmd_generate(const Options& o) {
    RunManifest manifest("generate", o.out);
    GenConfig config;
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            json overrides = json::object();
            if (!o.config.empty()) {
                manifest.add_config(o.config);
                overrides = generator_overrides(o.config);
            }
            config = gen_config_from_json(overrides);
            if (o.seed) {
                config.seed = *o.seed;
            }
            manifest.set_seed("generate", config.seed);
        },
        [&] {
            const auto report = generate_to(config, o.out);
            spdlog::info("generated {} profiles into {}", [&] {
                std::size_t n = 0;
                for (const auto& [label, count] : report.counts) {
                    n += count;
                }
                return n;
            }(), o.out);
        });
}

int cmd_validate(const Options& o) {
    RunManifest manifest("validate", o.out);
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            manifest.add_input(o.corpus);
        },
        [&] {
            const auto diagnostics = validate_corpus(o.corpus);
            {
                auto out = open_out(fs::path(o.out) / "diagnostics.json");
                out << to_json(diagnostics).dump(2) << '\n';
            }
            if (!diagnostics.ok()) {
                throw Error(ErrorCode::InvalidArgument,
                            "corpus failed validation; see " + (fs::path(o.out) / "diagnostics.json").string());
            }
        });
}

int cmd_embed(const Options& o) {
    RunManifest manifest("embed", o.out);
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            manifest.add_input(o.corpus);
            manifest.add_input(o.word_vectors);
        },
        [&] {
            const auto loaded = load_corpus(o.corpus);
            if (!loaded.rejections.empty()) {
                spdlog::warn("{} corpus records rejected", loaded.rejections.size());
            }
            if (loaded.profiles.empty()) {
                throw Error(ErrorCode::EmptyInput, "corpus has no usable profiles");
            }
            const auto table = load_word_vectors(o.word_vectors);
            std::vector<SectionEmbeddingSet> sets;
            sets.reserve(loaded.profiles.size());
            for (const auto& profile : loaded.profiles) {
                sets.push_back(embed_profile(profile, table));
            }
            auto out = open_out(fs::path(o.out) / "embeddings.jsonl");
            write_embeddings(out, sets);
            spdlog::info("embedded {} profiles with encoder '{}'", sets.size(), kBuiltinEncoder);
        });
}

// train and tune: one grid cell, optionally tuned, plus its reports.
int cmd_train_like(const Options& o, bool tune) {
    RunManifest manifest(tune ? "tune" : "train", o.out);
    std::optional<ScenarioConfig> config;
    Sources sources;
    GridSpec spec;
    double scale = 1.0 / 6.0;
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            if (!o.config.empty()) {
                manifest.add_config(o.config);
                config = load_scenario_config(o.config);
                spec = config->grid;
                scale = config->scale;
            }
            sources = sources_from(o, config);
            add_source_inputs(manifest, sources);
            if (o.seed) {
                spec.seed = *o.seed;
            }
            if (o.scale) {
                scale = *o.scale;
            }
            if (o.jobs) {
                spec.jobs = *o.jobs;
            }
            const auto scenario = parse_train_scenario(o.scenario.empty() ? "baseline" : o.scenario);
            if (!scenario) {
                throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + o.scenario + "'");
            }
            spec.scenarios = {*scenario};
            if (!o.layout.empty()) {
                spec.layouts = {layout_or_throw(o.layout)};
            }
            spec.layouts.resize(1);
            if (!o.classifier.empty()) {
                const auto kind = classifier_or_throw(o.classifier);
                ClassifierConfig chosen = default_classifier_config(kind);
                if (config) {
                    for (const auto& c : config->grid.classifiers) {
                        if (c.kind == kind) {
                            chosen = c;
                        }
                    }
                }
                spec.classifiers = {chosen};
            }
            spec.classifiers.resize(1);
            if (tune) {
                const auto method = parse_tune_method(o.method);
                if (!method || *method == TuneMethod::None) {
                    throw Error(ErrorCode::InvalidArgument, "tune needs --method bo or ga");
                }
                spec.tune = *method;
            } else {
                spec.tune = TuneMethod::None;
            }
            manifest.set_seed("split", spec.seed);
            manifest.set_seed("grid", spec.seed);
        },
        [&] {
            const auto data = load_benchmark(sources, spec.seed, spec.jobs, manifest);
            const auto split = make_benchmark_split(data, scale, spec.seed);
            const auto grid = run_grid(spec, split, data);
            const auto& cell = grid.cells.front();
            if (!cell.result) {
                throw Error(ErrorCode::InvalidArgument, "training failed: " + cell.error);
            }
            const fs::path out_dir = o.out;
            save_model(out_dir / "model.json", cell.result->model);
            emit_grid_outputs(grid, out_dir, scale);
            if (tune && cell.result->tuning) {
                const auto space = default_search_space(cell.classifier.kind);
                {
                    auto out = open_out(out_dir / "tuning_log.csv");
                    write_tuning_log(out, space, cell.result->tuning->trials);
                }
                auto out = open_out(out_dir / "best_params.json");
                out << json{{"method", std::string(tune_method_name(spec.tune))},
                            {"classifier", std::string(classifier_name(cell.classifier.kind))},
                            {"objective", cell.result->tuning->best.objective},
                            {"evaluations", cell.result->tuning->evaluations()},
                            {"params", classifier_params_to_json(cell.result->model.config)}}
                           .dump(2)
                    << '\n';
            }
        });
}

int cmd_scenario(const Options& o) {
    RunManifest manifest("scenario", o.out);
    ScenarioConfig config;
    Sources sources;
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            manifest.add_config(o.config);
            config = load_scenario_config(o.config);
            if (o.seed) {
                config.grid.seed = *o.seed;
            }
            if (o.scale) {
                config.scale = *o.scale;
            }
            if (o.jobs) {
                config.grid.jobs = *o.jobs;
            }
            if (!o.layout.empty()) {
                config.grid.layouts = {layout_or_throw(o.layout)};
            }
            if (!o.classifier.empty()) {
                const auto kind = classifier_or_throw(o.classifier);
                ClassifierConfig chosen = default_classifier_config(kind);
                for (const auto& c : config.grid.classifiers) {
                    if (c.kind == kind) {
                        chosen = c;
                    }
                }
                config.grid.classifiers = {chosen};
            }
            sources = sources_from(o, config);
            add_source_inputs(manifest, sources);
            manifest.set_seed("split", config.grid.seed);
            manifest.set_seed("grid", config.grid.seed);
        },
        [&] {
            const auto data = load_benchmark(sources, config.grid.seed, config.grid.jobs, manifest);
            const auto split = make_benchmark_split(data, config.scale, config.grid.seed);
            const auto grid = run_grid(config.grid, split, data);
            emit_grid_outputs(grid, o.out, config.scale);
            std::size_t failed = 0;
            for (const auto& cell : grid.cells) {
                if (!cell.result) {
                    ++failed;
                    spdlog::warn("cell {} failed: {}", cell.key(), cell.error);
                }
            }
            spdlog::info("{} cells, {} failed; reports in {}", grid.cells.size(), failed, o.out);
            if (failed == grid.cells.size()) {
                throw Error(ErrorCode::EmptySet, "every grid cell failed");
            }
        });
}

std::vector<GridRow> read_grid_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    return read_grid_csv(in);
}

std::vector<double> read_variance_ratios(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    const auto rows = csv::read(in);
    std::vector<double> ratios;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) {
            throw Error(ErrorCode::Parse, path.string() + ": expected component_index,ratio,cumulative");
        }
        const auto ratio = csv::parse_metric(rows[i][1]);
        if (!ratio) {
            throw Error(ErrorCode::Parse, path.string() + ": bad ratio '" + rows[i][1] + "'");
        }
        ratios.push_back(*ratio);
    }
    return ratios;
}

std::vector<fs::path> sorted_with_extension(const fs::path& dir, const std::string& extension) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) {
        return files;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Pearson r over cells from the two grid files: Brier on the combined attack
// set against FAR on the pooled LLM-like class view.
void correlation_from_rows(ReportBundle& bundle) {
    auto key = [](const GridRow& r) { return r.train_scenario + '|' + r.classifier + '|' + r.layout; };
    std::map<std::string, double> brier;
    for (const auto& row : bundle.grid) {
        if (row.test_subset == scenario_name(TestScenario::CombinedAttack) && row.metrics.brier) {
            brier[key(row)] = *row.metrics.brier;
        }
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : bundle.class_grid) {
        if (row.test_subset != kLlmSubset || !row.metrics.far) {
            continue;
        }
        const auto it = brier.find(key(row));
        if (it != brier.end()) {
            xs.push_back(it->second);
            ys.push_back(*row.metrics.far);
        }
    }
    bundle.correlation_points = xs.size();
    bundle.brier_far_pearson = xs.size() >= 3 ? pearson(xs, ys) : std::nullopt;
}

int cmd_report(const Options& o) {
    RunManifest manifest("report", o.out);
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            if (!fs::is_directory(o.input)) {
                throw Error(ErrorCode::Io, "report input is not a directory: " + o.input);
            }
            const fs::path input = o.input;
            manifest.add_input(input / "grid.csv");
            for (const char* sub : {"class_grid.csv", "calibration", "pca"}) {
                if (fs::exists(input / sub)) {
                    manifest.add_input(input / sub);
                }
            }
        },
        [&] {
            const fs::path input = o.input;
            ReportBundle bundle;
            bundle.grid = read_grid_file(input / "grid.csv");
            if (fs::exists(input / "class_grid.csv")) {
                bundle.class_grid = read_grid_file(input / "class_grid.csv");
            }
            for (const auto& path : sorted_with_extension(input / "calibration", ".csv")) {
                std::ifstream in(path);
                bundle.calibration.push_back({path.stem().string(), read_calibration_csv(in)});
            }
            for (const auto& path : sorted_with_extension(input / "pca", ".csv")) {
                bundle.variance.push_back({path.stem().string(), read_variance_ratios(path)});
            }
            correlation_from_rows(bundle);
            emit_reports(bundle, o.out);
            spdlog::info("rendered {} grid rows, {} calibration curves, {} variance curves into {}",
                         bundle.grid.size(), bundle.calibration.size(), bundle.variance.size(), o.out);
        });
}

// generate -> embed -> scenario -> report, each stage in its own directory
// with its own manifest.
int cmd_all(const Options& o) {
    RunManifest manifest("all", o.out);
    std::optional<ScenarioConfig> config;
    std::uint64_t seed = 0;
    return run_with_manifest(
        manifest,
        [&] {
            record_arguments(manifest, o);
            if (!o.config.empty()) {
                manifest.add_config(o.config);
                config = load_scenario_config(o.config);
                seed = config->grid.seed;
            }
            if (o.seed) {
                seed = *o.seed;
            }
            manifest.set_seed("base", seed);
        },
        [&] {
            const fs::path out = o.out;
            auto stage = [](const char* name, int code) {
                if (code != 0) {
                    throw Error(ErrorCode::InvalidArgument, std::string("stage '") + name + "' failed");
                }
            };
            const fs::path data_dir = out / "data";
            const fs::path embed_dir = out / "embeddings";
            const fs::path results_dir = out / "results";
            const fs::path report_dir = out / "report";

            Options gen;
            gen.out = data_dir.string();
            gen.seed = seed;
            gen.config = o.config;
            stage("generate", cmd_generate(gen));

            Options emb;
            emb.corpus = (data_dir / "corpus.jsonl").string();
            emb.word_vectors = (data_dir / "word_vectors.txt").string();
            emb.out = embed_dir.string();
            stage("embed", cmd_embed(emb));

            // Without a config the scenario stage runs the default grid.
            fs::path config_path = o.config;
            if (config_path.empty()) {
                config_path = out / "grid.default.json";
                auto f = open_out(config_path);
                f << json{{"scenarios", {"baseline", "gpt35_retrain", "gpt4_retrain", "combined_retrain"}},
                          {"layouts", {"fused", "text", "numeric"}},
                          {"classifiers", {"gbdt"}},
                          {"seed", seed}}
                         .dump(2)
                  << '\n';
            }
            Options scen;
            scen.config = config_path.string();
            scen.corpus = emb.corpus;
            scen.embeddings = (embed_dir / "embeddings.jsonl").string();
            scen.out = results_dir.string();
            scen.seed = seed;
            scen.scale = o.scale;
            scen.jobs = o.jobs;
            scen.layout = o.layout;
            scen.classifier = o.classifier;
            stage("scenario", cmd_scenario(scen));

            Options rep;
            rep.input = results_dir.string();
            rep.out = report_dir.string();
            stage("report", cmd_report(rep));
        });
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Fake professional-profile detection: synthetic corpora, STE + numeric features, "
                 "boosted trees, adversarial scenario grids."};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Options o;
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output directory")->required(); };
    auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "Base seed for every stage"); };
    auto add_jobs = [&](CLI::App* sub) {
        sub->add_option("--jobs", o.jobs, "Worker cap")->check(CLI::PositiveNumber);
    };
    auto add_model_flags = [&](CLI::App* sub) {
        sub->add_option("--corpus", o.corpus, "Corpus JSONL")->check(CLI::ExistingFile);
        sub->add_option("--word-vectors", o.word_vectors, "Word-vector table")->check(CLI::ExistingFile);
        sub->add_option("--embeddings", o.embeddings, "Precomputed section embeddings JSONL")
            ->check(CLI::ExistingFile);
        sub->add_option("--scale", o.scale, "Benchmark scale relative to the full-size split")
            ->check(CLI::Range(1e-6, 1.0));
        sub->add_option("--layout", o.layout, "fused|text|numeric")
            ->check(CLI::IsMember({"fused", "text", "numeric", "Fused167", "TextOnly150", "NumericOnly17"}));
        sub->add_option("--classifier", o.classifier, "gbdt|gbdt-alt|logreg|knn")
            ->check(CLI::IsMember({"gbdt", "gbdt-alt", "logreg", "knn"}));
        add_seed(sub);
        add_jobs(sub);
        add_out(sub);
    };

    auto* generate = app.add_subcommand("generate", "Write a synthetic corpus and its word vectors");
    generate->add_option("--config", o.config, "Generator overrides (or a scenario config with 'generator')")
        ->check(CLI::ExistingFile);
    add_seed(generate);
    add_out(generate);

    auto* validate = app.add_subcommand("validate", "Check a corpus for schema and structural problems");
    validate->add_option("--corpus", o.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    add_out(validate);

    auto* embed = app.add_subcommand("embed", "Embed every profile section with the built-in encoder");
    embed->add_option("--corpus", o.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    embed->add_option("--word-vectors", o.word_vectors, "Word-vector table")->required()->check(CLI::ExistingFile);
    add_out(embed);

    auto* train = app.add_subcommand("train", "Train one model on a scenario and score every test set");
    train->add_option("--config", o.config, "Scenario config supplying defaults")->check(CLI::ExistingFile);
    train->add_option("--scenario", o.scenario, "Training scenario (default baseline)");
    add_model_flags(train);

    auto* tune = app.add_subcommand("tune", "Tune, then train one model as in 'train'");
    tune->add_option("--config", o.config, "Scenario config supplying defaults")->check(CLI::ExistingFile);
    tune->add_option("--scenario", o.scenario, "Training scenario (default baseline)");
    tune->add_option("--method", o.method, "bo|ga")->check(CLI::IsMember({"bo", "ga"}));
    add_model_flags(tune);

    auto* scenario = app.add_subcommand("scenario", "Run the scenario grid described by a config");
    scenario->add_option("--config", o.config, "Scenario config")->required()->check(CLI::ExistingFile);
    add_model_flags(scenario);

    auto* report = app.add_subcommand("report", "Re-render reports from a results directory");
    report->add_option("--input", o.input, "Directory holding grid.csv and friends")->required();
    add_out(report);

    auto* all = app.add_subcommand("all", "generate, embed, scenario and report in one go");
    all->add_option("--config", o.config, "Scenario config")->check(CLI::ExistingFile);
    all->add_option("--scale", o.scale, "Benchmark scale")->check(CLI::Range(1e-6, 1.0));
    all->add_option("--layout", o.layout, "Restrict the grid to one layout")
        ->check(CLI::IsMember({"fused", "text", "numeric"}));
    all->add_option("--classifier", o.classifier, "Restrict the grid to one classifier")
        ->check(CLI::IsMember({"gbdt", "gbdt-alt", "logreg", "knn"}));
    add_seed(all);
    add_jobs(all);
    add_out(all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (*generate) {
        return cmd_generate(o);
    }
    if (*validate) {
        return cmd_validate(o);
    }
    if (*embed) {
        return cmd_embed(o);
    }
    if (*train) {
        return cmd_train_like(o, false);
    }
    if (*tune) {
        return cmd_train_like(o, true);
    }
    if (*scenario) {
        return cmd_scenario(o);
    }
    if (*report) {
        return cmd_report(o);
    }
    return cmd_all(o);
}
