#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PROFILE_SENTINEL_CLI;
const fs::path kConfigs = PROFILE_SENTINEL_CONFIG_DIR;

struct Run {
    int status = -1;
    std::string err;
};

fs::path scratch() {
    static const fs::path root = [] {
        auto dir = fs::temp_directory_path() / "sentinel_cli_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }();
    return root;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Runs the CLI with stdout discarded and stderr captured to a file.
Run run(const std::string& args) {
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = "'" + kCli + "' " + args + " >/dev/null 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = slurp(err);
    return r;
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

std::size_t line_count(const fs::path& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("scenario on the shipped grid config writes reports and a manifest") {
    const auto out = scratch() / "grid";
    const auto r = run("scenario --config '" + (kConfigs / "grid.json").string() +
                       "' --scale 0.05 --layout fused --classifier gbdt --out '" + out.string() + "'");
    REQUIRE(r.status == 0);
    for (const char* file : {"grid.csv", "class_grid.csv", "cells.json", "correlation.json", "predictions.csv",
                             "heatmap_f1_fused_gbdt.svg", "heatmap_far_fused_gbdt.svg", "manifest.json"}) {
        CHECK(fs::exists(out / file));
    }
    CHECK(fs::exists(out / "calibration" / "baseline_fused_gbdt.csv"));
    // Four scenarios times four test sets, plus the header.
    CHECK(line_count(out / "grid.csv") == 17);

    const auto manifest = read_json(out / "manifest.json");
    for (const char* key : {"arguments", "command", "configs", "inputs", "outputs", "seeds", "status", "tool_version"}) {
        CHECK(manifest.contains(key));
    }
    CHECK(manifest["command"] == "scenario");
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["seeds"]["split"] == 0);
    bool listed = false;
    for (const auto& entry : manifest["outputs"]) {
        listed = listed || entry["path"] == "grid.csv";
        CHECK(entry["sha256"].get<std::string>().size() == 64);
    }
    CHECK(listed);
}

TEST_CASE("repeated runs are byte-identical") {
    const auto a = scratch() / "rep_a";
    const auto b = scratch() / "rep_b";
    for (const auto& dir : {a, b}) {
        REQUIRE(run("scenario --config '" + (kConfigs / "grid.json").string() +
                    "' --scale 0.05 --layout text --classifier logreg --out '" + dir.string() + "'")
                    .status == 0);
    }
    CHECK(slurp(a / "grid.csv") == slurp(b / "grid.csv"));
    CHECK(slurp(a / "predictions.csv") == slurp(b / "predictions.csv"));
}

TEST_CASE("usage errors exit 2 without a manifest") {
    const auto out = scratch() / "usage";
    CHECK(run("scenario --out '" + out.string() + "'").status == 2);
    CHECK_FALSE(fs::exists(out / "manifest.json"));
    CHECK(run("train --layout sideways --out '" + out.string() + "'").status == 2);
    CHECK(run("frobnicate").status == 2);
}

TEST_CASE("a bad config exits 1 with a JSON error and a failed manifest") {
    const auto config = scratch() / "bad.json";
    std::ofstream(config) << R"({"scenarios":["nope"]})";
    const auto out = scratch() / "bad";
    const auto r = run("scenario --config '" + config.string() + "' --out '" + out.string() + "'");
    CHECK(r.status == 1);
    const auto error = json::parse(r.err.substr(r.err.find('{')));
    CHECK(error["error"] == "Parse");
    CHECK(error["message"].get<std::string>().find("nope") != std::string::npos);
    const auto manifest = read_json(out / "manifest.json");
    CHECK(manifest["status"] == "failed");
    CHECK(manifest["error"]["error"] == "Parse");
}

TEST_CASE("generate, validate and embed chain through files") {
    const auto gen = scratch() / "gen";
    const auto config = scratch() / "small.json";
    std::ofstream(config) << R"({"counts":{"LLP":30,"FLP":10,"GPT35P":20,"GPT4P":10}})";
    REQUIRE(run("generate --config '" + config.string() + "' --out '" + gen.string() + "'").status == 0);
    CHECK(line_count(gen / "corpus.jsonl") == 70);
    CHECK(fs::exists(gen / "word_vectors.txt"));
    CHECK(read_json(gen / "gen_report.json")["counts"]["GPT4P"] == 10);

    const auto val = scratch() / "val";
    REQUIRE(run("validate --corpus '" + (gen / "corpus.jsonl").string() + "' --out '" + val.string() + "'").status ==
            0);
    const auto diagnostics = read_json(val / "diagnostics.json");
    CHECK(diagnostics["ok"] == true);
    CHECK(diagnostics["records"] == 70);

    const auto emb = scratch() / "emb";
    REQUIRE(run("embed --corpus '" + (gen / "corpus.jsonl").string() + "' --word-vectors '" +
                (gen / "word_vectors.txt").string() + "' --out '" + emb.string() + "'")
                .status == 0);
    CHECK(read_json(emb / "manifest.json")["status"] == "ok");
}

TEST_CASE("validate flags a duplicated record") {
    const auto gen = scratch() / "gen_dup";
    const auto config = scratch() / "tiny.json";
    std::ofstream(config) << R"({"counts":{"LLP":3,"FLP":1,"GPT35P":1,"GPT4P":1}})";
    REQUIRE(run("generate --config '" + config.string() + "' --out '" + gen.string() + "'").status == 0);
    std::string first;
    {
        std::ifstream in(gen / "corpus.jsonl");
        std::getline(in, first);
    }
    std::ofstream(gen / "corpus.jsonl", std::ios::app) << first << '\n';
    const auto val = scratch() / "val_dup";
    CHECK(run("validate --corpus '" + (gen / "corpus.jsonl").string() + "' --out '" + val.string() + "'").status ==
          1);
    const auto diagnostics = read_json(val / "diagnostics.json");
    CHECK(diagnostics["ok"] == false);
    CHECK(diagnostics["duplicate_ids"].size() == 1);
}

TEST_CASE("train writes a model, tune adds a log, report re-renders") {
    const auto tr = scratch() / "train";
    REQUIRE(run("train --scale 0.05 --classifier logreg --out '" + tr.string() + "'").status == 0);
    CHECK(read_json(tr / "model.json").contains("classifier"));
    CHECK(line_count(tr / "grid.csv") == 5);

    const auto tu = scratch() / "tune";
    REQUIRE(run("tune --method ga --scale 0.05 --classifier logreg --out '" + tu.string() + "'").status == 0);
    // 176 evaluations plus the header.
    CHECK(line_count(tu / "tuning_log.csv") == 177);
    CHECK(fs::exists(tu / "best_params.json"));

    const auto rp = scratch() / "report";
    REQUIRE(run("report --input '" + tu.string() + "' --out '" + rp.string() + "'").status == 0);
    CHECK(slurp(rp / "grid.csv") == slurp(tu / "grid.csv"));
    CHECK(fs::exists(rp / "heatmap_f1_fused_logreg.svg"));
    CHECK(slurp(rp / "heatmap_f1_fused_logreg.svg").find("<svg") != std::string::npos);
    CHECK(fs::exists(rp / "calibration" / "baseline_fused_logreg.svg"));

    CHECK(run("report --input '" + (scratch() / "missing").string() + "' --out '" + rp.string() + "'").status == 1);
}
