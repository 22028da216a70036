#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sentinel::cli {

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
    std::string path;
    std::string sha256;
};

// Everything needed to replay a run. The manifest carries no timestamps so
// that identical runs produce identical manifests.
class RunManifest {
public:
    RunManifest(std::string command, std::filesystem::path out_dir);

    void set_argument(const std::string& flag, nlohmann::json value);
    void set_seed(const std::string& stage, std::uint64_t seed);
    void add_config(const std::filesystem::path& path);
    // Digests the file now; a directory contributes every regular file below it.
    void add_input(const std::filesystem::path& path);

    // Writes status "running". Called before any work starts.
    void begin();
    // Records every file under the output directory (except the manifest
    // itself) and the final status.
    void finish_ok();
    void finish_failed(const std::string& code, const std::string& message);

    nlohmann::json to_json() const;
    const std::filesystem::path& path() const { return path_; }

private:
    void write() const;
    std::vector<FileDigest> collect_outputs() const;

    std::string command_;
    std::filesystem::path out_dir_;
    std::filesystem::path path_;
    std::map<std::string, nlohmann::json> arguments_;
    std::map<std::string, std::uint64_t> seeds_;
    std::vector<std::string> configs_;
    std::vector<FileDigest> inputs_;
    std::vector<FileDigest> outputs_;
    std::string status_ = "pending";
    std::optional<std::pair<std::string, std::string>> error_;
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace sentinel::cli
