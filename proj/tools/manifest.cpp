#include "manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "sentinel/error.hpp"
#include "sentinel/version.hpp"

namespace sentinel::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "sha256 unavailable");
    }
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        const auto got = in.gcount();
        if (got > 0) {
            EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(got));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

namespace {

std::vector<fs::path> regular_files_below(const fs::path& root) {
    std::vector<fs::path> files;
    if (fs::is_regular_file(root)) {
        files.push_back(root);
        return files;
    }
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

nlohmann::json digests_to_json(const std::vector<FileDigest>& digests) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : digests) {
        out.push_back({{"path", d.path}, {"sha256", d.sha256}});
    }
    return out;
}

}  // namespace

RunManifest::RunManifest(std::string command, fs::path out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), path_(out_dir_ / kManifestName) {}

void RunManifest::set_argument(const std::string& flag, nlohmann::json value) { arguments_[flag] = std::move(value); }

void RunManifest::set_seed(const std::string& stage, std::uint64_t seed) { seeds_[stage] = seed; }

void RunManifest::add_config(const fs::path& path) {
    configs_.push_back(path.string());
    add_input(path);
}

void RunManifest::add_input(const fs::path& path) {
    if (!fs::exists(path)) {
        throw Error(ErrorCode::Io, "input not found: " + path.string());
    }
    for (const auto& file : regular_files_below(path)) {
        inputs_.push_back({file.string(), sha256_file(file)});
    }
}

std::vector<FileDigest> RunManifest::collect_outputs() const {
    std::vector<FileDigest> outputs;
    if (!fs::exists(out_dir_)) {
        return outputs;
    }
    for (const auto& file : regular_files_below(out_dir_)) {
        if (file == path_) {
            continue;
        }
        outputs.push_back({fs::relative(file, out_dir_).generic_string(), sha256_file(file)});
    }
    return outputs;
}

void RunManifest::begin() {
    status_ = "running";
    write();
}

void RunManifest::finish_ok() {
    outputs_ = collect_outputs();
    status_ = "ok";
    write();
}

void RunManifest::finish_failed(const std::string& code, const std::string& message) {
    outputs_ = collect_outputs();
    status_ = "failed";
    error_ = {code, message};
    write();
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json doc{
        {"command", command_},
        {"tool_version", std::string(kToolVersion)},
        {"arguments", arguments_},
        {"seeds", seeds_},
        {"configs", configs_},
        {"inputs", digests_to_json(inputs_)},
        {"outputs", digests_to_json(outputs_)},
        {"status", status_},
    };
    if (error_) {
        doc["error"] = {{"error", error_->first}, {"message", error_->second}};
    }
    return doc;
}

void RunManifest::write() const {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path_.string());
    }
    out << to_json().dump(2) << '\n';
}

}  // namespace sentinel::cli
