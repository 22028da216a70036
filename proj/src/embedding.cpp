#include "sentinel/embedding.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/text.hpp"

namespace sentinel {

using nlohmann::json;

bool WordVectorTable::insert(std::string token, std::span<const double> values) {
    if (tokens_.empty() && dim_ == 0) {
        dim_ = values.size();
    }
    if (values.size() != dim_) {
        throw Error(ErrorCode::InconsistentVector,
                    fmt::format("vector for '{}' has {} values, table dim is {}", token, values.size(), dim_));
    }
    if (const auto it = index_.find(token); it != index_.end()) {
        std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
        return true;
    }
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    values_.insert(values_.end(), values.begin(), values.end());
    return false;
}

std::span<const double> WordVectorTable::find(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) {
        return {};
    }
    return {values_.data() + it->second * dim_, dim_};
}

WordVectorTable parse_word_vectors(std::istream& in) {
    WordVectorTable table;
    std::string line;
    std::size_t line_number = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string_view rest(line);
        const auto skip_space = [&rest] {
            const auto pos = rest.find_first_not_of(" \t");
            rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos);
        };
        skip_space();
        if (rest.empty()) {
            continue;
        }
        const auto token_end = rest.find_first_of(" \t");
        std::string token(rest.substr(0, token_end));
        rest = token_end == std::string_view::npos ? std::string_view{} : rest.substr(token_end);
        values.clear();
        for (skip_space(); !rest.empty(); skip_space()) {
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
            if (ec != std::errc()) {
                throw Error(ErrorCode::Parse, fmt::format("line {}: malformed real in vector", line_number));
            }
            values.push_back(value);
            rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
        }
        if (values.empty() || (table.size() > 0 && values.size() != table.dim())) {
            throw Error(ErrorCode::InconsistentVector,
                        fmt::format("line {}: expected {} values, found {}", line_number, table.dim(), values.size()));
        }
        if (table.insert(token, values)) {
            spdlog::warn("word vectors: duplicate token '{}' at line {}; last entry wins", token, line_number);
        }
    }
    if (table.size() == 0) {
        throw Error(ErrorCode::EmptyTable, "word vector file has no entries");
    }
    return table;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read word vector file " + path.string());
    }
    return parse_word_vectors(in);
}

void write_word_vectors(std::ostream& out, const WordVectorTable& table) {
    for (const auto& token : table.tokens()) {
        out << token;
        for (const double v : table.find(token)) {
            out << ' ' << csv::format_exact(v);
        }
        out << '\n';
    }
}

SectionVector embed_section(std::string_view text, const WordVectorTable& table) {
    SectionVector out;
    out.values.assign(table.dim(), 0.0);
    std::size_t hits = 0;
    for (const auto& token : text::tokenize(text)) {
        const auto vec = table.find(token);
        if (vec.empty()) {
            continue;
        }
        for (std::size_t i = 0; i < vec.size(); ++i) {
            out.values[i] += vec[i];
        }
        ++hits;
    }
    if (hits == 0) {
        out.oov = true;
        return out;
    }
    for (double& v : out.values) {
        v /= static_cast<double>(hits);
    }
    return out;
}

SteVector ste_aggregate(const SectionEmbeddingSet& set) {
    if (set.items.empty()) {
        throw Error(ErrorCode::EmptySet, "profile '" + set.profile_id + "' has no section embeddings");
    }
    const std::size_t dim = set.dim();
    SteVector ste{set.profile_id, std::vector<double>(dim, 0.0)};
    for (const auto& item : set.items) {
        if (item.e.size() != dim || item.em_tag.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "profile '" + set.profile_id + "' mixes embedding dimensions");
        }
        for (std::size_t i = 0; i < dim; ++i) {
            ste.values[i] += item.e[i] - item.em_tag[i];
        }
    }
    const double n = static_cast<double>(set.items.size());
    for (double& v : ste.values) {
        v /= n;
    }
    return ste;
}

SectionEmbeddingSet embed_profile(const Profile& profile, const WordVectorTable& table, std::string_view encoder) {
    SectionEmbeddingSet set{profile.id, std::string(encoder), {}};
    for (auto& [tag, body] : profile.tagged_texts()) {
        set.items.push_back(SectionEmbedding{tag, embed_section(body, table).values,
                                             embed_section(tag_name(tag), table).values});
    }
    return set;
}

namespace {

std::optional<std::vector<double>> real_array(const json& value) {
    if (!value.is_array()) {
        return std::nullopt;
    }
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& element : value) {
        if (!element.is_number()) {
            return std::nullopt;
        }
        out.push_back(element.get<double>());
    }
    return out;
}

}  // namespace

EmbeddingIngest parse_embeddings(std::istream& in) {
    EmbeddingIngest ingest;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (text::normalize(line).empty()) {
            continue;
        }
        const auto reject = [&](std::string id, RejectReason reason, std::string detail) {
            ingest.rejections.push_back(Rejection{line_number, std::move(id), reason, std::move(detail)});
        };
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            reject("", RejectReason::ParseError, e.what());
            continue;
        }
        if (!record.is_object() || !record.contains("profile_id") || !record["profile_id"].is_string()) {
            reject("", RejectReason::SchemaViolation, "record needs a string 'profile_id'");
            continue;
        }
        SectionEmbeddingSet set;
        set.profile_id = record["profile_id"].get<std::string>();
        set.encoder = record.value("encoder", std::string{});
        const auto sections = record.find("sections");
        if (sections == record.end() || !sections->is_array() || sections->empty()) {
            reject(set.profile_id, RejectReason::EmptySections, "record has no sections");
            continue;
        }
        bool ok = true;
        std::size_t dim = 0;
        for (const auto& section : *sections) {
            const auto tag = section.is_object() && section.contains("tag") && section["tag"].is_string()
                                 ? parse_tag(section["tag"].get<std::string>())
                                 : std::nullopt;
            if (!tag) {
                reject(set.profile_id, RejectReason::UnknownTag, "section without a known tag");
                ok = false;
                break;
            }
            const auto e = section.contains("e") ? real_array(section["e"]) : std::nullopt;
            const auto em = section.contains("em_tag") ? real_array(section["em_tag"]) : std::nullopt;
            if (!e) {
                reject(set.profile_id, RejectReason::SchemaViolation,
                       fmt::format("section '{}' lacks a numeric 'e' vector", tag_name(*tag)));
                ok = false;
                break;
            }
            if (!em) {
                reject(set.profile_id, RejectReason::MissingTagVector,
                       fmt::format("section '{}' lacks its tag vector 'em_tag'", tag_name(*tag)));
                ok = false;
                break;
            }
            if (dim == 0) {
                dim = e->size();
            }
            if (e->size() != dim || em->size() != dim || dim == 0) {
                reject(set.profile_id, RejectReason::MixedDimensions,
                       fmt::format("section '{}' has dims {}/{}, expected {}", tag_name(*tag), e->size(), em->size(), dim));
                ok = false;
                break;
            }
            set.items.push_back(SectionEmbedding{*tag, std::move(*e), std::move(*em)});
        }
        if (!ok) {
            continue;
        }
        if (!seen.insert(set.profile_id).second) {
            reject(set.profile_id, RejectReason::DuplicateId, "duplicate profile_id '" + set.profile_id + "'");
            continue;
        }
        ingest.sets.push_back(std::move(set));
    }
    return ingest;
}

EmbeddingIngest ingest_external_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read embeddings file " + path.string());
    }
    return parse_embeddings(in);
}

void write_embeddings(std::ostream& out, std::span<const SectionEmbeddingSet> sets) {
    for (const auto& set : sets) {
        json sections = json::array();
        for (const auto& item : set.items) {
            sections.push_back(json{{"tag", tag_name(item.tag)}, {"e", item.e}, {"em_tag", item.em_tag}});
        }
        out << json{{"profile_id", set.profile_id}, {"encoder", set.encoder}, {"sections", std::move(sections)}}.dump()
            << '\n';
    }
}

}  // namespace sentinel
