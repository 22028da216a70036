#include "sentinel/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "sentinel/error.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/text.hpp"

namespace sentinel {

using nlohmann::json;

std::string_view to_string(Label label) {
    switch (label) {
        case Label::LLP: return "LLP";
        case Label::FLP: return "FLP";
        case Label::GPT35P: return "GPT35P";
        case Label::GPT4P: return "GPT4P";
    }
    return "?";
}

std::optional<Label> parse_label(std::string_view text) {
    for (const Label label : kAllLabels) {
        if (text == to_string(label)) {
            return label;
        }
    }
    return std::nullopt;
}

std::string_view tag_name(SectionTag tag) {
    switch (tag) {
        case SectionTag::Education: return "education";
        case SectionTag::Experience: return "experience";
        case SectionTag::Skills: return "skills";
        case SectionTag::Recommendations: return "recommendations";
        case SectionTag::Summary: return "summary";
        case SectionTag::Location: return "location";
        case SectionTag::Name: return "name";
    }
    return "?";
}

std::optional<SectionTag> parse_tag(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const SectionTag tag : kAllTags) {
        if (lowered == tag_name(tag)) {
            return tag;
        }
    }
    return std::nullopt;
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::ParseError: return "ParseError";
        case RejectReason::SchemaViolation: return "SchemaViolation";
        case RejectReason::UnknownLabel: return "UnknownLabel";
        case RejectReason::UnknownTag: return "UnknownTag";
        case RejectReason::MissingEssential: return "MissingEssential";
        case RejectReason::NegativeCount: return "NegativeCount";
        case RejectReason::DuplicateId: return "DuplicateId";
        case RejectReason::MissingTagVector: return "MissingTagVector";
        case RejectReason::MixedDimensions: return "MixedDimensions";
        case RejectReason::EmptySections: return "EmptySections";
    }
    return "?";
}

std::string Section::text() const {
    std::string out;
    for (const auto& entry : entries) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += entry;
    }
    return out;
}

const std::vector<std::string>& Profile::entries(SectionTag tag) const {
    static const std::vector<std::string> kEmpty;
    for (const auto& section : sections) {
        if (section.tag == tag) {
            return section.entries;
        }
    }
    return kEmpty;
}

std::int64_t Profile::numeric_or(const std::string& key, std::int64_t fallback) const {
    const auto it = numeric.find(key);
    return it == numeric.end() ? fallback : it->second;
}

std::vector<std::pair<SectionTag, std::string>> Profile::tagged_texts() const {
    std::vector<std::pair<SectionTag, std::string>> out;
    for (const SectionTag tag : kAllTags) {
        std::string body;
        switch (tag) {
            case SectionTag::Summary: body = summary; break;
            case SectionTag::Location: body = location; break;
            case SectionTag::Name: body = name; break;
            default:
                for (const auto& section : sections) {
                    if (section.tag == tag) {
                        body = section.text();
                    }
                }
        }
        if (!body.empty()) {
            out.emplace_back(tag, std::move(body));
        }
    }
    return out;
}

namespace {

constexpr std::array<SectionTag, 4> kListTags{SectionTag::Education, SectionTag::Experience, SectionTag::Skills,
                                              SectionTag::Recommendations};

Rejection reject(std::string id, RejectReason reason, std::string detail) {
    return Rejection{0, std::move(id), reason, std::move(detail)};
}

std::optional<std::string> optional_string(const json& record, const char* key, bool& bad_type) {
    const auto it = record.find(key);
    if (it == record.end() || it->is_null()) {
        return std::string{};
    }
    if (!it->is_string()) {
        bad_type = true;
        return std::nullopt;
    }
    return it->get<std::string>();
}

}  // namespace

CleanOutcome clean_profile(const json& record) {
    if (!record.is_object()) {
        return reject("", RejectReason::SchemaViolation, "record is not a JSON object");
    }

    Profile profile;
    const auto id_it = record.find("id");
    if (id_it == record.end() || !id_it->is_string()) {
        return reject("", RejectReason::SchemaViolation, "field 'id' must be a string");
    }
    profile.id = text::normalize(id_it->get<std::string>());
    if (profile.id.empty()) {
        return reject("", RejectReason::SchemaViolation, "field 'id' is empty");
    }

    const auto label_it = record.find("label");
    if (label_it == record.end() || !label_it->is_string()) {
        return reject(profile.id, RejectReason::UnknownLabel, "field 'label' missing");
    }
    const auto label = parse_label(text::normalize(label_it->get<std::string>()));
    if (!label) {
        return reject(profile.id, RejectReason::UnknownLabel, "label '" + label_it->get<std::string>() + "'");
    }
    profile.label = *label;

    for (const auto& [key, target] : {std::pair{"name", &profile.name}, std::pair{"location", &profile.location},
                                      std::pair{"summary", &profile.summary}}) {
        bool bad_type = false;
        const auto value = optional_string(record, key, bad_type);
        if (bad_type) {
            return reject(profile.id, RejectReason::SchemaViolation, std::string("field '") + key + "' must be a string");
        }
        *target = text::normalize(*value);
    }

    std::map<SectionTag, std::vector<std::string>> lists;
    if (const auto it = record.find("sections"); it != record.end() && !it->is_null()) {
        if (!it->is_object()) {
            return reject(profile.id, RejectReason::SchemaViolation, "field 'sections' must be an object");
        }
        for (const auto& [key, value] : it->items()) {
            const auto tag = parse_tag(key);
            if (!tag || std::find(kListTags.begin(), kListTags.end(), *tag) == kListTags.end()) {
                return reject(profile.id, RejectReason::UnknownTag, "section tag '" + key + "'");
            }
            auto& entries = lists[*tag];
            const auto append = [&entries](const std::string& raw) {
                for (auto& piece : text::split_composite(raw)) {
                    entries.push_back(std::move(piece));
                }
            };
            if (value.is_string()) {
                append(value.get<std::string>());
            } else if (value.is_array()) {
                for (const auto& element : value) {
                    if (!element.is_string()) {
                        return reject(profile.id, RejectReason::SchemaViolation,
                                      "section '" + key + "' entries must be strings");
                    }
                    append(element.get<std::string>());
                }
            } else if (!value.is_null()) {
                return reject(profile.id, RejectReason::SchemaViolation, "section '" + key + "' must be a list");
            }
        }
    }
    for (const SectionTag tag : kListTags) {
        auto it = lists.find(tag);
        if (it != lists.end() && !it->second.empty()) {
            profile.sections.push_back(Section{tag, std::move(it->second)});
        }
    }

    if (const auto it = record.find("numeric"); it != record.end() && !it->is_null()) {
        if (!it->is_object()) {
            return reject(profile.id, RejectReason::SchemaViolation, "field 'numeric' must be an object");
        }
        for (const auto& [key, value] : it->items()) {
            std::int64_t count = 0;
            if (value.is_number_unsigned()) {
                count = static_cast<std::int64_t>(value.get<std::uint64_t>());
            } else if (value.is_number_integer()) {
                count = value.get<std::int64_t>();
            } else if (value.is_number_float() && std::isfinite(value.get<double>()) &&
                       std::floor(value.get<double>()) == value.get<double>()) {
                count = static_cast<std::int64_t>(value.get<double>());
            } else {
                return reject(profile.id, RejectReason::SchemaViolation, "numeric '" + key + "' must be an integer");
            }
            if (count < 0) {
                return reject(profile.id, RejectReason::NegativeCount,
                              "numeric '" + key + "' is negative (" + std::to_string(count) + ")");
            }
            profile.numeric[key] = count;
        }
    }
    profile.numeric.try_emplace("connections", 0);
    profile.numeric.try_emplace("followers", 0);

    std::string missing;
    const auto note_missing = [&missing](std::string_view field) {
        if (!missing.empty()) {
            missing += ", ";
        }
        missing += field;
    };
    if (profile.name.empty()) note_missing("Name");
    if (profile.entries(SectionTag::Experience).empty()) note_missing("Experience");
    if (profile.entries(SectionTag::Education).empty()) note_missing("Education");
    if (profile.location.empty()) note_missing("Location");
    if (!missing.empty()) {
        return reject(profile.id, RejectReason::MissingEssential, "missing essential fields: " + missing);
    }
    return profile;
}

json to_json(const Profile& profile) {
    json sections = json::object();
    for (const SectionTag tag : kListTags) {
        sections[std::string(tag_name(tag))] = profile.entries(tag);
    }
    json numeric = json::object();
    for (const auto& [key, value] : profile.numeric) {
        numeric[key] = value;
    }
    return json{{"id", profile.id},          {"label", to_string(profile.label)},
                {"name", profile.name},      {"location", profile.location},
                {"summary", profile.summary}, {"sections", std::move(sections)},
                {"numeric", std::move(numeric)}};
}

namespace {

void accept_record(const json& record, std::size_t line, CorpusLoad& load, std::unordered_set<std::string>& seen) {
    auto outcome = clean_profile(record);
    if (auto* rejection = std::get_if<Rejection>(&outcome)) {
        rejection->line = line;
        load.rejections.push_back(std::move(*rejection));
        return;
    }
    auto& profile = std::get<Profile>(outcome);
    if (!seen.insert(profile.id).second) {
        load.rejections.push_back(Rejection{line, profile.id, RejectReason::DuplicateId, "duplicate id '" + profile.id + "'"});
        return;
    }
    load.profiles.push_back(std::move(profile));
}

}  // namespace

CorpusLoad parse_corpus(std::istream& in, CorpusFormat format) {
    CorpusLoad load;
    std::unordered_set<std::string> seen;
    if (format == CorpusFormat::JsonArray) {
        json document;
        try {
            document = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Parse, std::string("corpus is not a JSON document: ") + e.what());
        }
        if (!document.is_array()) {
            throw Error(ErrorCode::Parse, "JSON corpus must be an array of profile objects");
        }
        std::size_t index = 0;
        for (const auto& record : document) {
            accept_record(record, ++index, load, seen);
        }
        return load;
    }

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (text::normalize(line).empty()) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            load.rejections.push_back(Rejection{line_number, "", RejectReason::ParseError, e.what()});
            continue;
        }
        accept_record(record, line_number, load, seen);
    }
    return load;
}

CorpusLoad load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read corpus file " + path.string());
    }
    return parse_corpus(in, format);
}

void write_corpus(std::ostream& out, std::span<const Profile> profiles) {
    for (const auto& profile : profiles) {
        out << to_json(profile).dump() << '\n';
    }
}

void write_corpus(const std::filesystem::path& path, std::span<const Profile> profiles) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write corpus file " + path.string());
    }
    write_corpus(out, profiles);
}

CorpusSplit stratified_split(std::span<const Profile> profiles, const std::map<Label, SplitCounts>& counts,
                             std::uint64_t seed) {
    std::map<Label, std::vector<std::string>> by_class;
    for (const auto& profile : profiles) {
        by_class[profile.label].push_back(profile.id);
    }

    CorpusSplit split;
    split.seed = seed;
    for (const Label label : kAllLabels) {
        const auto wanted = counts.find(label);
        if (wanted == counts.end() || wanted->second.train + wanted->second.test == 0) {
            continue;
        }
        auto ids = by_class[label];
        const std::size_t need = wanted->second.train + wanted->second.test;
        if (ids.size() < need) {
            throw Error(ErrorCode::InsufficientClass, "class " + std::string(to_string(label)) + " needs " +
                                                          std::to_string(need) + " profiles, corpus has " +
                                                          std::to_string(ids.size()));
        }
        std::sort(ids.begin(), ids.end());
        Rng rng(derive_seed(seed, "split:" + std::string(to_string(label))));
        rng.shuffle(ids);
        split.test.insert(split.test.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(wanted->second.test));
        split.train.insert(split.train.end(), ids.begin() + static_cast<std::ptrdiff_t>(wanted->second.test),
                           ids.begin() + static_cast<std::ptrdiff_t>(need));
    }
    return split;
}

}  // namespace sentinel
