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
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sentinel {

// Closed four-class taxonomy. Binary projection: LLP is legitimate, every
// other class is fake.
enum class Label { LLP, FLP, GPT35P, GPT4P };

inline constexpr std::array<Label, 4> kAllLabels{Label::LLP, Label::FLP, Label::GPT35P, Label::GPT4P};

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);
inline bool is_fake(Label label) { return label != Label::LLP; }

enum class SectionTag { Education, Experience, Skills, Recommendations, Summary, Location, Name };

inline constexpr std::array<SectionTag, 7> kAllTags{
    SectionTag::Education, SectionTag::Experience, SectionTag::Skills, SectionTag::Recommendations,
    SectionTag::Summary,   SectionTag::Location,   SectionTag::Name};

// Lowercase tag word, e.g. "education". Also used as the tag text for the
// built-in encoder.
std::string_view tag_name(SectionTag tag);
std::optional<SectionTag> parse_tag(std::string_view text);

// A list-valued profile section. Entries are cleaned, one per job, degree,
// skill or recommendation.
struct Section {
    SectionTag tag = SectionTag::Experience;
    std::vector<std::string> entries;

    // Entries joined by single spaces.
    std::string text() const;

    friend bool operator==(const Section&, const Section&) = default;
};

struct Profile {
    std::string id;
    Label label = Label::LLP;
    std::string name;
    std::string location;
    std::string summary;
    // Education, Experience, Skills, Recommendations in canonical tag order;
    // empty lists are not stored.
    std::vector<Section> sections;
    std::map<std::string, std::int64_t> numeric;

    const std::vector<std::string>& entries(SectionTag tag) const;
    std::int64_t numeric_or(const std::string& key, std::int64_t fallback) const;

    // Every non-empty section text (all seven tags) in canonical tag order.
    std::vector<std::pair<SectionTag, std::string>> tagged_texts() const;

    friend bool operator==(const Profile&, const Profile&) = default;
};

enum class RejectReason {
    ParseError,
    SchemaViolation,
    UnknownLabel,
    UnknownTag,
    MissingEssential,
    NegativeCount,
    DuplicateId,
    MissingTagVector,
    MixedDimensions,
    EmptySections,
};

std::string_view to_string(RejectReason reason);

// One entry of a rejection ledger. `line` is 1-based; 0 when not file-backed.
struct Rejection {
    std::size_t line = 0;
    std::string id;
    RejectReason reason = RejectReason::SchemaViolation;
    std::string detail;
};

using CleanOutcome = std::variant<Profile, Rejection>;

// Repairs and validates one parsed record: normalizes whitespace and control
// characters, splits composite entries on ';', '|' and newline, defaults the
// connections/followers counts to 0 when absent, then verifies the essential
// fields Name, Experience, Education and Location.
CleanOutcome clean_profile(const nlohmann::json& record);

nlohmann::json to_json(const Profile& profile);

enum class CorpusFormat { JsonLines, JsonArray };

struct CorpusLoad {
    std::vector<Profile> profiles;
    std::vector<Rejection> rejections;
};

CorpusLoad load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::JsonLines);
CorpusLoad parse_corpus(std::istream& in, CorpusFormat format = CorpusFormat::JsonLines);

void write_corpus(std::ostream& out, std::span<const Profile> profiles);
void write_corpus(const std::filesystem::path& path, std::span<const Profile> profiles);

struct SplitCounts {
    std::size_t train = 0;
    std::size_t test = 0;
};

struct CorpusSplit {
    std::vector<std::string> train;
    std::vector<std::string> test;
    std::uint64_t seed = 0;
};

// Per-class split with exact counts. Ids of each class are sorted, shuffled by
// a stream derived from (seed, class); the first `test` ids go to test and the
// next `train` ids to train, so a class's test ids do not depend on how many
// of its profiles are used for training.
CorpusSplit stratified_split(std::span<const Profile> profiles, const std::map<Label, SplitCounts>& counts,
                             std::uint64_t seed);

}  // namespace sentinel
