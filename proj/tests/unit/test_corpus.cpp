#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sentinel/corpus.hpp"
#include "sentinel/error.hpp"
#include "sentinel/text.hpp"

using namespace sentinel;
using nlohmann::json;

namespace {

json record(const std::string& id, const std::string& label = "LLP") {
    return json{{"id", id},
                {"label", label},
                {"name", "Ada Lovelace"},
                {"location", "London"},
                {"summary", "Analyst of engines."},
                {"sections",
                 {{"education", {"BSc Mathematics"}},
                  {"experience", {"Engineer at Babbage Co"}},
                  {"skills", {"analysis", "notation"}},
                  {"recommendations", json::array()}}},
                {"numeric", {{"connections", 120}, {"followers", 80}}}};
}

Profile as_profile(const CleanOutcome& outcome) {
    REQUIRE(std::holds_alternative<Profile>(outcome));
    return std::get<Profile>(outcome);
}

Rejection as_rejection(const CleanOutcome& outcome) {
    REQUIRE(std::holds_alternative<Rejection>(outcome));
    return std::get<Rejection>(outcome);
}

CorpusLoad parse_lines(const std::vector<json>& records) {
    std::stringstream in;
    for (const auto& r : records) {
        in << r.dump() << '\n';
    }
    return parse_corpus(in);
}

std::vector<Profile> synthetic_profiles(const std::map<Label, std::size_t>& counts) {
    std::vector<Profile> out;
    int serial = 0;
    for (const auto& [label, n] : counts) {
        for (std::size_t i = 0; i < n; ++i) {
            Profile p;
            p.id = "id" + std::to_string(serial++);
            p.label = label;
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("well-formed three-record file loads three profiles") {
    const auto load = parse_lines({record("a"), record("b", "FLP"), record("c", "GPT4P")});
    REQUIRE(load.profiles.size() == 3);
    CHECK(load.rejections.empty());
    CHECK(load.profiles[1].label == Label::FLP);
    CHECK(load.profiles[2].label == Label::GPT4P);
}

TEST_CASE("missing Education is rejected with a diagnostic naming it") {
    auto r = record("x");
    r["sections"].erase("education");
    const auto load = parse_lines({record("a"), r});
    REQUIRE(load.profiles.size() == 1);
    REQUIRE(load.rejections.size() == 1);
    CHECK(load.rejections[0].reason == RejectReason::MissingEssential);
    CHECK(load.rejections[0].detail.find("Education") != std::string::npos);
    CHECK(load.rejections[0].line == 2);
}

TEST_CASE("empty Location is a MissingEssential rejection") {
    auto r = record("x");
    r["location"] = "   ";
    CHECK(as_rejection(clean_profile(r)).reason == RejectReason::MissingEssential);
}

TEST_CASE("composite entries split on the documented delimiters") {
    auto r = record("x");
    r["sections"]["experience"] = {"A; B"};
    r["sections"]["skills"] = {"a|b|c"};
    r["sections"]["recommendations"] = {"first\nsecond"};
    const auto p = as_profile(clean_profile(r));
    CHECK(p.entries(SectionTag::Experience) == std::vector<std::string>{"A", "B"});
    CHECK(p.entries(SectionTag::Skills) == std::vector<std::string>{"a", "b", "c"});
    CHECK(p.entries(SectionTag::Recommendations) == std::vector<std::string>{"first", "second"});
}

TEST_CASE("control characters and whitespace runs are normalized") {
    auto r = record("x");
    r["name"] = "Ada\t  Lovelace\x01\x7f";
    const auto p = as_profile(clean_profile(r));
    CHECK(p.name == "Ada Lovelace");
    CHECK(text::normalize(" a \n\n b ") == "a b");
}

TEST_CASE("unknown section tag and label are rejected") {
    auto r = record("x");
    r["sections"]["hobbies"] = {"chess"};
    CHECK(as_rejection(clean_profile(r)).reason == RejectReason::UnknownTag);
    CHECK(as_rejection(clean_profile(record("y", "BOT"))).reason == RejectReason::UnknownLabel);
}

TEST_CASE("negative counts are rejected and missing counts default to zero") {
    auto r = record("x");
    r["numeric"]["followers"] = -3;
    CHECK(as_rejection(clean_profile(r)).reason == RejectReason::NegativeCount);

    auto bare = record("y");
    bare.erase("numeric");
    const auto p = as_profile(clean_profile(bare));
    CHECK(p.numeric_or("connections", -1) == 0);
    CHECK(p.numeric_or("followers", -1) == 0);
}

TEST_CASE("duplicate ids and unparseable lines land in the rejection ledger") {
    std::stringstream in;
    in << record("a").dump() << "\n{not json\n" << record("a").dump() << "\n";
    const auto load = parse_corpus(in);
    REQUIRE(load.profiles.size() == 1);
    REQUIRE(load.rejections.size() == 2);
    CHECK(load.rejections[0].reason == RejectReason::ParseError);
    CHECK(load.rejections[1].reason == RejectReason::DuplicateId);
    CHECK(load.rejections[1].id == "a");
}

TEST_CASE("serialize then load round-trips profiles") {
    auto messy = record("m");
    messy["sections"]["skills"] = {"x | y", "  z  "};
    const auto first = parse_lines({record("a"), messy, record("c", "GPT35P")});
    std::stringstream buffer;
    write_corpus(buffer, first.profiles);
    const auto second = parse_corpus(buffer);
    CHECK(second.rejections.empty());
    CHECK(second.profiles == first.profiles);
}

TEST_CASE("cleaning is idempotent") {
    auto messy = record("m");
    messy["summary"] = "  lots   of\tspace ";
    messy["sections"]["experience"] = {"A;B|C"};
    const auto once = as_profile(clean_profile(messy));
    const auto twice = as_profile(clean_profile(to_json(once)));
    CHECK(once == twice);
}

TEST_CASE("load_corpus reads from disk and fails loudly on a missing file") {
    const auto path = std::filesystem::temp_directory_path() / "sentinel_corpus_test.jsonl";
    {
        std::ofstream out(path);
        out << record("a").dump() << "\n" << record("b").dump() << "\n";
    }
    CHECK(load_corpus(path).profiles.size() == 2);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_corpus(path), Error);
}

TEST_CASE("stratified split gives exact full-scale counts") {
    const auto profiles = synthetic_profiles({{Label::LLP, 1800}, {Label::FLP, 600}});
    const std::map<Label, SplitCounts> counts{{Label::LLP, {1260, 540}}, {Label::FLP, {420, 180}}};
    const auto split = stratified_split(profiles, counts, 11);

    std::map<Label, std::size_t> train_by_class;
    std::map<Label, std::size_t> test_by_class;
    std::map<std::string, Label> label_of;
    for (const auto& p : profiles) {
        label_of[p.id] = p.label;
    }
    for (const auto& id : split.train) {
        ++train_by_class[label_of.at(id)];
    }
    for (const auto& id : split.test) {
        ++test_by_class[label_of.at(id)];
    }
    CHECK(train_by_class[Label::LLP] == 1260);
    CHECK(test_by_class[Label::LLP] == 540);
    CHECK(train_by_class[Label::FLP] == 420);
    CHECK(test_by_class[Label::FLP] == 180);

    std::set<std::string> train(split.train.begin(), split.train.end());
    for (const auto& id : split.test) {
        CHECK(train.count(id) == 0);
    }
}

TEST_CASE("stratified split is a pure function of its inputs") {
    const auto profiles = synthetic_profiles({{Label::LLP, 50}, {Label::GPT35P, 30}});
    const std::map<Label, SplitCounts> counts{{Label::LLP, {20, 10}}, {Label::GPT35P, {10, 5}}};
    const auto a = stratified_split(profiles, counts, 5);
    const auto b = stratified_split(profiles, counts, 5);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    const auto c = stratified_split(profiles, counts, 6);
    CHECK((c.train != a.train || c.test != a.test));

    // Input order does not matter.
    auto reversed = profiles;
    std::reverse(reversed.begin(), reversed.end());
    const auto d = stratified_split(reversed, counts, 5);
    CHECK(d.train == a.train);
    CHECK(d.test == a.test);
}

TEST_CASE("test ids do not depend on the train count") {
    const auto profiles = synthetic_profiles({{Label::LLP, 40}});
    const auto small = stratified_split(profiles, {{Label::LLP, {5, 10}}}, 3);
    const auto large = stratified_split(profiles, {{Label::LLP, {30, 10}}}, 3);
    CHECK(small.test == large.test);
}

TEST_CASE("insufficient class members is fatal and names the class") {
    const auto profiles = synthetic_profiles({{Label::LLP, 10}, {Label::FLP, 2}});
    try {
        stratified_split(profiles, {{Label::FLP, {2, 1}}}, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientClass);
        CHECK(std::string(e.what()).find("FLP") != std::string::npos);
    }
}
