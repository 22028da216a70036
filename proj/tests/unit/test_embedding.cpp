#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "sentinel/embedding.hpp"
#include "sentinel/error.hpp"

using namespace sentinel;
using Catch::Matchers::WithinAbs;

namespace {

WordVectorTable table_from(const std::string& text) {
    std::istringstream in(text);
    return parse_word_vectors(in);
}

SectionEmbeddingSet make_set(const std::vector<std::vector<double>>& e, const std::vector<std::vector<double>>& em) {
    SectionEmbeddingSet set;
    set.profile_id = "p";
    set.encoder = "test";
    for (std::size_t j = 0; j < e.size(); ++j) {
        set.items.push_back({kAllTags[j % kAllTags.size()], e[j], em[j]});
    }
    return set;
}

// Direct evaluation of F = (1/N) sum_j (E_j - Em_j).
std::vector<double> ste_oracle(const std::vector<std::vector<double>>& e, const std::vector<std::vector<double>>& em) {
    std::vector<double> f(e.front().size(), 0.0);
    for (std::size_t j = 0; j < e.size(); ++j) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] += e[j][i] - em[j][i];
        }
    }
    for (auto& v : f) {
        v /= static_cast<double>(e.size());
    }
    return f;
}

}  // namespace

TEST_CASE("word vector table loads and rejects malformed input") {
    const auto table = table_from("king 1 2 3\nqueen 4 5 6\n");
    CHECK(table.dim() == 3);
    CHECK(table.size() == 2);
    CHECK(table.find("queen")[1] == 5.0);
    CHECK(table.find("jack").empty());

    try {
        table_from("king 1 2 3\nthe 0.1 0.2\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentVector);
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }

    try {
        table_from("");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyTable);
    }
}

TEST_CASE("duplicate tokens keep the last vector") {
    const auto table = table_from("a 1 1\nb 2 2\na 3 3\n");
    CHECK(table.size() == 2);
    CHECK(table.find("a")[0] == 3.0);
}

TEST_CASE("word vector table writes back identically") {
    const std::string text = "alpha 0.5 -1.25\nbeta 1e-07 3\n";
    const auto table = table_from(text);
    std::ostringstream out;
    write_word_vectors(out, table);
    const auto again = table_from(out.str());
    REQUIRE(again.tokens() == table.tokens());
    for (const auto& token : table.tokens()) {
        CHECK(std::vector<double>(again.find(token).begin(), again.find(token).end()) ==
              std::vector<double>(table.find(token).begin(), table.find(token).end()));
    }
}

TEST_CASE("embed_section examples") {
    const auto table = table_from("x 1 0\ny 0 1\nz 2 4\n");

    const auto single = embed_section("z", table);
    CHECK(single.values == std::vector<double>{2.0, 4.0});
    CHECK_FALSE(single.oov);

    const auto pair = embed_section("x y", table);
    CHECK(pair.values == std::vector<double>{0.5, 0.5});

    const auto oov = embed_section("nothing known here", table);
    CHECK(oov.oov);
    CHECK(oov.values == std::vector<double>{0.0, 0.0});

    const auto empty = embed_section("", table);
    CHECK(empty.oov);
}

TEST_CASE("embed_section counts occurrences, folds case and ignores punctuation") {
    const auto table = table_from("x 1 0\ny 0 1\n");
    // Oracle: x twice, y once -> (2/3, 1/3).
    const auto v = embed_section("X, x; y! unknown", table);
    REQUIRE(v.values.size() == 2);
    CHECK_THAT(v.values[0], WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(v.values[1], WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("embed_section is invariant to token order and whitespace") {
    const auto table = table_from("a 1 2\nb 3 -1\nc 0.5 0.25\n");
    const auto base = embed_section("a b c a", table);
    CHECK(embed_section("c  a\t\tb \n a", table).values == base.values);
}

TEST_CASE("ste_aggregate examples") {
    SECTION("E equals the tag embedding gives zero") {
        const auto f = ste_aggregate(make_set({{0.3, -0.7}}, {{0.3, -0.7}}));
        CHECK(f.values == std::vector<double>{0.0, 0.0});
    }
    SECTION("two sections by hand") {
        const auto f = ste_aggregate(make_set({{2, 0}, {0, 2}}, {{1, 0}, {0, 1}}));
        CHECK(f.values == std::vector<double>{0.5, 0.5});
    }
    SECTION("dimension mismatch is fatal") {
        CHECK_THROWS_AS(ste_aggregate(make_set({{1, 2}, {1, 2, 3}}, {{0, 0}, {0, 0, 0}})), Error);
    }
    SECTION("no sections is fatal") {
        SectionEmbeddingSet empty;
        CHECK_THROWS_AS(ste_aggregate(empty), Error);
    }
}

TEST_CASE("ste_aggregate matches the formula, is permutation invariant and linear") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 1 + gen() % 7;
        const std::size_t d = 1 + gen() % 12;
        std::vector<std::vector<double>> e(n, std::vector<double>(d));
        std::vector<std::vector<double>> em(n, std::vector<double>(d));
        std::vector<std::vector<double>> e2(n, std::vector<double>(d));
        std::vector<std::vector<double>> em2(n, std::vector<double>(d));
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < d; ++i) {
                e[j][i] = normal(gen);
                em[j][i] = normal(gen);
                e2[j][i] = normal(gen);
                em2[j][i] = normal(gen);
            }
        }
        const auto f = ste_aggregate(make_set(e, em)).values;
        const auto oracle = ste_oracle(e, em);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK_THAT(f[i], WithinAbs(oracle[i], 1e-12));
        }

        auto pe = e;
        auto pem = em;
        std::reverse(pe.begin(), pe.end());
        std::reverse(pem.begin(), pem.end());
        const auto permuted = ste_aggregate(make_set(pe, pem)).values;
        for (std::size_t i = 0; i < d; ++i) {
            CHECK_THAT(permuted[i], WithinAbs(f[i], 1e-12));
        }

        const double a = normal(gen);
        const double b = normal(gen);
        auto mix = e;
        auto mix_em = em;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < d; ++i) {
                mix[j][i] = a * e[j][i] + b * e2[j][i];
                mix_em[j][i] = a * em[j][i] + b * em2[j][i];
            }
        }
        const auto f2 = ste_aggregate(make_set(e2, em2)).values;
        const auto fmix = ste_aggregate(make_set(mix, mix_em)).values;
        for (std::size_t i = 0; i < d; ++i) {
            CHECK_THAT(fmix[i], WithinAbs(a * f[i] + b * f2[i], 1e-11));
        }
    }
}

TEST_CASE("embed_profile covers all present tags and matches a hand computation") {
    const auto table = table_from(
        "education 1 0\nexperience 0 1\nskills 1 1\nrecommendations 0 0\nsummary 2 0\nlocation 0 2\nname 1 -1\n"
        "mit 4 0\nengineer 0 4\nrust 2 2\nparis 3 3\nada 5 5\n");
    Profile p;
    p.id = "p1";
    p.name = "Ada";
    p.location = "Paris";
    p.sections = {Section{SectionTag::Education, {"MIT"}}, Section{SectionTag::Experience, {"Engineer"}},
                  Section{SectionTag::Skills, {"Rust"}}};
    const auto set = embed_profile(p, table);
    CHECK(set.encoder == kBuiltinEncoder);
    REQUIRE(set.items.size() == 5);  // education, experience, skills, location, name

    // E - Em per section: (3,0), (0,3), (1,1), (3,1), (4,6); mean = (11/5, 11/5).
    const auto f = ste_aggregate(set).values;
    CHECK_THAT(f[0], WithinAbs(11.0 / 5.0, 1e-12));
    CHECK_THAT(f[1], WithinAbs(11.0 / 5.0, 1e-12));
}

TEST_CASE("external embeddings ingest and reject bad records") {
    std::ostringstream lines;
    lines << R"({"profile_id":"a","encoder":"ext","sections":[{"tag":"education","e":[1,2,3],"em_tag":[0,0,0]},)"
          << R"({"tag":"skills","e":[1,1,1],"em_tag":[1,0,0]},{"tag":"name","e":[0,0,1],"em_tag":[0,0,0]}]})" << "\n";
    lines << R"({"profile_id":"b","encoder":"ext","sections":[{"tag":"education","e":[1,2],"em_tag":[0,0,0]}]})"
          << "\n";
    lines << R"({"profile_id":"c","encoder":"ext","sections":[{"tag":"education","e":[1,2,3]}]})" << "\n";
    lines << R"({"profile_id":"a","encoder":"ext","sections":[{"tag":"education","e":[1,2,3],"em_tag":[0,0,0]}]})"
          << "\n";
    std::istringstream in(lines.str());
    const auto ingest = parse_embeddings(in);
    REQUIRE(ingest.sets.size() == 1);
    CHECK(ingest.sets[0].items.size() == 3);
    CHECK(ingest.sets[0].dim() == 3);
    REQUIRE(ingest.rejections.size() == 3);
    CHECK(ingest.rejections[0].reason == RejectReason::MixedDimensions);
    CHECK(ingest.rejections[1].reason == RejectReason::MissingTagVector);
    CHECK(ingest.rejections[2].reason == RejectReason::DuplicateId);
}

TEST_CASE("written embeddings ingest back exactly") {
    const auto table = table_from("a 0.1 0.7\nb -0.3 1e-9\nname 1 0\nlocation 0 1\neducation 1 1\nexperience 2 1\n");
    Profile p;
    p.id = "q";
    p.name = "a b";
    p.location = "b";
    p.sections = {Section{SectionTag::Education, {"a"}}, Section{SectionTag::Experience, {"a b a"}}};
    const std::vector<SectionEmbeddingSet> sets{embed_profile(p, table)};
    std::stringstream buffer;
    write_embeddings(buffer, sets);
    const auto ingest = parse_embeddings(buffer);
    REQUIRE(ingest.sets.size() == 1);
    CHECK(ste_aggregate(ingest.sets[0]).values == ste_aggregate(sets[0]).values);
}
