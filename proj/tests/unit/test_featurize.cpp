#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "sentinel/error.hpp"
#include "sentinel/featurize.hpp"

using namespace sentinel;
using Catch::Matchers::WithinAbs;

namespace {

std::size_t index_of(std::string_view name) {
    for (std::size_t i = 0; i < kNumericFeatureNames.size(); ++i) {
        if (kNumericFeatureNames[i] == name) {
            return i;
        }
    }
    FAIL("no feature " << name);
    return 0;
}

Profile fixture() {
    Profile p;
    p.id = "f";
    p.name = "Grace Brewster Hopper";
    p.location = "New York";
    // 40 words, counted by hand: eight five-word sentences.
    p.summary =
        "I build careful compilers daily. I teach young engineers often. I debug hard problems patiently. "
        "I write clear documentation always. I review peer code thoroughly. I measure system performance "
        "regularly. I mentor new hires gladly. I test every release carefully.";
    p.sections = {Section{SectionTag::Education, {"BA Mathematics Vassar", "PhD Yale"}},
                  Section{SectionTag::Experience, {"Rear Admiral US Navy", "Senior mathematician at Eckert",
                                                   "Consultant at DEC"}},
                  Section{SectionTag::Recommendations, {"Brilliant"}}};
    p.numeric = {{"connections", 200}, {"followers", 50}};
    return p;
}

// Closed-form eigendecomposition of a symmetric 2x2 matrix [[a, b], [b, c]].
struct Eigen2 {
    double l1, l2;                 // l1 >= l2
    std::array<double, 2> v1, v2;  // unit eigenvectors, sign: largest |entry| positive
};

std::array<double, 2> canonical(std::array<double, 2> v) {
    const double norm = std::hypot(v[0], v[1]);
    v[0] /= norm;
    v[1] /= norm;
    const double pivot = std::abs(v[0]) >= std::abs(v[1]) ? v[0] : v[1];
    if (pivot < 0) {
        v[0] = -v[0];
        v[1] = -v[1];
    }
    return v;
}

Eigen2 eig2(double a, double b, double c) {
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    Eigen2 out{mid + rad, mid - rad, {}, {}};
    auto vec = [&](double l) -> std::array<double, 2> {
        if (std::abs(b) > 1e-300) {
            return canonical({b, l - a});
        }
        return a >= c ? (l == out.l1 ? std::array<double, 2>{1, 0} : std::array<double, 2>{0, 1})
                      : (l == out.l1 ? std::array<double, 2>{0, 1} : std::array<double, 2>{1, 0});
    };
    out.v1 = vec(out.l1);
    out.v2 = vec(out.l2);
    return out;
}

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Matrix m(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            m(r, c) = normal(gen) * static_cast<double>(c + 1);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("canonical numeric feature order") {
    CHECK(kNumericFeatureNames.size() == 17);
    CHECK(kNumericFeatureNames[0] == "job_count");
    CHECK(kNumericFeatureNames[5] == "connections");
    CHECK(kNumericFeatureNames[16] == "has_summary_flag");
}

TEST_CASE("extract_numeric on a hand-checked fixture") {
    const auto f = extract_numeric(fixture());
    CHECK(f[index_of("job_count")] == 3);
    CHECK(f[index_of("education_count")] == 2);
    CHECK(f[index_of("skills_count")] == 0);
    CHECK(f[index_of("recommendations_count")] == 1);
    CHECK(f[index_of("followers")] == 50);
    CHECK(f[index_of("connections")] == 200);
    CHECK(f[index_of("summary_word_count")] == 40);
    CHECK(f[index_of("name_token_count")] == 3);
    CHECK(f[index_of("location_token_count")] == 2);
    // "Rear Admiral US Navy" 4 + "Senior mathematician at Eckert" 4 + "Consultant at DEC" 3.
    CHECK(f[index_of("total_experience_word_count")] == 11);
    CHECK(f[index_of("total_education_word_count")] == 5);
    CHECK_THAT(f[index_of("mean_words_per_job")], WithinAbs(11.0 / 3.0, 1e-15));
    CHECK_THAT(f[index_of("mean_words_per_education")], WithinAbs(2.5, 1e-15));
    CHECK_THAT(f[index_of("follower_connection_ratio")], WithinAbs(0.25, 1e-15));
    // education, experience, recommendations, summary, location, name.
    CHECK(f[index_of("sections_present_count")] == 6);
    CHECK(f[index_of("has_summary_flag")] == 1);
    CHECK(f[index_of("summary_char_count")] == static_cast<double>(fixture().summary.size()));
}

TEST_CASE("safe ratios are zero when the denominator is zero") {
    auto p = fixture();
    p.numeric["connections"] = 0;
    p.summary.clear();
    const auto f = extract_numeric(p);
    CHECK(f[index_of("follower_connection_ratio")] == 0);
    CHECK(f[index_of("has_summary_flag")] == 0);
    CHECK(f[index_of("summary_word_count")] == 0);
}

TEST_CASE("normalizer examples") {
    SECTION("column {0, 2} maps to {-1, +1}") {
        const auto m = Matrix::from_rows({{0.0}, {2.0}});
        const auto n = fit_normalizer(m);
        CHECK(n.apply(m.row(0)) == std::vector<double>{-1.0});
        CHECK(n.apply(m.row(1)) == std::vector<double>{1.0});
    }
    SECTION("constant column maps to zeros") {
        const auto m = Matrix::from_rows({{5.0, 1.0}, {5.0, 3.0}, {5.0, 8.0}});
        const auto n = fit_normalizer(m);
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(n.apply(m.row(r))[0] == 0.0);
        }
        CHECK(n.apply(m.row(1)) == n.apply(m.row(1)));
    }
    SECTION("empty training set is fatal") { CHECK_THROWS_AS(fit_normalizer(Matrix{}), Error); }
}

TEST_CASE("normalized training data has zero mean and unit variance") {
    const auto m = random_matrix(200, 6, 3);
    const auto n = fit_normalizer(m);
    for (std::size_t c = 0; c < 6; ++c) {
        double sum = 0.0;
        double sq = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double z = n.apply(m.row(r))[c];
            sum += z;
            sq += z * z;
        }
        CHECK_THAT(sum / 200.0, WithinAbs(0.0, 1e-8));
        CHECK_THAT(sq / 200.0, WithinAbs(1.0, 1e-8));
    }
}

TEST_CASE("PCA: points on y = 2x have one component with all the variance") {
    const auto m = Matrix::from_rows({{0, 0}, {1, 2}, {2, 4}, {-3, -6}});
    const auto pca = fit_pca(m, 2);
    CHECK_THAT(pca.explained_variance_ratio[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(pca.components[0][0], WithinAbs(1.0 / std::sqrt(5.0), 1e-12));
    CHECK_THAT(pca.components[0][1], WithinAbs(2.0 / std::sqrt(5.0), 1e-12));
}

TEST_CASE("PCA: three-point dataset matches the closed-form eigen oracle") {
    // Covariance of {(0,0),(1,0),(0,1)} with n - 1: [[1/3, -1/6], [-1/6, 1/3]].
    const auto m = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}});
    const auto pca = fit_pca(m, 2);
    const auto oracle = eig2(1.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0);
    REQUIRE(pca.output_dim() == 2);
    CHECK_THAT(pca.explained_variance[0], WithinAbs(oracle.l1, 1e-9));
    CHECK_THAT(pca.explained_variance[1], WithinAbs(oracle.l2, 1e-9));
    CHECK_THAT(pca.explained_variance_ratio[0], WithinAbs(0.75, 1e-9));
    // Both entries tie in magnitude, so compare up to sign.
    const double dot1 = pca.components[0][0] * oracle.v1[0] + pca.components[0][1] * oracle.v1[1];
    const double dot2 = pca.components[1][0] * oracle.v2[0] + pca.components[1][1] * oracle.v2[1];
    CHECK_THAT(std::abs(dot1), WithinAbs(1.0, 1e-9));
    CHECK_THAT(std::abs(dot2), WithinAbs(1.0, 1e-9));
}

TEST_CASE("PCA: random 2-D data matches the closed-form oracle including sign") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + gen() % 40;
        const double sx = 0.5 + 2.0 * std::abs(normal(gen));
        const double rho = std::tanh(normal(gen));
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = normal(gen);
            const double b = normal(gen);
            rows.push_back({sx * a + 3.0, rho * a + b - 1.0});
        }
        double mx = 0, my = 0;
        for (const auto& r : rows) {
            mx += r[0];
            my += r[1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        double sxx = 0, sxy = 0, syy = 0;
        for (const auto& r : rows) {
            sxx += (r[0] - mx) * (r[0] - mx);
            sxy += (r[0] - mx) * (r[1] - my);
            syy += (r[1] - my) * (r[1] - my);
        }
        const double denom = static_cast<double>(n - 1);
        const auto oracle = eig2(sxx / denom, sxy / denom, syy / denom);
        const auto pca = fit_pca(Matrix::from_rows(rows), 2);
        CHECK_THAT(pca.explained_variance[0], WithinAbs(oracle.l1, 1e-9));
        CHECK_THAT(pca.explained_variance[1], WithinAbs(oracle.l2, 1e-9));
        for (int c = 0; c < 2; ++c) {
            CHECK_THAT(pca.components[0][c], WithinAbs(oracle.v1[c], 1e-9));
            CHECK_THAT(pca.components[1][c], WithinAbs(oracle.v2[c], 1e-9));
        }
    }
}

TEST_CASE("PCA invariants on higher-dimensional data") {
    const auto m = random_matrix(60, 12, 8);
    const auto pca = fit_pca(m, 12);
    REQUIRE(pca.output_dim() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) {
            double dot = 0.0;
            for (std::size_t c = 0; c < 12; ++c) {
                dot += pca.components[i][c] * pca.components[j][c];
            }
            CHECK_THAT(dot, WithinAbs(i == j ? 1.0 : 0.0, 1e-8));
        }
    }
    double total = 0.0;
    for (const double r : pca.explained_variance_ratio) {
        CHECK(r >= 0.0);
        total += r;
    }
    CHECK(total <= 1.0 + 1e-8);
    const auto cumulative = pca.cumulative_ratio();
    for (std::size_t i = 1; i < cumulative.size(); ++i) {
        CHECK(cumulative[i] >= cumulative[i - 1]);
    }

    // Mean maps to the origin.
    for (const double v : pca.transform(pca.mean)) {
        CHECK_THAT(v, WithinAbs(0.0, 1e-8));
    }

    // Full basis reconstructs every training point.
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto z = pca.transform(m.row(r));
        for (std::size_t c = 0; c < 12; ++c) {
            double x = pca.mean[c];
            for (std::size_t k = 0; k < 12; ++k) {
                x += z[k] * pca.components[k][c];
            }
            CHECK_THAT(x, WithinAbs(m(r, c), 1e-8));
        }
    }
}

TEST_CASE("PCA clamps k and rejects degenerate input") {
    CHECK(fit_pca(random_matrix(5, 10, 1), 150).output_dim() == 4);
    CHECK(fit_pca(random_matrix(50, 3, 1), 150).output_dim() == 3);
    CHECK_THROWS_AS(fit_pca(random_matrix(1, 3, 1), 2), Error);
    CHECK_THROWS_AS(fit_pca(Matrix::from_rows({{1, 1}, {1, 1}, {1, 1}}), 1), Error);
}

TEST_CASE("variance curve CSV lists ratios and running totals") {
    const auto pca = fit_pca(Matrix::from_rows({{0, 0}, {1, 2}, {2, 4}, {-3, -6}}), 1);
    std::ostringstream out;
    write_variance_curve(out, pca);
    CHECK(out.str() == "component_index,ratio,cumulative\n1,1.000000,1.000000\n");
}

TEST_CASE("fuse concatenates text then numeric and slices back") {
    std::vector<double> text(150);
    std::vector<double> num(17);
    for (std::size_t i = 0; i < 150; ++i) text[i] = static_cast<double>(i);
    for (std::size_t i = 0; i < 17; ++i) num[i] = 1000.0 + static_cast<double>(i);

    const auto fused = fuse("p", text, num, Layout::Fused);
    REQUIRE(fused.values.size() == 167);
    CHECK(std::vector<double>(fused.values.begin(), fused.values.begin() + 150) == text);
    CHECK(std::vector<double>(fused.values.begin() + 150, fused.values.end()) == num);

    CHECK(fuse("p", text, num, Layout::NumericOnly).values == num);
    CHECK(fuse("p", text, num, Layout::TextOnly).values == text);
    CHECK_THROWS_AS(fuse("p", std::vector<double>(149), num, Layout::Fused), Error);
    CHECK_THROWS_AS(fuse("p", text, std::vector<double>(16), Layout::NumericOnly), Error);
}

TEST_CASE("layout names parse both spellings") {
    for (const auto layout : kAllLayouts) {
        CHECK(parse_layout(layout_name(layout)) == layout);
        CHECK(parse_layout(layout_label(layout)) == layout);
    }
    CHECK(layout_label(Layout::Fused) == "Fused167");
    CHECK_FALSE(parse_layout("both").has_value());
}

TEST_CASE("feature pipeline fits on the rows it is given") {
    const auto ste = random_matrix(40, 20, 5);
    std::vector<NumericFeatures> numeric(40);
    std::mt19937_64 gen(2);
    for (auto& row : numeric) {
        for (auto& v : row) {
            v = static_cast<double>(gen() % 100);
        }
    }
    const auto pipeline = fit_feature_pipeline(Layout::Fused, numeric, ste, 10);
    CHECK(pipeline.output_dim() == 27);
    const auto v = pipeline.transform("x", numeric[3], ste.row(3));
    REQUIRE(v.values.size() == 27);
    CHECK(std::vector<double>(v.values.begin(), v.values.begin() + 10) == pipeline.pca->transform(ste.row(3)));
    const auto z = pipeline.normalizer->apply(numeric[3]);
    CHECK(std::vector<double>(v.values.begin() + 10, v.values.end()) == z);

    const auto numeric_only = fit_feature_pipeline(Layout::NumericOnly, numeric, ste, 10);
    CHECK(numeric_only.output_dim() == 17);
    CHECK_FALSE(numeric_only.pca.has_value());
    const auto text_only = fit_feature_pipeline(Layout::TextOnly, numeric, ste, 10);
    CHECK(text_only.output_dim() == 10);
    CHECK_FALSE(text_only.normalizer.has_value());
}
