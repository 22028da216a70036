#include "sentinel/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sentinel/error.hpp"
#include "sentinel/text.hpp"

namespace sentinel {

namespace {

double total_words(const std::vector<std::string>& entries) {
    double total = 0.0;
    for (const auto& entry : entries) {
        total += static_cast<double>(text::word_count(entry));
    }
    return total;
}

double safe_ratio(double num, double den) {
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

NumericFeatures extract_numeric(const Profile& profile) {
    const auto& jobs = profile.entries(SectionTag::Experience);
    const auto& education = profile.entries(SectionTag::Education);
    const double job_count = static_cast<double>(jobs.size());
    const double education_count = static_cast<double>(education.size());
    const double followers = static_cast<double>(profile.numeric_or("followers", 0));
    const double connections = static_cast<double>(profile.numeric_or("connections", 0));
    const double experience_words = total_words(jobs);
    const double education_words = total_words(education);

    return NumericFeatures{
        job_count,
        education_count,
        static_cast<double>(profile.entries(SectionTag::Skills).size()),
        static_cast<double>(profile.entries(SectionTag::Recommendations).size()),
        followers,
        connections,
        static_cast<double>(text::word_count(profile.summary)),
        static_cast<double>(text::codepoint_count(profile.summary)),
        static_cast<double>(text::word_count(profile.name)),
        static_cast<double>(text::word_count(profile.location)),
        experience_words,
        education_words,
        safe_ratio(experience_words, job_count),
        safe_ratio(education_words, education_count),
        safe_ratio(followers, connections),
        static_cast<double>(profile.tagged_texts().size()),
        profile.summary.empty() ? 0.0 : 1.0,
    };
}

std::vector<double> Normalizer::apply(std::span<const double> x) const {
    if (x.size() != mean.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("normalizer expects {} values, got {}", mean.size(), x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = stddev[i] <= kStdFloor ? 0.0 : (x[i] - mean[i]) / stddev[i];
    }
    return out;
}

Normalizer fit_normalizer(const Matrix& train) {
    if (train.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot fit a normalizer on zero rows");
    }
    const std::size_t n = train.rows();
    const std::size_t d = train.cols();
    Normalizer norm{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            norm.mean[c] += train(r, c);
        }
    }
    for (double& m : norm.mean) {
        m /= static_cast<double>(n);
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            const double delta = train(r, c) - norm.mean[c];
            norm.stddev[c] += delta * delta;
        }
    }
    for (double& s : norm.stddev) {
        s = std::max(std::sqrt(s / static_cast<double>(n)), kStdFloor);
    }
    return norm;
}

std::vector<double> PcaModel::transform(std::span<const double> x) const {
    if (x.size() != mean.size()) {
        throw Error(ErrorCode::DimensionMismatch, fmt::format("PCA expects {} values, got {}", mean.size(), x.size()));
    }
    std::vector<double> out(components.size(), 0.0);
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& axis = components[k];
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            acc += axis[i] * (x[i] - mean[i]);
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> PcaModel::cumulative_ratio() const {
    std::vector<double> out(explained_variance_ratio.size());
    double running = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        running += explained_variance_ratio[i];
        out[i] = running;
    }
    return out;
}

PcaModel fit_pca(const Matrix& train, std::size_t k) {
    const std::size_t n = train.rows();
    if (n < 2) {
        throw Error(ErrorCode::EmptyInput, "PCA needs at least two training rows");
    }
    const std::size_t d = train.cols();
    k = std::min({k, d, n - 1});
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "PCA needs at least one component");
    }

    Eigen::MatrixXd centered(n, d);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            centered(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = train(r, c);
        }
    }
    mean = centered.colwise().mean().transpose();
    centered.rowwise() -= mean.transpose();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::VectorXd& singular = svd.singularValues();
    const double total = singular.squaredNorm();
    if (!(total > 0.0)) {
        throw Error(ErrorCode::Degenerate, "PCA training data has zero variance");
    }

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);
    const Eigen::MatrixXd& v = svd.matrixV();
    for (std::size_t j = 0; j < k; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        std::vector<double> axis(v.col(col).data(), v.col(col).data() + d);
        std::size_t pivot = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::abs(axis[i]) > std::abs(axis[pivot])) {
                pivot = i;
            }
        }
        if (axis[pivot] < 0.0) {
            for (double& a : axis) {
                a = -a;
            }
        }
        const double s2 = singular(col) * singular(col);
        model.components.push_back(std::move(axis));
        model.explained_variance.push_back(s2 / static_cast<double>(n - 1));
        model.explained_variance_ratio.push_back(s2 / total);
    }
    return model;
}

void write_variance_curve(std::ostream& out, const PcaModel& pca) {
    out << "component_index,ratio,cumulative\n";
    const auto cumulative = pca.cumulative_ratio();
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        out << fmt::format("{},{:.6f},{:.6f}\n", i + 1, pca.explained_variance_ratio[i], cumulative[i]);
    }
}

std::string_view layout_name(Layout layout) {
    switch (layout) {
        case Layout::Fused: return "fused";
        case Layout::TextOnly: return "text";
        case Layout::NumericOnly: return "numeric";
    }
    return "?";
}

std::string_view layout_label(Layout layout) {
    switch (layout) {
        case Layout::Fused: return "Fused167";
        case Layout::TextOnly: return "TextOnly150";
        case Layout::NumericOnly: return "NumericOnly17";
    }
    return "?";
}

std::optional<Layout> parse_layout(std::string_view text) {
    for (const Layout layout : kAllLayouts) {
        if (text == layout_name(layout) || text == layout_label(layout)) {
            return layout;
        }
    }
    return std::nullopt;
}

FeatureVector fuse(std::string profile_id, std::span<const double> text_part, std::span<const double> numeric_part,
                   Layout layout, std::size_t text_dim) {
    FeatureVector fv{std::move(profile_id), {}, layout};
    const bool wants_text = layout != Layout::NumericOnly;
    const bool wants_numeric = layout != Layout::TextOnly;
    if (wants_text && text_part.size() != text_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("text part has {} values, layout expects {}", text_part.size(), text_dim));
    }
    if (wants_numeric && numeric_part.size() != kNumericFeatureCount) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("numeric part has {} values, layout expects {}", numeric_part.size(),
                                kNumericFeatureCount));
    }
    if (wants_text) {
        fv.values.insert(fv.values.end(), text_part.begin(), text_part.end());
    }
    if (wants_numeric) {
        fv.values.insert(fv.values.end(), numeric_part.begin(), numeric_part.end());
    }
    return fv;
}

std::size_t FeaturePipeline::output_dim() const {
    switch (layout) {
        case Layout::Fused: return text_dim() + kNumericFeatureCount;
        case Layout::TextOnly: return text_dim();
        case Layout::NumericOnly: return kNumericFeatureCount;
    }
    return 0;
}

FeatureVector FeaturePipeline::transform(const std::string& profile_id, const NumericFeatures& numeric,
                                         std::span<const double> ste) const {
    std::vector<double> text_part;
    std::vector<double> numeric_part;
    if (pca) {
        text_part = pca->transform(ste);
    }
    if (normalizer) {
        numeric_part = normalizer->apply(numeric);
    }
    return fuse(profile_id, text_part, numeric_part, layout, text_dim());
}

FeaturePipeline fit_feature_pipeline(Layout layout, std::span<const NumericFeatures> numeric, const Matrix& ste,
                                     std::size_t pca_components) {
    FeaturePipeline pipeline;
    pipeline.layout = layout;
    if (layout != Layout::TextOnly) {
        Matrix rows;
        for (const auto& row : numeric) {
            rows.append_row(row);
        }
        pipeline.normalizer = fit_normalizer(rows);
    }
    if (layout != Layout::NumericOnly) {
        pipeline.pca = fit_pca(ste, pca_components);
    }
    return pipeline;
}

}  // namespace sentinel
