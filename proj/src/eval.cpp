#include "sentinel/eval.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sentinel/error.hpp"

namespace sentinel {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    tn += other.tn;
    return *this;
}

ConfusionCounts confusion(std::span<const double> p_fake, std::span<const int> truth, double threshold) {
    if (p_fake.size() != truth.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{} predictions but {} labels", p_fake.size(), truth.size()));
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < p_fake.size(); ++i) {
        const bool predicted_fake = p_fake[i] >= threshold;
        if (truth[i] == 1) {
            ++(predicted_fake ? c.tp : c.fn);
        } else {
            ++(predicted_fake ? c.fp : c.tn);
        }
    }
    return c;
}

std::optional<double> f1_score(const ConfusionCounts& c) {
    const std::size_t den = 2 * c.tp + c.fp + c.fn;
    if (den == 0) {
        return std::nullopt;
    }
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(den);
}

std::optional<double> false_accept_rate(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) {
        return std::nullopt;
    }
    return static_cast<double>(c.fn) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> false_reject_rate(const ConfusionCounts& c) {
    if (c.fp + c.tn == 0) {
        return std::nullopt;
    }
    return static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

MetricReport metrics(const ConfusionCounts& c, std::string subset) {
    MetricReport report;
    report.subset = std::move(subset);
    report.f1 = f1_score(c);
    report.far = false_accept_rate(c);
    report.frr = false_reject_rate(c);
    report.n = c.total();
    report.counts = c;
    return report;
}

double brier(std::span<const double> p_fake, std::span<const int> truth) {
    if (p_fake.empty()) {
        throw Error(ErrorCode::EmptySet, "Brier score of an empty prediction set");
    }
    if (p_fake.size() != truth.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{} predictions but {} labels", p_fake.size(), truth.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < p_fake.size(); ++i) {
        const double err = p_fake[i] - static_cast<double>(truth[i]);
        total += err * err;
    }
    return total / static_cast<double>(p_fake.size());
}

MetricReport evaluate(std::span<const double> p_fake, std::span<const int> truth, std::string subset,
                      double threshold) {
    if (p_fake.empty()) {
        throw Error(ErrorCode::EmptySet, "evaluation subset '" + subset + "' is empty");
    }
    MetricReport report = metrics(confusion(p_fake, truth, threshold), std::move(subset));
    report.brier = brier(p_fake, truth);
    return report;
}

std::size_t calibration_bin(double p, std::size_t bins) {
    const auto edge = [bins](std::size_t i) { return static_cast<double>(i) / static_cast<double>(bins); };
    if (p >= 1.0) {
        return bins - 1;
    }
    if (p <= 0.0) {
        return 0;
    }
    auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(bins)));
    idx = std::min(idx, bins - 1);
    // p * bins can round across an edge; settle against the exact edge values.
    if (idx > 0 && p < edge(idx)) {
        --idx;
    }
    if (idx + 1 < bins && p >= edge(idx + 1)) {
        ++idx;
    }
    return idx;
}

CalibrationCurve reliability(std::span<const double> p_fake, std::span<const int> truth, std::size_t bins) {
    if (bins < 2) {
        throw Error(ErrorCode::InvalidArgument, "reliability curve needs at least 2 bins");
    }
    if (p_fake.empty()) {
        throw Error(ErrorCode::EmptySet, "reliability curve of an empty prediction set");
    }
    if (p_fake.size() != truth.size()) {
        throw Error(ErrorCode::DimensionMismatch, "predictions and labels differ in length");
    }
    std::vector<double> sum_p(bins, 0.0);
    std::vector<double> sum_y(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    for (std::size_t i = 0; i < p_fake.size(); ++i) {
        const std::size_t b = calibration_bin(p_fake[i], bins);
        sum_p[b] += p_fake[i];
        sum_y[b] += static_cast<double>(truth[i]);
        ++count[b];
    }
    CalibrationCurve curve;
    curve.bin_count = bins;
    for (std::size_t b = 0; b < bins; ++b) {
        if (count[b] == 0) {
            continue;
        }
        const double n = static_cast<double>(count[b]);
        curve.bins.push_back(CalibrationBin{b, static_cast<double>(b) / static_cast<double>(bins),
                                            static_cast<double>(b + 1) / static_cast<double>(bins), sum_p[b] / n,
                                            sum_y[b] / n, count[b]});
    }
    return curve;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw Error(ErrorCode::DimensionMismatch, "pearson inputs differ in length");
    }
    if (xs.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "pearson needs at least 3 pairs");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        return std::nullopt;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace sentinel
