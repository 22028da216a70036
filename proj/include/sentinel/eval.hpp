#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

// Positive class = fake. The false accept rate (a fake profile accepted as
// legitimate) is therefore fn / (tp + fn), and the false reject rate (a
// legitimate profile rejected as fake) is fp / (fp + tn).

struct Prediction {
    std::string profile_id;
    double p_fake = 0.0;

    bool is_fake(double threshold = 0.5) const { return p_fake >= threshold; }
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& other);
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// p_fake >= threshold counts as a fake prediction. truth: 1 = fake.
ConfusionCounts confusion(std::span<const double> p_fake, std::span<const int> truth, double threshold = 0.5);

// Undefined rates (empty denominators) are std::nullopt, never 0.
struct MetricReport {
    std::string subset;
    std::optional<double> f1;
    std::optional<double> far;
    std::optional<double> frr;
    std::optional<double> brier;
    std::size_t n = 0;
    ConfusionCounts counts;
};

std::optional<double> f1_score(const ConfusionCounts& c);
std::optional<double> false_accept_rate(const ConfusionCounts& c);
std::optional<double> false_reject_rate(const ConfusionCounts& c);

// F1/FAR/FRR from counts; brier is left unset.
MetricReport metrics(const ConfusionCounts& c, std::string subset = {});

// Mean squared error between p_fake and the 0/1 truth. Throws on empty input.
double brier(std::span<const double> p_fake, std::span<const int> truth);

// confusion + metrics + brier in one pass; empty input throws EmptySet.
MetricReport evaluate(std::span<const double> p_fake, std::span<const int> truth, std::string subset,
                      double threshold = 0.5);

struct CalibrationBin {
    std::size_t index = 0;
    double lo = 0.0;
    double hi = 0.0;
    double mean_p = 0.0;
    double emp_freq = 0.0;
    std::size_t count = 0;
};

struct CalibrationCurve {
    std::size_t bin_count = 10;
    std::vector<CalibrationBin> bins;  // empty bins omitted, index preserved
};

// Equal-width bins [lo, hi); the final bin is closed at 1.0.
std::size_t calibration_bin(double p, std::size_t bins);

CalibrationCurve reliability(std::span<const double> p_fake, std::span<const int> truth, std::size_t bins = 10);

// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace sentinel
