#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "sentinel/error.hpp"
#include "sentinel/learn.hpp"

namespace sentinel {

std::vector<std::size_t> KnnModel::neighbours(std::span<const double> x) const {
    const std::size_t n = points.rows();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = points.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double delta = row[c] - x[c];
            acc += delta * delta;
        }
        dist[r] = {acc, r};
    }
    const auto count = static_cast<std::size_t>(k);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(count), dist.end());
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = dist[i].second;
    }
    return out;
}

double KnnModel::predict_proba(std::span<const double> x) const {
    const auto nearest = neighbours(x);
    std::size_t fakes = 0;
    for (const auto idx : nearest) {
        fakes += labels[idx] == 1 ? 1 : 0;
    }
    return static_cast<double>(fakes) / static_cast<double>(nearest.size());
}

KnnModel train_knn(const Matrix& x, std::span<const int> y, int k) {
    if (x.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
    }
    if (k < 1 || static_cast<std::size_t>(k) > x.rows()) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("k = {} must lie in [1, {}]", k, x.rows()));
    }
    return KnnModel{x, std::vector<int>(y.begin(), y.end()), k};
}

}  // namespace sentinel
