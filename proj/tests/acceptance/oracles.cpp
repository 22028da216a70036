#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracle {

std::vector<double> ste(const sentinel::SectionEmbeddingSet& set) {
    const std::size_t d = set.items.front().e.size();
    std::vector<double> f(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double s = 0.0;
        for (const auto& item : set.items) s += item.e[k] - item.em_tag[k];
        f[k] = s / static_cast<double>(set.items.size());
    }
    return f;
}

Eig2 covariance_eig2(const sentinel::Matrix& x) {
    const auto n = static_cast<double>(x.rows());
    double mx = 0.0, my = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        mx += x(r, 0);
        my += x(r, 1);
    }
    mx /= n;
    my /= n;
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double u = x(r, 0) - mx;
        const double v = x(r, 1) - my;
        a += u * u;
        b += u * v;
        c += v * v;
    }
    a /= n - 1.0;
    b /= n - 1.0;
    c /= n - 1.0;
    const double mid = (a + c) / 2.0;
    const double rad = std::hypot((a - c) / 2.0, b);
    Eig2 out;
    out.values = {mid + rad, mid - rad};
    for (std::size_t i = 0; i < 2; ++i) {
        const double lambda = out.values[i];
        // Pick the better-conditioned of the two equivalent forms.
        std::array<double, 2> v = std::abs(a - lambda) > std::abs(c - lambda) ? std::array<double, 2>{b, lambda - a}
                                                                               : std::array<double, 2>{lambda - c, b};
        if (std::hypot(v[0], v[1]) == 0.0) v = i == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
        const double norm = std::hypot(v[0], v[1]);
        v = {v[0] / norm, v[1] / norm};
        const double big = std::abs(v[0]) >= std::abs(v[1]) ? v[0] : v[1];
        if (big < 0) v = {-v[0], -v[1]};
        out.vectors[i] = v;
    }
    return out;
}

Stump best_stump(const sentinel::Matrix& x, const std::vector<int>& y, double lambda, std::size_t min_leaf) {
    const std::size_t n = y.size();
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double p0 = pos / static_cast<double>(n);
    std::vector<double> g(n);
    std::vector<double> h(n, p0 * (1.0 - p0));
    for (std::size_t i = 0; i < n; ++i) g[i] = p0 - y[i];
    const auto score = [lambda](double gs, double hs) { return gs * gs / (hs + lambda); };
    const auto weight = [lambda](double gs, double hs) { return -gs / (hs + lambda); };

    double gt = 0.0, ht = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gt += g[i];
        ht += h[i];
    }
    Stump best;
    best.root = weight(gt, ht);
    double best_gain = 0.0;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::set<double> distinct;
        for (std::size_t i = 0; i < n; ++i) distinct.insert(x(i, f));
        const std::vector<double> values(distinct.begin(), distinct.end());
        for (std::size_t k = 1; k < values.size(); ++k) {
            const double lo = values[k - 1];
            const double hi = values[k];
            double t = lo + (hi - lo) / 2.0;
            if (!(t > lo)) t = hi;
            double gl = 0.0, hl = 0.0;
            std::size_t nl = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (x(i, f) < t) {
                    gl += g[i];
                    hl += h[i];
                    ++nl;
                }
            }
            if (nl < min_leaf || n - nl < min_leaf) continue;
            const double gr = gt - gl;
            const double hr = ht - hl;
            const double gain = 0.5 * (score(gl, hl) + score(gr, hr) - score(gt, ht));
            // Strictly better by a relative 1e-12; earlier (feature, threshold) wins ties.
            if (gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
                best_gain = gain;
                best.feature = static_cast<int>(f);
                best.threshold = t;
                best.left = weight(gl, hl);
                best.right = weight(gr, hr);
            }
        }
    }
    return best;
}

namespace {

double logreg_loss(const std::vector<double>& params, double l2, const sentinel::Matrix& x, const std::vector<int>& y) {
    const std::size_t d = x.cols();
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double z = params[d];
        for (std::size_t c = 0; c < d; ++c) z += params[c] * x(r, c);
        // log(1 + e^z) - y z, written stably.
        const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        total += softplus - y[r] * z;
    }
    double penalty = 0.0;
    for (std::size_t c = 0; c < d; ++c) penalty += params[c] * params[c];
    return total / static_cast<double>(x.rows()) + 0.5 * l2 * penalty;
}

}  // namespace

std::vector<double> logreg_fd_gradient(const std::vector<double>& params, double l2, const sentinel::Matrix& x,
                                       const std::vector<int>& y, double h) {
    std::vector<double> grad(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto up = params;
        auto down = params;
        up[k] += h;
        down[k] -= h;
        grad[k] = (logreg_loss(up, l2, x, y) - logreg_loss(down, l2, x, y)) / (2.0 * h);
    }
    return grad;
}

Counts count(const std::vector<double>& p, const std::vector<int>& y) {
    Counts c;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool fake = p[i] >= 0.5;
        if (y[i] == 1) {
            fake ? ++c.tp : ++c.fn;
        } else {
            fake ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

}  // namespace oracle
