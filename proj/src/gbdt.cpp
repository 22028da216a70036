#include <algorithm>
#include <cmath>
#include <numeric>

#include "sentinel/error.hpp"
#include "sentinel/learn.hpp"

namespace sentinel {

double sigmoid(double margin) {
    if (margin >= 0.0) {
        return 1.0 / (1.0 + std::exp(-margin));
    }
    const double e = std::exp(margin);
    return e / (1.0 + e);
}

double mean_log_loss(std::span<const double> p, std::span<const int> y) {
    constexpr double kClip = 1e-15;
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], kClip, 1.0 - kClip);
        total -= y[i] == 1 ? std::log(q) : std::log(1.0 - q);
    }
    return total / static_cast<double>(p.size());
}

void require_binary_training_set(const Matrix& x, std::span<const int> y) {
    if (x.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
    }
    if (x.rows() < 2) {
        throw Error(ErrorCode::EmptyInput, "training needs at least two samples");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (const int label : y) {
        if (label != 0 && label != 1) {
            throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
        }
        (label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw Error(ErrorCode::SingleClass, "training labels contain a single class");
    }
}

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda) {
    const double g = grad_left + grad_right;
    const double h = hess_left + hess_right;
    return 0.5 * (grad_left * grad_left / (hess_left + lambda) + grad_right * grad_right / (hess_right + lambda) -
                  g * g / (h + lambda));
}

double leaf_weight(double grad, double hess, double lambda) {
    return -grad / (hess + lambda);
}

bool gain_improves(double candidate, double incumbent) {
    return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

double split_threshold(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
}

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t node = 0;
    while (!nodes[node].is_leaf()) {
        const auto& n = nodes[node];
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return nodes[node].value;
}

int RegressionTree::depth() const {
    std::vector<int> depth_of(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].is_leaf()) {
            depth_of[static_cast<std::size_t>(nodes[i].left)] = depth_of[i] + 1;
            depth_of[static_cast<std::size_t>(nodes[i].right)] = depth_of[i] + 1;
            deepest = std::max(deepest, depth_of[i] + 1);
        }
    }
    return deepest;
}

double GbdtModel::predict_margin(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& tree : trees) {
        sum += tree.predict(x);
    }
    return base_score + params.learning_rate * sum;
}

double GbdtModel::predict_proba(std::span<const double> x) const {
    return sigmoid(predict_margin(x));
}

namespace {

// Column-sorted view of the training matrix, built once per model.
struct SortedColumns {
    std::size_t n = 0;
    std::vector<std::uint32_t> order;  // d blocks of n sample indices
    std::vector<double> values;        // matching feature values

    explicit SortedColumns(const Matrix& x) : n(x.rows()), order(x.rows() * x.cols()), values(order.size()) {
        std::vector<std::uint32_t> idx(n);
        for (std::size_t f = 0; f < x.cols(); ++f) {
            std::iota(idx.begin(), idx.end(), 0U);
            std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
            for (std::size_t r = 0; r < n; ++r) {
                order[f * n + r] = idx[r];
                values[f * n + r] = x(idx[r], f);
            }
        }
    }
};

struct NodeStats {
    double grad = 0.0;
    double hess = 0.0;
    std::size_t count = 0;
};

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    NodeStats left;
};

RegressionTree grow_tree(const Matrix& x, const SortedColumns& sorted, std::span<const double> grad,
                         std::span<const double> hess, const GbdtParams& params) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const double lambda = params.lambda_l2;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params.min_samples_leaf));

    RegressionTree tree;
    std::vector<NodeStats> stats(1);
    for (std::size_t i = 0; i < n; ++i) {
        stats[0].grad += grad[i];
        stats[0].hess += hess[i];
    }
    stats[0].count = n;
    tree.nodes.emplace_back();

    std::vector<int> node_of(n, 0);
    std::vector<int> frontier{0};

    for (int level = 0; level < params.max_depth && !frontier.empty(); ++level) {
        std::vector<int> slot_of(tree.nodes.size(), -1);
        for (std::size_t s = 0; s < frontier.size(); ++s) {
            slot_of[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
        }
        const std::size_t slots = frontier.size();
        std::vector<BestSplit> best(slots);
        std::vector<NodeStats> acc(slots);
        std::vector<double> last(slots);
        std::vector<char> seen(slots);

        for (std::size_t f = 0; f < d; ++f) {
            std::fill(acc.begin(), acc.end(), NodeStats{});
            std::fill(seen.begin(), seen.end(), 0);
            const std::uint32_t* order = sorted.order.data() + f * n;
            const double* values = sorted.values.data() + f * n;
            for (std::size_t r = 0; r < n; ++r) {
                const std::uint32_t i = order[r];
                const int slot = slot_of[static_cast<std::size_t>(node_of[i])];
                if (slot < 0) {
                    continue;
                }
                const auto s = static_cast<std::size_t>(slot);
                const double v = values[r];
                if (seen[s] && v > last[s]) {
                    const NodeStats& total = stats[static_cast<std::size_t>(frontier[s])];
                    const NodeStats& left = acc[s];
                    if (left.count >= min_leaf && total.count - left.count >= min_leaf) {
                        const double gain =
                            split_gain(left.grad, left.hess, total.grad - left.grad, total.hess - left.hess, lambda);
                        if (gain_improves(gain, best[s].gain)) {
                            best[s] = BestSplit{gain, static_cast<int>(f), split_threshold(last[s], v), left};
                        }
                    }
                }
                acc[s].grad += grad[i];
                acc[s].hess += hess[i];
                ++acc[s].count;
                last[s] = v;
                seen[s] = 1;
            }
        }

        std::vector<int> next;
        for (std::size_t s = 0; s < slots; ++s) {
            if (best[s].feature < 0) {
                continue;
            }
            const auto parent = static_cast<std::size_t>(frontier[s]);
            const NodeStats total = stats[parent];
            const NodeStats left = best[s].left;
            const NodeStats right{total.grad - left.grad, total.hess - left.hess, total.count - left.count};
            const int left_id = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            stats.push_back(left);
            stats.push_back(right);
            auto& node = tree.nodes[parent];
            node.feature = best[s].feature;
            node.threshold = best[s].threshold;
            node.left = left_id;
            node.right = left_id + 1;
            next.push_back(left_id);
            next.push_back(left_id + 1);
        }
        if (next.empty()) {
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
            if (!node.is_leaf()) {
                node_of[i] = x(i, static_cast<std::size_t>(node.feature)) < node.threshold ? node.left : node.right;
            }
        }
        frontier = std::move(next);
    }

    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        tree.nodes[id].value = leaf_weight(stats[id].grad, stats[id].hess, lambda);
    }
    return tree;
}

}  // namespace

GbdtModel train_gbdt(const Matrix& x, std::span<const int> y, const GbdtParams& params,
                     std::vector<double>* loss_history) {
    require_binary_training_set(x, y);
    if (params.n_trees < 0 || params.max_depth < 0 || params.learning_rate < 0.0 || params.lambda_l2 < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "boosting parameters must be non-negative");
    }
    const std::size_t n = x.rows();
    const double positive_rate =
        static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(n);

    GbdtModel model;
    model.params = params;
    model.base_score = std::log(positive_rate / (1.0 - positive_rate));

    std::vector<double> margin(n, model.base_score);
    std::vector<double> prob(n);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    const auto refresh = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = sigmoid(margin[i]);
        }
        if (loss_history) {
            loss_history->push_back(mean_log_loss(prob, y));
        }
    };
    refresh();
    if (params.n_trees == 0) {
        return model;
    }

    const SortedColumns sorted(x);
    for (int round = 0; round < params.n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = prob[i] - static_cast<double>(y[i]);
            hess[i] = prob[i] * (1.0 - prob[i]);
        }
        RegressionTree tree = grow_tree(x, sorted, grad, hess, params);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += params.learning_rate * tree.predict(x.row(i));
        }
        model.trees.push_back(std::move(tree));
        refresh();
    }
    return model;
}

}  // namespace sentinel
