#include <cmath>

#include "sentinel/error.hpp"
#include "sentinel/learn.hpp"

namespace sentinel {

double LogRegModel::predict_proba(std::span<const double> x) const {
    double margin = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        margin += weights[i] * x[i];
    }
    return sigmoid(margin);
}

double logreg_objective(const LogRegModel& model, const Matrix& x, std::span<const int> y) {
    std::vector<double> p(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        p[r] = model.predict_proba(x.row(r));
    }
    double penalty = 0.0;
    for (const double w : model.weights) {
        penalty += w * w;
    }
    return mean_log_loss(p, y) + 0.5 * model.l2 * penalty;
}

std::vector<double> logreg_gradient(const LogRegModel& model, const Matrix& x, std::span<const int> y) {
    const std::size_t d = model.weights.size();
    std::vector<double> grad(d + 1, 0.0);
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        const double residual = model.predict_proba(row) - static_cast<double>(y[r]);
        for (std::size_t i = 0; i < d; ++i) {
            grad[i] += residual * row[i] * inv_n;
        }
        grad[d] += residual * inv_n;
    }
    for (std::size_t i = 0; i < d; ++i) {
        grad[i] += model.l2 * model.weights[i];
    }
    return grad;
}

LogRegModel train_logreg(const Matrix& x, std::span<const int> y, const LogRegParams& params,
                         std::vector<double>* loss_history) {
    require_binary_training_set(x, y);
    if (params.epochs < 0 || params.learning_rate < 0.0 || params.l2 < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "logistic regression parameters must be non-negative");
    }
    LogRegModel model{std::vector<double>(x.cols(), 0.0), 0.0, params.l2};
    if (loss_history) {
        loss_history->push_back(logreg_objective(model, x, y));
    }
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const auto grad = logreg_gradient(model, x, y);
        for (std::size_t i = 0; i < model.weights.size(); ++i) {
            model.weights[i] -= params.learning_rate * grad[i];
        }
        model.bias -= params.learning_rate * grad.back();
        if (loss_history) {
            loss_history->push_back(logreg_objective(model, x, y));
        }
    }
    return model;
}

}  // namespace sentinel
