#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sentinel/matrix.hpp"

namespace sentinel {

// Labels are 0 (legitimate) / 1 (fake) throughout.

// ---------------------------------------------------------------------------
// Gradient-boosted trees, logistic loss, second-order leaf values, exact
// greedy split search.
// ---------------------------------------------------------------------------

struct GbdtParams {
    int n_trees = 200;
    double learning_rate = 0.1;
    int max_depth = 4;
    int min_samples_leaf = 1;
    double lambda_l2 = 1.0;

    friend bool operator==(const GbdtParams&, const GbdtParams&) = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Samples with x[feature] < threshold descend left.
struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const;
    int depth() const;
    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct GbdtModel {
    GbdtParams params;
    double base_score = 0.0;  // log-odds of the training positive rate
    std::vector<RegressionTree> trees;

    double predict_margin(std::span<const double> x) const;
    double predict_proba(std::span<const double> x) const;
    friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

// Structure score gain of splitting a node with totals (gl+gr, hl+hr).
double split_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda);
double leaf_weight(double grad, double hess, double lambda);

// Split ordering rule shared by training and the tests' exhaustive oracle: a
// candidate replaces the incumbent only if its gain is larger by more than a
// relative 1e-12, so among (near-)ties the lowest feature index and then the
// lowest threshold win. A split must beat the initial incumbent gain of 0.
bool gain_improves(double candidate, double incumbent);

// Threshold placed between two consecutive distinct sorted values lo < hi;
// always satisfies lo < t <= hi.
double split_threshold(double lo, double hi);

double sigmoid(double margin);

// Mean logistic loss of probabilities p against labels y.
double mean_log_loss(std::span<const double> p, std::span<const int> y);

// `loss_history`, when given, receives the training loss before the first
// round and after every round.
GbdtModel train_gbdt(const Matrix& x, std::span<const int> y, const GbdtParams& params,
                     std::vector<double>* loss_history = nullptr);

// ---------------------------------------------------------------------------
// Logistic regression, full-batch gradient descent from zero weights.
// ---------------------------------------------------------------------------

struct LogRegParams {
    double l2 = 1e-3;
    int epochs = 300;
    double learning_rate = 0.5;

    friend bool operator==(const LogRegParams&, const LogRegParams&) = default;
};

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    double l2 = 0.0;

    double predict_proba(std::span<const double> x) const;
    friend bool operator==(const LogRegModel&, const LogRegModel&) = default;
};

// Mean log loss plus (l2 / 2) * |w|^2; the bias is not penalized.
double logreg_objective(const LogRegModel& model, const Matrix& x, std::span<const int> y);
// Gradient of logreg_objective: weights first, bias last.
std::vector<double> logreg_gradient(const LogRegModel& model, const Matrix& x, std::span<const int> y);

LogRegModel train_logreg(const Matrix& x, std::span<const int> y, const LogRegParams& params,
                         std::vector<double>* loss_history = nullptr);

// ---------------------------------------------------------------------------
// k-nearest neighbours, Euclidean, distance ties broken by lower index.
// ---------------------------------------------------------------------------

struct KnnParams {
    int k = 5;
    friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct KnnModel {
    Matrix points;
    std::vector<int> labels;
    int k = 1;

    // Indices of the k nearest training points, nearest first.
    std::vector<std::size_t> neighbours(std::span<const double> x) const;
    double predict_proba(std::span<const double> x) const;
    friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

KnnModel train_knn(const Matrix& x, std::span<const int> y, int k);

// ---------------------------------------------------------------------------
// Classifier selection.
// ---------------------------------------------------------------------------

// GbdtAlt is a second boosted-tree configuration (deeper trees, stronger L2,
// lower learning rate) standing in for a second boosting library.
enum class ClassifierKind { Gbdt, GbdtAlt, LogReg, Knn };

inline constexpr std::array<ClassifierKind, 4> kAllClassifiers{ClassifierKind::Gbdt, ClassifierKind::GbdtAlt,
                                                               ClassifierKind::LogReg, ClassifierKind::Knn};

std::string_view classifier_name(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier(std::string_view text);

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::Gbdt;
    GbdtParams gbdt;
    LogRegParams logreg;
    KnnParams knn;

    friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

ClassifierConfig default_classifier_config(ClassifierKind kind);

using Classifier = std::variant<GbdtModel, LogRegModel, KnnModel>;

Classifier train_classifier(const ClassifierConfig& config, const Matrix& x, std::span<const int> y);
double predict_proba(const Classifier& classifier, std::span<const double> x);
std::vector<double> predict_proba(const Classifier& classifier, const Matrix& x);

// Throws SingleClass unless both labels occur; also validates shapes.
void require_binary_training_set(const Matrix& x, std::span<const int> y);

}  // namespace sentinel
