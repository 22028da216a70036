#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sentinel/embedding.hpp"
#include "sentinel/matrix.hpp"

// Independent reference computations for the acceptance checks. None of these
// call the library routine they are compared against.
namespace oracle {

// F = (1/N) * sum_j (E_j - Em(Tag_j)) by a direct loop.
std::vector<double> ste(const sentinel::SectionEmbeddingSet& set);

// Top eigenpair of a 2x2 symmetric covariance, closed form. The vector is
// unit length with its largest-magnitude entry positive.
struct Eig2 {
    std::array<double, 2> values;  // descending
    std::array<std::array<double, 2>, 2> vectors;
};
Eig2 covariance_eig2(const sentinel::Matrix& x);

// Exhaustive depth-1 regression stump on the first boosting round's
// logistic-loss gradients, starting from the log-odds of the positive rate.
struct Stump {
    int feature = -1;  // -1 when no split beats a zero gain
    double threshold = 0.0;
    double left = 0.0;
    double right = 0.0;
    double root = 0.0;  // leaf value when unsplit
};
Stump best_stump(const sentinel::Matrix& x, const std::vector<int>& y, double lambda, std::size_t min_leaf);

// Central finite-difference gradient of the L2-penalized mean log loss, with
// parameters laid out as weights followed by the bias.
std::vector<double> logreg_fd_gradient(const std::vector<double>& params, double l2, const sentinel::Matrix& x,
                                       const std::vector<int>& y, double h);

struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};
Counts count(const std::vector<double>& p, const std::vector<int>& y);

}  // namespace oracle
