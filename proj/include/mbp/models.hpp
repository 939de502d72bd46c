#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mbp/dataset.hpp"

namespace mbp {

enum class ModelKind { linear, logistic, svm_l2 };

/// A trained (or perturbed) hypothesis: one weight per feature.
struct ModelInstance {
    std::vector<double> weights;
    ModelKind kind = ModelKind::linear;
    double mu = 0.0;  // regularization strength used at training time

    std::size_t dim() const { return weights.size(); }
};

enum class LossFamily { square, log_loss, hinge_l2, zero_one, square_to_optimal };

/// Which error to evaluate and how. square_to_optimal measures the
/// squared distance to `reference` and ignores the data entirely.
struct LossSpec {
    LossFamily family = LossFamily::square;
    double mu = 0.0;
    std::optional<ModelInstance> reference;
};

/// Example-averaged loss plus mu*||h||^2 where the family admits
/// regularization. Square averages with 1/(2n); log and hinge with 1/n.
/// zero_one is the misclassified fraction and takes no regularizer.
double loss_eval(const ModelInstance& h, const Dataset& data, const LossSpec& spec);

/// Analytic (sub)gradient of loss_eval w.r.t. the weights. zero_one has
/// none and throws DomainError.
std::vector<double> loss_gradient(const ModelInstance& h, const Dataset& data,
                                  const LossSpec& spec);

/// Exact ridge/least-squares fit via the normal equations
/// (X'X/n + 2 mu I) h = X'y/n. The returned weights have training
/// gradient norm <= 1e-8. A singular system with mu = 0 raises
/// IllPosedError suggesting mu > 0.
ModelInstance train_linear(const Dataset& train, double mu);

struct IterativeOptions {
    double tol = 1e-8;
    std::size_t max_iter = 10000;
};

/// (Sub)gradient descent with backtracking line search from h = 0 for the
/// logistic and L2-SVM losses. Stops when the gradient norm falls below
/// tol; otherwise raises ConvergenceError carrying the final norm.
/// hinge_l2 requires mu > 0.
ModelInstance train_iterative(const Dataset& train, LossFamily family, double mu,
                              const IterativeOptions& opts = {});

}  // namespace mbp
