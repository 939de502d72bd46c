#include "mbp/models.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "mbp/errors.hpp"

namespace mbp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

// log(1 + exp(t)) without overflow.
double softplus(double t) {
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void require_dim(const ModelInstance& h, const Dataset& data) {
    if (data.size() > 0 && h.dim() != data.dim()) {
        throw DomainError("model dimension " + std::to_string(h.dim()) +
                          " does not match data dimension " + std::to_string(data.dim()));
    }
}

void require_task(const Dataset& data, Task task, const char* family) {
    if (data.task != task) {
        throw DomainError(std::string(family) + " loss requires a " +
                          (task == Task::regression ? "regression" : "classification") +
                          " dataset");
    }
}

// Cholesky factorization of a symmetric positive definite matrix stored
// row-major; returns false when a pivot collapses (rank deficiency).
bool cholesky(std::vector<double>& m, std::size_t d) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, m[i * d + i]);
    const double floor = std::max(max_diag, 1.0) * 1e-13;
    for (std::size_t k = 0; k < d; ++k) {
        double pivot = m[k * d + k];
        for (std::size_t j = 0; j < k; ++j) pivot -= m[k * d + j] * m[k * d + j];
        if (pivot <= floor) return false;
        const double root = std::sqrt(pivot);
        m[k * d + k] = root;
        for (std::size_t i = k + 1; i < d; ++i) {
            double v = m[i * d + k];
            for (std::size_t j = 0; j < k; ++j) v -= m[i * d + j] * m[k * d + j];
            m[i * d + k] = v / root;
        }
    }
    return true;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t d,
                                   std::vector<double> rhs) {
    for (std::size_t i = 0; i < d; ++i) {
        double v = rhs[i];
        for (std::size_t j = 0; j < i; ++j) v -= l[i * d + j] * rhs[j];
        rhs[i] = v / l[i * d + i];
    }
    for (std::size_t ii = d; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double v = rhs[i];
        for (std::size_t j = i + 1; j < d; ++j) v -= l[j * d + i] * rhs[j];
        rhs[i] = v / l[i * d + i];
    }
    return rhs;
}

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

}  // namespace

double loss_eval(const ModelInstance& h, const Dataset& data, const LossSpec& spec) {
    const std::size_t n = data.size();
    const auto w = std::span<const double>(h.weights);
    switch (spec.family) {
        case LossFamily::square: {
            require_task(data, Task::regression, "square");
            require_dim(h, data);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = dot(w, data.features.row(i)) - data.targets[i];
                s += r * r;
            }
            return s / (2.0 * static_cast<double>(n)) + spec.mu * squared_norm(w);
        }
        case LossFamily::log_loss: {
            require_task(data, Task::classification, "log");
            require_dim(h, data);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += softplus(-data.targets[i] * dot(w, data.features.row(i)));
            }
            return s / static_cast<double>(n) + spec.mu * squared_norm(w);
        }
        case LossFamily::hinge_l2: {
            require_task(data, Task::classification, "hinge");
            require_dim(h, data);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += std::max(0.0, 1.0 - data.targets[i] * dot(w, data.features.row(i)));
            }
            return s / static_cast<double>(n) + spec.mu * squared_norm(w);
        }
        case LossFamily::zero_one: {
            require_task(data, Task::classification, "zero-one");
            require_dim(h, data);
            std::size_t wrong = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double pred = dot(w, data.features.row(i)) > 0.0 ? 1.0 : -1.0;
                if (pred != data.targets[i]) ++wrong;
            }
            return static_cast<double>(wrong) / static_cast<double>(n);
        }
        case LossFamily::square_to_optimal: {
            if (!spec.reference) {
                throw DomainError("square_to_optimal loss requires a reference model");
            }
            const auto& ref = spec.reference->weights;
            if (ref.size() != w.size()) {
                throw DomainError("reference model dimension mismatch");
            }
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double diff = w[i] - ref[i];
                s += diff * diff;
            }
            return s;
        }
    }
    throw DomainError("unknown loss family");
}

std::vector<double> loss_gradient(const ModelInstance& h, const Dataset& data,
                                  const LossSpec& spec) {
    const std::size_t n = data.size();
    const auto w = std::span<const double>(h.weights);
    const std::size_t d = w.size();
    std::vector<double> g(d, 0.0);
    switch (spec.family) {
        case LossFamily::square: {
            require_task(data, Task::regression, "square");
            require_dim(h, data);
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = data.features.row(i);
                const double r = dot(w, x) - data.targets[i];
                for (std::size_t c = 0; c < d; ++c) g[c] += r * x[c];
            }
            for (std::size_t c = 0; c < d; ++c) {
                g[c] = g[c] / static_cast<double>(n) + 2.0 * spec.mu * w[c];
            }
            return g;
        }
        case LossFamily::log_loss: {
            require_task(data, Task::classification, "log");
            require_dim(h, data);
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = data.features.row(i);
                const double y = data.targets[i];
                const double p = sigmoid(-y * dot(w, x));
                for (std::size_t c = 0; c < d; ++c) g[c] -= y * p * x[c];
            }
            for (std::size_t c = 0; c < d; ++c) {
                g[c] = g[c] / static_cast<double>(n) + 2.0 * spec.mu * w[c];
            }
            return g;
        }
        case LossFamily::hinge_l2: {
            require_task(data, Task::classification, "hinge");
            require_dim(h, data);
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = data.features.row(i);
                const double y = data.targets[i];
                if (1.0 - y * dot(w, x) > 0.0) {
                    for (std::size_t c = 0; c < d; ++c) g[c] -= y * x[c];
                }
            }
            for (std::size_t c = 0; c < d; ++c) {
                g[c] = g[c] / static_cast<double>(n) + 2.0 * spec.mu * w[c];
            }
            return g;
        }
        case LossFamily::square_to_optimal: {
            if (!spec.reference) {
                throw DomainError("square_to_optimal loss requires a reference model");
            }
            for (std::size_t c = 0; c < d; ++c) {
                g[c] = 2.0 * (w[c] - spec.reference->weights[c]);
            }
            return g;
        }
        case LossFamily::zero_one:
            throw DomainError("zero_one loss has no gradient");
    }
    throw DomainError("unknown loss family");
}

ModelInstance train_linear(const Dataset& train, double mu) {
    require_task(train, Task::regression, "square");
    if (mu < 0.0) throw DomainError("mu must be nonnegative");
    const std::size_t n = train.size();
    const std::size_t d = train.dim();
    if (n == 0) throw DomainError("training set is empty");

    // Gram system (X'X/n + 2 mu I) h = X'y/n.
    std::vector<double> gram(d * d, 0.0);
    std::vector<double> rhs(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = train.features.row(i);
        for (std::size_t r = 0; r < d; ++r) {
            rhs[r] += x[r] * train.targets[i];
            for (std::size_t c = 0; c <= r; ++c) gram[r * d + c] += x[r] * x[c];
        }
    }
    for (std::size_t r = 0; r < d; ++r) {
        rhs[r] /= static_cast<double>(n);
        for (std::size_t c = 0; c <= r; ++c) {
            gram[r * d + c] /= static_cast<double>(n);
            gram[c * d + r] = gram[r * d + c];
        }
        gram[r * d + r] += 2.0 * mu;
    }

    std::vector<double> factor = gram;
    if (!cholesky(factor, d)) {
        throw IllPosedError(
            "normal equations are singular; the data is rank deficient. "
            "Retry with regularization mu > 0.");
    }
    ModelInstance model;
    model.kind = ModelKind::linear;
    model.mu = mu;
    model.weights = cholesky_solve(factor, d, rhs);

    // One round of iterative refinement keeps the stationarity contract
    // even for poorly scaled inputs.
    const LossSpec spec{LossFamily::square, mu, std::nullopt};
    for (int pass = 0; pass < 3; ++pass) {
        const auto g = loss_gradient(model, train, spec);
        if (norm(g) <= 1e-8) return model;
        auto correction = cholesky_solve(factor, d, g);
        for (std::size_t c = 0; c < d; ++c) model.weights[c] -= 0.5 * correction[c];
    }
    const auto g = loss_gradient(model, train, spec);
    if (norm(g) > 1e-8) {
        throw IllPosedError("normal equations too ill-conditioned: gradient norm " +
                            std::to_string(norm(g)) + "; retry with larger mu");
    }
    return model;
}

ModelInstance train_iterative(const Dataset& train, LossFamily family, double mu,
                              const IterativeOptions& opts) {
    if (family != LossFamily::log_loss && family != LossFamily::hinge_l2) {
        throw DomainError("train_iterative supports only log and hinge_l2 losses");
    }
    require_task(train, Task::classification, family == LossFamily::log_loss ? "log" : "hinge");
    if (mu < 0.0) throw DomainError("mu must be nonnegative");
    if (family == LossFamily::hinge_l2 && mu <= 0.0) {
        throw DomainError("hinge_l2 training requires mu > 0");
    }

    ModelInstance model;
    model.kind = family == LossFamily::log_loss ? ModelKind::logistic : ModelKind::svm_l2;
    model.mu = mu;
    model.weights.assign(train.dim(), 0.0);

    const LossSpec spec{family, mu, std::nullopt};
    double objective = loss_eval(model, train, spec);
    double grad_norm = 0.0;
    double step = 1.0;
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        const auto g = loss_gradient(model, train, spec);
        grad_norm = norm(g);
        if (grad_norm <= opts.tol) return model;

        // Armijo backtracking along the negative (sub)gradient.
        step = std::min(step * 2.0, 1e6);
        ModelInstance candidate = model;
        while (true) {
            for (std::size_t c = 0; c < model.weights.size(); ++c) {
                candidate.weights[c] = model.weights[c] - step * g[c];
            }
            const double value = loss_eval(candidate, train, spec);
            if (value <= objective - 1e-4 * step * grad_norm * grad_norm || step < 1e-18) {
                model.weights = candidate.weights;
                objective = value;
                break;
            }
            step *= 0.5;
        }
    }
    throw ConvergenceError("gradient descent did not reach tol " + std::to_string(opts.tol) +
                               " within " + std::to_string(opts.max_iter) +
                               " iterations; final gradient norm " + std::to_string(grad_norm),
                           grad_norm);
}

}  // namespace mbp
