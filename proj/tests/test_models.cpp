#include <doctest.h>

#include <cmath>
#include <vector>

#include "mbp/dataset.hpp"
#include "mbp/errors.hpp"
#include "mbp/models.hpp"
#include "mbp/rng.hpp"
#include "support/oracles.hpp"

namespace {

mbp::Dataset tiny_regression() {
    mbp::Dataset data;
    data.task = mbp::Task::regression;
    data.features = {2, 1, {1.0, 2.0}};
    data.targets = {2.0, 4.0};
    return data;
}

mbp::Dataset two_point_classification(double x0, double y0, double x1, double y1) {
    mbp::Dataset data;
    data.task = mbp::Task::classification;
    data.features = {2, 1, {x0, x1}};
    data.targets = {y0, y1};
    return data;
}

double grad_norm(const std::vector<double>& g) {
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("train_linear fits the exact line") {
    const auto model = mbp::train_linear(tiny_regression(), 0.0);
    CHECK(model.weights.size() == 1);
    CHECK(model.weights[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("train_linear with ridge matches the closed form and the oracle") {
    // (sum x^2 / n + 2 mu) w = sum xy / n with mu = 0.5: 3.5 w = 5.
    const auto data = tiny_regression();
    const auto model = mbp::train_linear(data, 0.5);
    CHECK(model.weights[0] == doctest::Approx(10.0 / 7.0).epsilon(1e-12));
    const auto oracle = oracles::normal_equations_gauss(data, 0.5);
    CHECK(std::abs(model.weights[0] - oracle[0]) <= 1e-10);
}

TEST_CASE("train_linear stationarity on random data") {
    const auto data = mbp::gen_simulated1(300, 8, 5);
    for (double mu : {0.0, 0.01, 1.0}) {
        const auto model = mbp::train_linear(data, mu);
        const auto g = mbp::loss_gradient(model, data, {mbp::LossFamily::square, mu, {}});
        CHECK(grad_norm(g) <= 1e-8);
        const auto oracle = oracles::normal_equations_gauss(data, mu);
        for (std::size_t c = 0; c < 8; ++c) {
            CHECK(model.weights[c] == doctest::Approx(oracle[c]).epsilon(1e-9));
        }
    }
}

TEST_CASE("rank-deficient least squares is rejected with advice") {
    mbp::Dataset data;
    data.task = mbp::Task::regression;
    data.features = {2, 3, {1.0, 2.0, 3.0, 1.0, 2.0, 3.0}};
    data.targets = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(mbp::train_linear(data, 0.0), doctest::Contains("mu > 0"),
                         mbp::IllPosedError);
    CHECK_NOTHROW(mbp::train_linear(data, 0.1));
}

TEST_CASE("symmetric logistic problem trains to zero weights") {
    const auto data = two_point_classification(1.0, 1.0, -1.0, 1.0);
    const auto model = mbp::train_iterative(data, mbp::LossFamily::log_loss, 0.0);
    CHECK(std::abs(model.weights[0]) <= 1e-8);
}

TEST_CASE("regularized logistic matches a dense grid search") {
    const auto data = two_point_classification(1.0, 1.0, -1.0, -1.0);
    const double mu = 0.1;
    const auto model = mbp::train_iterative(data, mbp::LossFamily::log_loss, mu, {1e-10, 50000});
    auto objective = [&](double w) {
        return std::log1p(std::exp(-w)) + mu * w * w;
    };
    const double w_star = oracles::grid_argmin(objective, -20.0, 20.0, 1e-4);
    CHECK(objective(model.weights[0]) <= objective(w_star) + 1e-4);
    CHECK(model.weights[0] == doctest::Approx(w_star).epsilon(1e-3));
}

TEST_CASE("hinge training lands on the regularized optimum") {
    // Smooth optimum at w = 1/(2 mu) inside the margin-active region.
    const auto data = two_point_classification(1.0, 1.0, -1.0, -1.0);
    const double mu = 0.6;
    const auto model = mbp::train_iterative(data, mbp::LossFamily::hinge_l2, mu, {1e-8, 50000});
    CHECK(model.weights[0] == doctest::Approx(1.0 / (2.0 * mu)).epsilon(1e-6));
}

TEST_CASE("hinge training requires positive mu") {
    const auto data = two_point_classification(1.0, 1.0, -1.0, -1.0);
    CHECK_THROWS_AS(mbp::train_iterative(data, mbp::LossFamily::hinge_l2, 0.0),
                    mbp::DomainError);
}

TEST_CASE("iteration cap raises ConvergenceError with the gradient norm") {
    mbp::Dataset data;
    data.task = mbp::Task::classification;
    data.features = {1, 1, {1.0}};
    data.targets = {1.0};
    try {
        mbp::train_iterative(data, mbp::LossFamily::log_loss, 0.01, {1e-12, 1});
        FAIL("expected ConvergenceError");
    } catch (const mbp::ConvergenceError& e) {
        CHECK(e.residual() > 1e-12);
    }
}

TEST_CASE("loss_eval basics") {
    const auto data = tiny_regression();
    mbp::ModelInstance fit{{2.0}, mbp::ModelKind::linear, 0.0};
    CHECK(mbp::loss_eval(fit, data, {mbp::LossFamily::square, 0.0, {}}) == 0.0);

    const auto labels = two_point_classification(1.0, 1.0, -2.0, -1.0);
    mbp::ModelInstance separator{{1.0}, mbp::ModelKind::logistic, 0.0};
    CHECK(mbp::loss_eval(separator, labels, {mbp::LossFamily::zero_one, 0.0, {}}) == 0.0);
    mbp::ModelInstance flipped{{-1.0}, mbp::ModelKind::logistic, 0.0};
    CHECK(mbp::loss_eval(flipped, labels, {mbp::LossFamily::zero_one, 0.0, {}}) == 1.0);

    mbp::LossSpec to_ref{mbp::LossFamily::square_to_optimal, 0.0, separator};
    CHECK(mbp::loss_eval(separator, labels, to_ref) == 0.0);
    CHECK(mbp::loss_eval(flipped, labels, to_ref) == doctest::Approx(4.0));
}

TEST_CASE("square_to_optimal without a reference is a domain error") {
    mbp::ModelInstance h{{1.0}, mbp::ModelKind::linear, 0.0};
    CHECK_THROWS_AS(mbp::loss_eval(h, tiny_regression(),
                                   {mbp::LossFamily::square_to_optimal, 0.0, {}}),
                    mbp::DomainError);
}

TEST_CASE("analytic gradients match central finite differences") {
    mbp::SplitMix64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.below(4);
        const bool logistic = trial % 2 == 0;
        const auto data = logistic ? mbp::gen_simulated2(40, d, 1000 + trial)
                                   : mbp::gen_simulated1(40, d, 1000 + trial);
        const mbp::LossSpec spec{
            logistic ? mbp::LossFamily::log_loss : mbp::LossFamily::square,
            0.05 * rng.uniform01(), {}};
        std::vector<double> w(d);
        for (auto& v : w) v = 2.0 * rng.uniform01() - 1.0;
        const mbp::ModelInstance h{w, mbp::ModelKind::linear, 0.0};

        const auto analytic = mbp::loss_gradient(h, data, spec);
        const auto numeric = oracles::fd_gradient(
            [&](const std::vector<double>& weights) {
                return mbp::loss_eval({weights, mbp::ModelKind::linear, 0.0}, data, spec);
            },
            w, 1e-5);
        for (std::size_t c = 0; c < d; ++c) {
            const double scale = std::max({1.0, std::abs(analytic[c]), std::abs(numeric[c])});
            CHECK(std::abs(analytic[c] - numeric[c]) / scale <= 1e-4);
        }
    }
}

TEST_CASE("square and log losses are midpoint convex") {
    mbp::SplitMix64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + rng.below(3);
        const bool logistic = trial % 2 == 0;
        const auto data = logistic ? mbp::gen_simulated2(30, d, 500 + trial)
                                   : mbp::gen_simulated1(30, d, 500 + trial);
        const mbp::LossSpec spec{
            logistic ? mbp::LossFamily::log_loss : mbp::LossFamily::square, 0.01, {}};
        std::vector<double> w1(d), w2(d), mid(d);
        for (std::size_t c = 0; c < d; ++c) {
            w1[c] = 4.0 * rng.uniform01() - 2.0;
            w2[c] = 4.0 * rng.uniform01() - 2.0;
            mid[c] = 0.5 * (w1[c] + w2[c]);
        }
        const double f1 = mbp::loss_eval({w1, mbp::ModelKind::linear, 0.0}, data, spec);
        const double f2 = mbp::loss_eval({w2, mbp::ModelKind::linear, 0.0}, data, spec);
        const double fm = mbp::loss_eval({mid, mbp::ModelKind::linear, 0.0}, data, spec);
        CHECK(fm <= 0.5 * (f1 + f2) + 1e-12);
    }
}

TEST_CASE("loss families check the dataset task") {
    const auto regression = tiny_regression();
    mbp::ModelInstance h{{1.0}, mbp::ModelKind::linear, 0.0};
    CHECK_THROWS_AS(mbp::loss_eval(h, regression, {mbp::LossFamily::log_loss, 0.0, {}}),
                    mbp::DomainError);
    CHECK_THROWS_AS(mbp::loss_eval(h, regression, {mbp::LossFamily::zero_one, 0.0, {}}),
                    mbp::DomainError);
}
