#include "mbp/mechanism.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "mbp/errors.hpp"
#include "mbp/isotonic.hpp"
#include "mbp/rng.hpp"

namespace mbp {

ModelInstance perturb(const ModelInstance& optimum, double delta, std::uint64_t seed) {
    if (delta < 0.0) throw DomainError("noise control parameter delta must be >= 0");
    ModelInstance noisy = optimum;
    if (delta == 0.0) return noisy;
    const std::size_t d = optimum.dim();
    if (d == 0) throw DomainError("cannot perturb an empty model");
    const double sd = std::sqrt(delta / static_cast<double>(d));
    NormalSampler normal(seed);
    for (auto& w : noisy.weights) w += sd * normal.next();
    return noisy;
}

namespace {

void validate_grid(std::span<const double> x_grid) {
    if (x_grid.empty()) throw DomainError("x grid must be nonempty");
    double prev = 0.0;
    for (double x : x_grid) {
        if (!(x > prev)) {
            throw DomainError("x grid must be strictly increasing and positive");
        }
        prev = x;
    }
}

ErrorCurvePoint estimate_point(const ModelInstance& optimum, const Dataset& eval_data,
                               const LossSpec& spec, double x, std::size_t samples,
                               std::uint64_t seed, std::size_t point_index) {
    const double delta = 1.0 / x;
    std::vector<double> errors(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto sub_seed = derive_seed(seed, point_index, i);
        const ModelInstance noisy = perturb(optimum, delta, sub_seed);
        try {
            errors[i] = loss_eval(noisy, eval_data, spec);
        } catch (const DomainError& e) {
            throw DomainError("error evaluation failed at grid point " +
                              std::to_string(point_index) + " (x = " + std::to_string(x) +
                              "): " + e.what());
        }
    }
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    var /= static_cast<double>(samples - 1);
    const double std_error = std::sqrt(var / static_cast<double>(samples));
    return {x, mean, std_error, samples};
}

}  // namespace

ErrorCurve estimate_error_curve(const ModelInstance& optimum, const Dataset& eval_data,
                                const LossSpec& spec, std::span<const double> x_grid,
                                std::size_t samples_per_point, std::uint64_t seed,
                                unsigned threads) {
    validate_grid(x_grid);
    if (samples_per_point < 2) {
        throw DomainError("samples_per_point must be >= 2 to estimate a standard error");
    }
    ErrorCurve curve;
    curve.epsilon_family = spec.family;
    curve.seed = seed;
    curve.points.resize(x_grid.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(x_grid.size()));

    // Each grid point is an independent task with its own derived seeds,
    // so any schedule produces the same curve.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t p = next.fetch_add(1);
            if (p >= x_grid.size()) return;
            try {
                curve.points[p] = estimate_point(optimum, eval_data, spec, x_grid[p],
                                                 samples_per_point, seed, p);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return curve;
}

std::vector<double> default_x_grid(double optimum_error, std::size_t count) {
    if (count < 2) throw DomainError("grid needs at least 2 points");
    const double center = optimum_error > 1e-12 ? 1.0 / optimum_error : 1.0;
    const double lo = center * 1e-2;
    const double hi = center * 1e2;
    std::vector<double> grid(count);
    const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(count - 1));
    double x = lo;
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = x;
        x *= ratio;
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> smoothed_errors(const ErrorCurve& curve) {
    std::vector<double> means;
    means.reserve(curve.points.size());
    for (const auto& p : curve.points) means.push_back(p.mean_error);
    return isotonic_decreasing(means);
}

namespace {

void validate_curve(const ErrorCurve& curve) {
    if (curve.points.empty()) throw CurveInvalidError("error curve has no points");
    double prev = 0.0;
    for (const auto& p : curve.points) {
        if (!(p.x > prev)) throw CurveInvalidError("error curve grid not strictly increasing");
        if (p.samples < 1) throw CurveInvalidError("error curve point without samples");
        prev = p.x;
    }
}

}  // namespace

double invert_error(const ErrorCurve& curve, double target_error) {
    validate_curve(curve);
    const auto fit = smoothed_errors(curve);
    const double e_max = fit.front();
    const double e_min = fit.back();
    if (!(e_max > e_min)) {
        throw CurveInvalidError("error curve is flat after isotonic smoothing; cannot invert");
    }
    if (target_error < e_min || target_error > e_max) {
        throw OutOfRangeError("target error " + std::to_string(target_error) +
                                  " outside achievable range [" + std::to_string(e_min) +
                                  ", " + std::to_string(e_max) + "]",
                              e_min, e_max);
    }
    // Walk toward larger x; flat runs resolve to their smallest x, which
    // is the cheapest version achieving the target.
    for (std::size_t i = 0; i < fit.size(); ++i) {
        if (fit[i] <= target_error) return curve.points[i].x;
        if (i + 1 < fit.size() && fit[i + 1] <= target_error && fit[i + 1] < fit[i]) {
            const double t = (fit[i] - target_error) / (fit[i] - fit[i + 1]);
            return curve.points[i].x + t * (curve.points[i + 1].x - curve.points[i].x);
        }
    }
    return curve.points.back().x;
}

double error_at(const ErrorCurve& curve, double x) {
    validate_curve(curve);
    const auto fit = smoothed_errors(curve);
    const auto& pts = curve.points;
    if (x <= pts.front().x) return fit.front();
    if (x >= pts.back().x) return fit.back();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (x <= pts[i + 1].x) {
            const double t = (x - pts[i].x) / (pts[i + 1].x - pts[i].x);
            return fit[i] + t * (fit[i + 1] - fit[i]);
        }
    }
    return fit.back();
}

}  // namespace mbp
