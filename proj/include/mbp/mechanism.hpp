#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mbp/models.hpp"

namespace mbp {

/// Gaussian release: returns h + w with w ~ N(0, (delta/d) I_d).
/// delta is the total noise variance across all coordinates, so the
/// expected squared distance from h equals delta. delta = 0 returns h
/// unchanged; delta < 0 raises DomainError. Deterministic per seed.
ModelInstance perturb(const ModelInstance& optimum, double delta, std::uint64_t seed);

struct ErrorCurvePoint {
    double x;           // inverse noise control parameter, x = 1/delta
    double mean_error;  // Monte Carlo mean of the chosen error function
    double std_error;   // standard error of that mean
    std::size_t samples;
};

/// Empirical expected-error curve over a grid of inverse noise levels.
struct ErrorCurve {
    LossFamily epsilon_family = LossFamily::square;
    std::uint64_t seed = 0;
    std::vector<ErrorCurvePoint> points;
};

/// Monte Carlo estimate of E[eps(perturbed model)] at every x in the
/// grid (delta = 1/x). Sample i at grid point p is seeded by a
/// deterministic function of (seed, p, i), so the result is identical for
/// any thread count. threads = 0 picks the hardware concurrency.
ErrorCurve estimate_error_curve(const ModelInstance& optimum, const Dataset& eval_data,
                                const LossSpec& spec, std::span<const double> x_grid,
                                std::size_t samples_per_point, std::uint64_t seed,
                                unsigned threads = 0);

/// Geometric grid of `count` x values spanning four decades centered on
/// x0 = 1/optimum_error (x0 falls back to 1 when the optimum error is 0).
std::vector<double> default_x_grid(double optimum_error, std::size_t count = 16);

/// Nonincreasing isotonic fit of the curve's mean errors; this is the
/// view used for inversion and interpolation.
std::vector<double> smoothed_errors(const ErrorCurve& curve);

/// Error-inverse: the smallest x whose smoothed expected error is
/// <= target_error, by monotone piecewise-linear interpolation. Targets
/// outside the achievable error range raise OutOfRangeError carrying the
/// range; a curve that is flat after smoothing raises CurveInvalidError.
double invert_error(const ErrorCurve& curve, double target_error);

/// Smoothed expected error at x, clamped to the grid span.
double error_at(const ErrorCurve& curve, double x);

}  // namespace mbp
