#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mbp/pricing.hpp"

namespace mbp {

/// One market research point: buyers with valuation v and demand mass b
/// for the version at inverse noise level a.
struct MarketPoint {
    double a;
    double v;
    double b;
};

/// Points sorted by a ascending with nondecreasing valuations. The
/// revenue solvers require that shape and reject anything else; use
/// isotonize_valuations to repair deliberately.
struct MarketInstance {
    std::vector<MarketPoint> points;

    std::size_t size() const { return points.size(); }
};

/// Throws DomainError unless a is strictly increasing and positive,
/// v is nondecreasing, and all values are finite with v, b >= 0.
void check_market(const MarketInstance& market);

enum class Feasibility {
    relaxed_5,      // nonnegative, nondecreasing, z/a nonincreasing
    exact_3,        // exactly interpolatable by a subadditive monotone function
    unconstrained,  // satisfies neither set (some baselines)
};

struct PriceAssignment {
    std::vector<double> z;
    double objective = 0.0;
    Feasibility feasibility = Feasibility::relaxed_5;
};

/// Exact optimizer of the relaxed revenue problem: maximize
/// sum_j b_j z_j [z_j <= v_j] subject to z nonnegative, nondecreasing,
/// and z/a nonincreasing. Backward recursion over points and the n+1
/// price-slope thresholds; ties between selling at the valuation and
/// skipping a buyer go to the skip branch. O(n^2) time and space.
PriceAssignment optimize_dp(const MarketInstance& market);

/// Exhaustive reference for optimize_dp (n <= 8): enumerates prices from
/// the finite candidate set {v_i * a_j / a_i} per point under the same
/// constraints.
PriceAssignment oracle_relaxed(const MarketInstance& market);

/// Exact optimizer of the unrelaxed problem (n <= 12): enumerates active
/// subsets, prices actives at their valuations, and extends by the
/// minimal subadditive covering cost on the integer-rescaled grid.
PriceAssignment oracle_exact(const MarketInstance& market,
                             std::int64_t scale_cap = 1000000);

enum class InterpLoss { l2, l1 };

struct InterpOptions {
    double tol = 1e-8;
    std::size_t max_iter = 100000;
};

/// Fits prices to target values under the relaxed constraints.
/// l2 computes the Euclidean projection of the targets onto the
/// constraint cone (alternating projections with correction terms
/// between the monotone-nonnegative cone and the z/a-nonincreasing
/// cone); ConvergenceError if the iterates keep moving past max_iter.
/// l1 runs projected subgradient descent with step 1/sqrt(t) and
/// returns the best feasible iterate. The result is always feasible.
PriceAssignment solve_interpolation(std::span<const PricePoint> pts, InterpLoss loss,
                                    const InterpOptions& opts = {});

enum class BaselineKind { lin, max_c, med_c, opt_c };

/// Reference pricing policies: the line through the first and last
/// valuation (lin), the constant highest valuation (max_c), the largest
/// constant at least half the demand mass can afford (med_c), and the
/// revenue-best constant among the valuations (opt_c).
PriceAssignment baseline(BaselineKind kind, const MarketInstance& market);

/// sum_j b_j z_j [z_j <= v_j].
double revenue(const PriceAssignment& assignment, const MarketInstance& market);

/// Demand-mass fraction of buyers whose price does not exceed their
/// valuation.
double affordability(const PriceAssignment& assignment, const MarketInstance& market);

/// Repairs nondecreasing valuations by isotonic regression. Never
/// applied implicitly by the solvers.
MarketInstance isotonize_valuations(const MarketInstance& market);

/// The piecewise-linear curve through (a_j, z_j); requires a
/// relaxed-feasible assignment.
PricingCurve to_pricing_curve(const MarketInstance& market, const PriceAssignment& assignment);

}  // namespace mbp
