#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mbp/mechanism.hpp"

namespace mbp {

/// Slack applied to every pricing inequality check.
inline constexpr double kPriceTol = 1e-9;

struct PricePoint {
    double a;  // inverse noise control parameter
    double z;  // price
};

/// Piecewise-linear price function over inverse noise level: linear
/// through the origin below the first knot, linear between knots,
/// constant after the last knot.
class PricingCurve {
public:
    /// Construction without the feasibility checks; for inspecting
    /// foreign curves that may not be arbitrage-free.
    static PricingCurve unchecked(std::vector<PricePoint> pts);

    double eval(double x) const;
    const std::vector<PricePoint>& breakpoints() const { return points_; }

    /// Largest x <= x_cap whose price does not exceed budget (+kPriceTol).
    /// Assumes a nondecreasing curve.
    double invert_price_upper(double budget, double x_cap) const;

private:
    std::vector<PricePoint> points_;
};

/// Builds an arbitrage-free curve from knot prices. The knots must
/// satisfy the feasibility chain: a strictly increasing and positive,
/// z nonnegative and nondecreasing, z/a nonincreasing. A violation
/// raises InfeasiblePointsError naming the first offending pair.
PricingCurve make_piecewise(std::vector<PricePoint> pts);

struct ValidationWitness {
    std::string check;  // "non_negative" | "monotone" | "subadditive"
    double x;
    double y;
    double lhs;
    double rhs;
};

/// Grid evidence for well-behavedness; a clean pass certifies the grid
/// resolution only, not the whole positive axis.
struct ValidationReport {
    bool non_negative = true;
    bool monotone = true;
    bool subadditive = true;
    std::vector<ValidationWitness> witnesses;

    bool ok() const { return non_negative && monotone && subadditive; }
};

using PriceFn = std::function<double(double)>;

/// Checks non-negativity and monotonicity at the grid points and
/// subadditivity p(x+y) <= p(x) + p(y) for every grid pair whose sum
/// stays within the grid span. All violations are reported.
ValidationReport validate(const PriceFn& price_fn, std::span<const double> grid);

/// Subadditive repair q(x) = x * min_{y <= x} p(y)/y evaluated on the
/// grid. For a monotone subadditive input the result brackets the input
/// between p/2 and p at every grid point.
PricingCurve subadditive_envelope(const PriceFn& price_fn, std::span<const double> grid);

/// Decides whether a positive, monotone, subadditive function can
/// interpolate the given (a, price) points exactly. The points' a values
/// are rescaled to a common integer grid (ResourceError beyond
/// scale_cap); interpolation is possible iff prices are nondecreasing
/// and each price equals its unbounded covering cost.
bool interpolation_feasible(std::span<const PricePoint> pts, std::int64_t scale_cap);

struct QuoteResult {
    double delta;
    double x;
    double price;
    double expected_error;
};

/// Cheapest version with expected error <= error_budget. Among versions
/// of equal price the buyer gets the largest x (lowest error).
QuoteResult quote_by_error_budget(const PricingCurve& prices, const ErrorCurve& errors,
                                  double error_budget);

/// Most accurate version with price <= price_budget. A budget below the
/// cheapest version raises BudgetTooLowError carrying the minimum price.
QuoteResult quote_by_price_budget(const PricingCurve& prices, const ErrorCurve& errors,
                                  double price_budget);

/// Price and expected error of the version at a chosen x.
QuoteResult quote_at_point(const PricingCurve& prices, const ErrorCurve& errors, double x);

}  // namespace mbp
