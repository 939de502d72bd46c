#include "mbp/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mbp/covering.hpp"
#include "mbp/errors.hpp"

namespace mbp {

namespace {

void require_sorted_positive(const std::vector<PricePoint>& pts) {
    if (pts.empty()) throw DomainError("pricing curve needs at least one breakpoint");
    double prev = 0.0;
    for (const auto& p : pts) {
        if (!(p.a > prev)) {
            throw DomainError("breakpoint parameters must be positive and strictly increasing");
        }
        prev = p.a;
    }
}

std::string pair_text(const PricePoint& lo, const PricePoint& hi) {
    return "(a=" + std::to_string(lo.a) + ", z=" + std::to_string(lo.z) + ") and (a=" +
           std::to_string(hi.a) + ", z=" + std::to_string(hi.z) + ")";
}

}  // namespace

PricingCurve PricingCurve::unchecked(std::vector<PricePoint> pts) {
    require_sorted_positive(pts);
    PricingCurve curve;
    curve.points_ = std::move(pts);
    return curve;
}

double PricingCurve::eval(double x) const {
    if (!(x > 0.0)) throw DomainError("price is defined for x > 0 only");
    const auto& pts = points_;
    if (x <= pts.front().a) {
        return pts.front().z / pts.front().a * x;
    }
    if (x >= pts.back().a) {
        return pts.back().z;
    }
    const auto hi = std::upper_bound(pts.begin(), pts.end(), x,
                                     [](double v, const PricePoint& p) { return v < p.a; });
    const std::size_t i = static_cast<std::size_t>(hi - pts.begin()) - 1;
    const double t = (x - pts[i].a) / (pts[i + 1].a - pts[i].a);
    return pts[i].z + t * (pts[i + 1].z - pts[i].z);
}

double PricingCurve::invert_price_upper(double budget, double x_cap) const {
    if (budget + kPriceTol >= points_.back().z) return x_cap;
    // First knot whose price exceeds the budget (knot prices are
    // nondecreasing on checked curves); the crossing lies on the segment
    // just before it.
    const double cutoff = budget + kPriceTol;
    const std::size_t i = static_cast<std::size_t>(
        std::upper_bound(points_.begin(), points_.end(), cutoff,
                         [](double v, const PricePoint& p) { return v < p.z; }) -
        points_.begin());
    double x;
    if (i == 0) {
        x = budget * points_[0].a / points_[0].z;  // origin-linear branch
    } else {
        const auto& lo = points_[i - 1];
        const auto& hi = points_[i];
        const double slope = (hi.z - lo.z) / (hi.a - lo.a);
        x = slope <= 0.0 ? hi.a : lo.a + (budget - lo.z) / slope;
    }
    return std::min(x, x_cap);
}

PricingCurve make_piecewise(std::vector<PricePoint> pts) {
    require_sorted_positive(pts);
    for (const auto& p : pts) {
        if (p.z < -kPriceTol) {
            throw InfeasiblePointsError("negative price at a=" + std::to_string(p.a));
        }
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& lo = pts[i];
        const auto& hi = pts[i + 1];
        if (hi.z < lo.z - kPriceTol) {
            throw InfeasiblePointsError("prices must be nondecreasing; violated by " +
                                        pair_text(lo, hi));
        }
        if (hi.z / hi.a > lo.z / lo.a + kPriceTol) {
            throw InfeasiblePointsError("price per unit must be nonincreasing; violated by " +
                                        pair_text(lo, hi));
        }
    }
    PricingCurve curve = PricingCurve::unchecked(std::move(pts));
    return curve;
}

ValidationReport validate(const PriceFn& price_fn, std::span<const double> grid) {
    if (grid.empty()) throw DomainError("validation grid must be nonempty");
    double prev = 0.0;
    for (double x : grid) {
        if (!(x > prev)) throw DomainError("validation grid must be strictly increasing");
        prev = x;
    }
    ValidationReport report;
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = price_fn(grid[i]);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (values[i] < -kPriceTol) {
            report.non_negative = false;
            report.witnesses.push_back({"non_negative", grid[i], grid[i], values[i], 0.0});
        }
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (values[i + 1] < values[i] - kPriceTol) {
            report.monotone = false;
            report.witnesses.push_back(
                {"monotone", grid[i], grid[i + 1], values[i], values[i + 1]});
        }
    }
    const double max_x = grid.back();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double sum = grid[i] + grid[j];
            if (sum > max_x) break;
            const double lhs = price_fn(sum);
            const double rhs = values[i] + values[j];
            if (lhs > rhs + kPriceTol) {
                report.subadditive = false;
                report.witnesses.push_back({"subadditive", grid[i], grid[j], lhs, rhs});
            }
        }
    }
    return report;
}

PricingCurve subadditive_envelope(const PriceFn& price_fn, std::span<const double> grid) {
    if (grid.empty()) throw DomainError("envelope grid must be nonempty");
    std::vector<PricePoint> pts;
    pts.reserve(grid.size());
    double min_ratio = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (double x : grid) {
        if (!(x > prev)) throw DomainError("envelope grid must be strictly increasing");
        prev = x;
        const double value = price_fn(x);
        if (value < 0.0) {
            throw DomainError("subadditive envelope requires nonnegative prices; got " +
                              std::to_string(value) + " at x=" + std::to_string(x));
        }
        min_ratio = std::min(min_ratio, value / x);
        pts.push_back({x, x * min_ratio});
    }
    return make_piecewise(std::move(pts));
}

bool interpolation_feasible(std::span<const PricePoint> pts, std::int64_t scale_cap) {
    if (pts.empty()) throw DomainError("interpolation needs at least one point");
    std::vector<double> params;
    std::vector<double> prices;
    params.reserve(pts.size());
    prices.reserve(pts.size());
    double prev = 0.0;
    for (const auto& p : pts) {
        if (!(p.a > prev)) {
            throw DomainError("interpolation points must have strictly increasing positive a");
        }
        if (!(p.z > 0.0)) throw DomainError("interpolation prices must be positive");
        prev = p.a;
        params.push_back(p.a);
        prices.push_back(p.z);
    }
    // A monotone interpolant forces nondecreasing prices.
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) {
        if (prices[i + 1] < prices[i] - kPriceTol) return false;
    }
    // The minimal subadditive extension of the points is the unbounded
    // covering cost; interpolation succeeds exactly when no combination
    // of points undercuts a point's own price.
    const ScaledIntegers scaled = rationalize(params, scale_cap);
    const auto costs = covering_costs(scaled.values, prices, scaled.values);
    for (std::size_t j = 0; j < prices.size(); ++j) {
        if (std::abs(costs[j] - prices[j]) > kPriceTol * std::max(1.0, prices[j])) {
            return false;
        }
    }
    return true;
}

namespace {

struct ErrorSpan {
    double x_lo;
    double x_hi;
};

ErrorSpan error_span(const ErrorCurve& errors) {
    if (errors.points.empty()) throw CurveInvalidError("error curve has no points");
    return {errors.points.front().x, errors.points.back().x};
}

QuoteResult quote_at(const PricingCurve& prices, const ErrorCurve& errors, double x) {
    return {1.0 / x, x, prices.eval(x), error_at(errors, x)};
}

}  // namespace

QuoteResult quote_by_error_budget(const PricingCurve& prices, const ErrorCurve& errors,
                                  double error_budget) {
    const auto span = error_span(errors);
    const auto fit = smoothed_errors(errors);
    double x_star;
    if (error_budget >= fit.front()) {
        x_star = span.x_lo;  // every version qualifies; cheapest wins
    } else {
        x_star = invert_error(errors, error_budget);
    }
    // Price is nondecreasing in x, so x_star is the arg min of the price.
    // If the price stays flat past x_star, hand the buyer the largest
    // such x: same price, better error.
    const double price = prices.eval(x_star);
    const double x_best = prices.invert_price_upper(price, span.x_hi);
    return quote_at(prices, errors, std::max(x_star, x_best));
}

QuoteResult quote_by_price_budget(const PricingCurve& prices, const ErrorCurve& errors,
                                  double price_budget) {
    const auto span = error_span(errors);
    const double min_price = prices.eval(span.x_lo);
    if (price_budget < min_price - kPriceTol) {
        throw BudgetTooLowError("price budget " + std::to_string(price_budget) +
                                    " is below the cheapest offered version (" +
                                    std::to_string(min_price) + ")",
                                min_price);
    }
    const double x_star = prices.invert_price_upper(price_budget, span.x_hi);
    return quote_at(prices, errors, std::max(x_star, span.x_lo));
}

QuoteResult quote_at_point(const PricingCurve& prices, const ErrorCurve& errors, double x) {
    const auto span = error_span(errors);
    if (x < span.x_lo || x > span.x_hi) {
        throw OutOfRangeError("x = " + std::to_string(x) + " outside the offered range [" +
                                  std::to_string(span.x_lo) + ", " + std::to_string(span.x_hi) +
                                  "]",
                              span.x_lo, span.x_hi);
    }
    return quote_at(prices, errors, x);
}

}  // namespace mbp
