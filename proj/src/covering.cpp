#include "mbp/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mbp/errors.hpp"

namespace mbp {

namespace {

// Best rational approximation p/q with q <= q_max (continued fractions).
std::int64_t denominator_of(double x, std::int64_t q_max) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("rationalize requires positive finite values");
    }
    double frac = x;
    std::int64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // convergents
    for (int iter = 0; iter < 64; ++iter) {
        const double floor_part = std::floor(frac);
        if (floor_part > 9.0e15) break;
        const auto a = static_cast<std::int64_t>(floor_part);
        const __int128 p2_wide = static_cast<__int128>(a) * p0 + p1;
        const __int128 q2_wide = static_cast<__int128>(a) * q0 + q1;
        if (q2_wide > q_max || p2_wide > static_cast<__int128>(9e17)) break;
        const auto p2 = static_cast<std::int64_t>(p2_wide);
        const auto q2 = static_cast<std::int64_t>(q2_wide);
        p1 = p0; q1 = q0; p0 = p2; q0 = q2;
        if (q0 > 0 && std::abs(x - static_cast<double>(p0) / static_cast<double>(q0)) <=
                          1e-12 * std::max(1.0, x)) {
            return q0;
        }
        const double rem = frac - floor_part;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    if (q0 > 0 && std::abs(x - static_cast<double>(p0) / static_cast<double>(q0)) <=
                      1e-9 * std::max(1.0, x)) {
        return q0;
    }
    throw ResourceError("value " + std::to_string(x) +
                        " has no rational form within the scale cap");
}

}  // namespace

ScaledIntegers rationalize(std::span<const double> xs, std::int64_t scale_cap) {
    if (scale_cap < 1) throw DomainError("scale_cap must be positive");
    std::int64_t lcm = 1;
    for (double x : xs) {
        const std::int64_t q = denominator_of(x, scale_cap);
        const std::int64_t g = std::gcd(lcm, q);
        if (lcm / g > scale_cap / q) {
            throw ResourceError("common denominator exceeds scale cap " +
                                std::to_string(scale_cap));
        }
        lcm = lcm / g * q;
    }
    ScaledIntegers out;
    out.scale = lcm;
    out.values.reserve(xs.size());
    for (double x : xs) {
        const double scaled = x * static_cast<double>(lcm);
        const auto rounded = static_cast<std::int64_t>(std::llround(scaled));
        if (rounded < 1 || std::abs(scaled - static_cast<double>(rounded)) >
                               1e-6 * std::max(1.0, scaled)) {
            throw ResourceError("value " + std::to_string(x) +
                                " does not land on the integer grid at scale " +
                                std::to_string(lcm));
        }
        if (rounded > scale_cap) {
            throw ResourceError("scaled value " + std::to_string(rounded) +
                                " exceeds scale cap " + std::to_string(scale_cap));
        }
        out.values.push_back(rounded);
    }
    return out;
}

std::vector<double> covering_costs(std::span<const std::int64_t> sizes,
                                   std::span<const double> prices,
                                   std::span<const std::int64_t> targets) {
    if (sizes.size() != prices.size()) throw DomainError("covering: size/price mismatch");
    if (sizes.empty()) throw DomainError("covering: no items");
    std::int64_t max_target = 0;
    for (auto t : targets) max_target = std::max(max_target, t);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> cost(static_cast<std::size_t>(max_target) + 1, inf);
    cost[0] = 0.0;
    for (std::int64_t t = 1; t <= max_target; ++t) {
        double best = inf;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const std::int64_t rest = t - sizes[i];
            const double c = prices[i] + (rest > 0 ? cost[static_cast<std::size_t>(rest)] : 0.0);
            best = std::min(best, c);
        }
        cost[static_cast<std::size_t>(t)] = best;
    }
    std::vector<double> out;
    out.reserve(targets.size());
    for (auto t : targets) {
        out.push_back(t <= 0 ? 0.0 : cost[static_cast<std::size_t>(t)]);
    }
    return out;
}

}  // namespace mbp
