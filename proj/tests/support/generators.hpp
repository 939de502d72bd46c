// Seeded random instances for the property tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mbp/dataset.hpp"
#include "mbp/pricing.hpp"
#include "mbp/revenue.hpp"
#include "mbp/rng.hpp"

namespace gen {

// Random market with integer strictly increasing a in [1, a_max],
// nondecreasing v in [1, 100], and b in (0, 1].
inline mbp::MarketInstance random_market(std::size_t n, int a_max, std::uint64_t seed) {
    mbp::SplitMix64 rng(mbp::derive_seed(seed, 101, n));
    std::vector<int> params;
    while (params.size() < n) {
        const int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(a_max)));
        if (std::find(params.begin(), params.end(), a) == params.end()) params.push_back(a);
    }
    std::sort(params.begin(), params.end());
    std::vector<double> values(n);
    for (auto& v : values) v = 1.0 + 99.0 * rng.uniform01();
    std::sort(values.begin(), values.end());
    mbp::MarketInstance market;
    for (std::size_t j = 0; j < n; ++j) {
        market.points.push_back({static_cast<double>(params[j]), values[j],
                                 0.01 + 0.99 * rng.uniform01()});
    }
    return market;
}

// Random point feasible for the relaxed constraints: per-unit prices
// drawn nonincreasing, then prices accumulated to stay nondecreasing.
inline std::vector<double> random_feasible_prices(std::span<const double> a,
                                                  std::uint64_t seed) {
    mbp::SplitMix64 rng(mbp::derive_seed(seed, 102, a.size()));
    const std::size_t n = a.size();
    std::vector<double> u(n);
    double level = 1.0 + 9.0 * rng.uniform01();
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = level;
        level *= 0.5 + 0.5 * rng.uniform01();  // decay keeps u nonincreasing
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = u[i] * a[i];
        if (i > 0 && z[i] < z[i - 1]) {
            z[i] = z[i - 1];                  // flat price keeps both chains valid
            u[i] = z[i] / a[i];
            if (u[i] > u[i - 1]) u[i] = u[i - 1];
        }
    }
    return z;
}

// Random monotone subadditive price function: nonnegative concave
// increasing of the form c + sum_k m_k * min(x, t_k).
inline mbp::PriceFn random_concave_price(double span_hi, std::uint64_t seed) {
    mbp::SplitMix64 rng(mbp::derive_seed(seed, 103, 0));
    const double c = 5.0 * rng.uniform01();
    struct Piece {
        double slope;
        double knee;
    };
    std::vector<Piece> pieces;
    const std::size_t count = 1 + rng.below(4);
    double slope = 1.0 + 4.0 * rng.uniform01();
    for (std::size_t k = 0; k < count; ++k) {
        pieces.push_back({slope, span_hi * rng.uniform01()});
        slope *= rng.uniform01();
    }
    return [c, pieces](double x) {
        double v = c;
        for (const auto& p : pieces) v += p.slope * std::min(x, p.knee);
        return v;
    };
}

}  // namespace gen
