#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mbp {

/// Positive rationals rescaled to a common integer grid:
/// xs[i] == values[i] / scale.
struct ScaledIntegers {
    std::vector<std::int64_t> values;
    std::int64_t scale = 1;
};

/// Finds the common denominator via continued fractions. Throws
/// ResourceError when the scaled values would exceed scale_cap (the
/// underlying decision problems are hard beyond desk scale) or when an
/// input is not recognizably rational.
ScaledIntegers rationalize(std::span<const double> xs, std::int64_t scale_cap);

/// Unbounded covering costs: for each target t, the minimum total price
/// of a multiset of items whose sizes sum to at least t. Sizes must be
/// positive integers, prices nonnegative. cost(t <= 0) = 0.
std::vector<double> covering_costs(std::span<const std::int64_t> sizes,
                                   std::span<const double> prices,
                                   std::span<const std::int64_t> targets);

}  // namespace mbp
