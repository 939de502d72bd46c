#pragma once

#include <span>
#include <vector>

namespace mbp {

/// Weighted least-squares isotonic fit (pool adjacent violators).
/// Empty weights mean unit weights. All weights must be positive.
std::vector<double> isotonic_increasing(std::span<const double> y,
                                        std::span<const double> w = {});

/// Nonincreasing counterpart.
std::vector<double> isotonic_decreasing(std::span<const double> y,
                                        std::span<const double> w = {});

}  // namespace mbp
