#include "mbp/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "mbp/covering.hpp"
#include "mbp/errors.hpp"
#include "mbp/isotonic.hpp"

namespace mbp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Branch : std::uint8_t { kCap = 0, kSell = 1, kSkip = 2 };

bool affordable(double price, double valuation) { return price <= valuation; }

double market_revenue(std::span<const double> z, const MarketInstance& market) {
    double total = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const auto& p = market.points[j];
        if (affordable(z[j], p.v)) total += p.b * z[j];
    }
    return total;
}

}  // namespace

void check_market(const MarketInstance& market) {
    if (market.points.empty()) throw DomainError("market instance has no points");
    double prev_a = 0.0;
    double prev_v = -kInf;
    for (const auto& p : market.points) {
        if (!std::isfinite(p.a) || !std::isfinite(p.v) || !std::isfinite(p.b)) {
            throw DomainError("market values must be finite");
        }
        if (!(p.a > prev_a)) {
            throw DomainError("market parameters must be positive and strictly increasing");
        }
        if (p.v < prev_v) {
            throw DomainError(
                "market valuations must be nondecreasing in a; "
                "apply isotonize_valuations explicitly to repair");
        }
        if (p.v < 0.0 || p.b < 0.0) {
            throw DomainError("valuations and demand masses must be nonnegative");
        }
        prev_a = p.a;
        prev_v = p.v;
    }
}

PriceAssignment optimize_dp(const MarketInstance& market) {
    check_market(market);
    const std::size_t n = market.size();
    const auto& pts = market.points;

    // Threshold set: each point's valuation slope plus +infinity. The
    // recursion only ever tightens the slope cap to one of these values,
    // which is what makes the table quadratic.
    std::vector<double> deltas(n + 1);
    for (std::size_t i = 0; i < n; ++i) deltas[i] = pts[i].v / pts[i].a;
    deltas[n] = kInf;

    // Value row updated in place: cell t reads only itself and the saved
    // ratio-column scalar. The branch table is left uninitialized and
    // written only where reconstruction can look: the threshold index at
    // row k is either n (+infinity) or the index of an earlier sold
    // point, so columns k..n-1 are never read back.
    std::vector<double> value(n + 1);
    std::unique_ptr<std::uint8_t[]> choice(new std::uint8_t[n * (n + 1)]);
    for (std::size_t t = 0; t <= n; ++t) {
        const double capped = std::min(pts[n - 1].v, deltas[t] * pts[n - 1].a);
        value[t] = pts[n - 1].b * capped;
    }
    for (std::size_t kk = n - 1; kk-- > 0;) {
        const std::size_t k = kk;  // 0-based point index, processed n-2 .. 0
        const double a_k = pts[k].a;
        const double v_k = pts[k].v;
        const double b_k = pts[k].b;
        const double sell = b_k * v_k + value[k];  // OPT(k+1, v_k / a_k)
        std::uint8_t* row = choice.get() + k * (n + 1);
        for (std::size_t t = 0; t <= n; ++t) {
            const double cap_price = deltas[t] * a_k;
            std::uint8_t branch;
            if (cap_price <= v_k) {
                value[t] = b_k * cap_price + value[t];
                branch = kCap;
            } else if (sell > value[t]) {
                value[t] = sell;
                branch = kSell;
            } else {
                branch = kSkip;
            }
            if (t < k || t == n) row[t] = branch;
        }
    }

    PriceAssignment out;
    out.feasibility = Feasibility::relaxed_5;
    out.objective = value[n];
    out.z.assign(n, 0.0);

    // Forward pass decides each branch; skipped points take their price
    // from the successor afterward so the slope chain stays tight.
    std::vector<bool> skipped(n, false);
    std::size_t t = n;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        switch (choice[k * (n + 1) + t]) {
            case kCap:
                out.z[k] = deltas[t] * pts[k].a;
                break;
            case kSell:
                out.z[k] = pts[k].v;
                t = k;
                break;
            case kSkip:
                skipped[k] = true;
                break;
        }
    }
    out.z[n - 1] = std::min(pts[n - 1].v, deltas[t] * pts[n - 1].a);
    for (std::size_t k = n - 1; k-- > 0;) {
        if (skipped[k]) out.z[k] = out.z[k + 1] * pts[k].a / pts[k + 1].a;
    }
    return out;
}

PriceAssignment oracle_relaxed(const MarketInstance& market) {
    check_market(market);
    const std::size_t n = market.size();
    if (n > 8) throw ResourceError("oracle_relaxed enumerates exhaustively; n <= 8 required");
    const auto& pts = market.points;

    // Optimal prices only arise as v_i scaled along the slope chain, so
    // this finite candidate set contains an optimum. The i == j entry is
    // the point's own valuation, kept exact rather than recomputed as
    // v_j * a_j / a_j (one spurious ulp there flips the affordability
    // indicator).
    std::vector<std::vector<double>> candidates(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            candidates[j].push_back(i == j ? pts[j].v
                                           : pts[i].v * pts[j].a / pts[i].a);
        }
        std::sort(candidates[j].begin(), candidates[j].end());
        candidates[j].erase(std::unique(candidates[j].begin(), candidates[j].end()),
                            candidates[j].end());
    }
    std::vector<double> suffix_value(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
        suffix_value[j] = suffix_value[j + 1] + pts[j].b * pts[j].v;
    }

    std::vector<double> z(n, 0.0), best_z;
    double best = -1.0;
    auto search = [&](auto&& self, std::size_t j, double value) -> void {
        if (value + suffix_value[j] <= best) return;
        if (j == n) {
            best = value;
            best_z = z;
            return;
        }
        for (double c : candidates[j]) {
            if (j > 0) {
                // Cross-multiplied comparisons: division noise on the
                // ratios would reject exact-chain candidates.
                if (c < z[j - 1] * (1.0 - 1e-12) - 1e-12) continue;
                if (c * pts[j - 1].a >
                    z[j - 1] * pts[j].a * (1.0 + 1e-12) + 1e-12) continue;
            }
            z[j] = c;
            const double gain = affordable(c, pts[j].v) ? pts[j].b * c : 0.0;
            self(self, j + 1, value + gain);
        }
    };
    search(search, 0, 0.0);

    PriceAssignment out;
    out.z = best_z;
    out.objective = best;
    out.feasibility = Feasibility::relaxed_5;
    return out;
}

PriceAssignment oracle_exact(const MarketInstance& market, std::int64_t scale_cap) {
    check_market(market);
    const std::size_t n = market.size();
    if (n > 12) throw ResourceError("oracle_exact enumerates 2^n subsets; n <= 12 required");
    const auto& pts = market.points;

    std::vector<double> params(n);
    for (std::size_t j = 0; j < n; ++j) params[j] = pts[j].a;
    const ScaledIntegers scaled = rationalize(params, scale_cap);

    PriceAssignment out;
    out.feasibility = Feasibility::exact_3;
    out.objective = -1.0;

    std::vector<std::int64_t> active_sizes;
    std::vector<double> active_prices;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        active_sizes.clear();
        active_prices.clear();
        for (std::size_t w = 0; w < n; ++w) {
            if (mask & (1u << w)) {
                active_sizes.push_back(scaled.values[w]);
                active_prices.push_back(pts[w].v);
            }
        }
        const auto prices = covering_costs(active_sizes, active_prices, scaled.values);
        bool monotone = true;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (prices[j + 1] < prices[j] - kPriceTol) {
                monotone = false;
                break;
            }
        }
        if (!monotone) continue;  // covering costs are monotone by construction
        const double value = market_revenue(prices, market);
        if (value > out.objective) {
            out.objective = value;
            out.z = prices;
        }
    }
    return out;
}

namespace {

// Exact projection onto {z : z nondecreasing, z >= 0}.
std::vector<double> project_monotone_nonneg(std::span<const double> y) {
    auto fit = isotonic_increasing(y);
    for (auto& v : fit) v = std::max(v, 0.0);
    return fit;
}

// Exact projection onto {z : z/a nonincreasing}: weighted isotonic fit
// of the per-unit prices with weights a^2.
std::vector<double> project_ratio(std::span<const double> y, std::span<const double> a) {
    const std::size_t n = y.size();
    std::vector<double> u(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = y[i] / a[i];
        w[i] = a[i] * a[i];
    }
    auto fit = isotonic_decreasing(u, w);
    for (std::size_t i = 0; i < n; ++i) fit[i] *= a[i];
    return fit;
}

bool relaxed_feasible(std::span<const double> z, std::span<const double> a, double tol) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] < -tol) return false;
        if (i + 1 < z.size()) {
            if (z[i + 1] < z[i] - tol) return false;
            if (z[i + 1] / a[i + 1] > z[i] / a[i] + tol) return false;
        }
    }
    return true;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

// Dykstra's scheme: converges to the Euclidean projection onto the
// intersection of the two cones. A short plain-alternation tail snaps
// the iterate into exact feasibility.
std::vector<double> project_relaxed_cone(std::span<const double> target,
                                         std::span<const double> a, double tol,
                                         std::size_t max_iter, double* residual_out) {
    const std::size_t n = target.size();
    std::vector<double> z(target.begin(), target.end());
    std::vector<double> p(n, 0.0), q(n, 0.0), shifted(n);
    double movement = kInf;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) shifted[i] = z[i] + p[i];
        const auto y = project_monotone_nonneg(shifted);
        for (std::size_t i = 0; i < n; ++i) p[i] = shifted[i] - y[i];
        for (std::size_t i = 0; i < n; ++i) shifted[i] = y[i] + q[i];
        const auto z_next = project_ratio(shifted, a);
        for (std::size_t i = 0; i < n; ++i) q[i] = shifted[i] - z_next[i];
        movement = max_abs_diff(z, z_next);
        z = z_next;
        if (movement <= tol) break;
    }
    if (residual_out) *residual_out = movement;
    if (movement > tol) return z;  // caller decides how to report
    for (int round = 0; round < 100 && !relaxed_feasible(z, a, 1e-12); ++round) {
        z = project_ratio(project_monotone_nonneg(z), a);
    }
    for (auto& v : z) v = std::max(v, 0.0);
    return z;
}

}  // namespace

PriceAssignment solve_interpolation(std::span<const PricePoint> pts, InterpLoss loss,
                                    const InterpOptions& opts) {
    const std::size_t n = pts.size();
    if (n == 0) throw DomainError("interpolation needs at least one point");
    std::vector<double> a(n), target(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(pts[i].a > prev)) {
            throw DomainError("interpolation points must have strictly increasing positive a");
        }
        if (pts[i].z < 0.0) throw DomainError("interpolation prices must be nonnegative");
        prev = pts[i].a;
        a[i] = pts[i].a;
        target[i] = pts[i].z;
    }

    PriceAssignment out;
    out.feasibility = Feasibility::relaxed_5;

    if (loss == InterpLoss::l2) {
        double residual = 0.0;
        out.z = project_relaxed_cone(target, a, opts.tol, opts.max_iter, &residual);
        if (residual > opts.tol) {
            throw ConvergenceError("cone projection still moving " + std::to_string(residual) +
                                       " after " + std::to_string(opts.max_iter) + " iterations",
                                   residual);
        }
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sq += (out.z[i] - target[i]) * (out.z[i] - target[i]);
        }
        out.objective = -sq;
        return out;
    }

    // l1: projected subgradient with diminishing steps; the best feasible
    // iterate is the answer (movement-based stopping has no guarantee for
    // this scheme, so running the full budget is normal).
    std::vector<double> z = project_relaxed_cone(target, a, opts.tol, opts.max_iter, nullptr);
    auto l1_value = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(v[i] - target[i]);
        return s;
    };
    std::vector<double> best = z;
    double best_value = l1_value(z);
    std::vector<double> stepped(n);
    for (std::size_t t = 1; t <= opts.max_iter; ++t) {
        const double step = 1.0 / std::sqrt(static_cast<double>(t));
        for (std::size_t i = 0; i < n; ++i) {
            const double g = z[i] > target[i] ? 1.0 : (z[i] < target[i] ? -1.0 : 0.0);
            stepped[i] = z[i] - step * g;
        }
        auto z_next = project_relaxed_cone(stepped, a, opts.tol, 1000, nullptr);
        const double value = l1_value(z_next);
        if (value < best_value && relaxed_feasible(z_next, a, 1e-9)) {
            best_value = value;
            best = z_next;
        }
        const double moved = max_abs_diff(z, z_next);
        z = std::move(z_next);
        if (moved <= opts.tol) break;
    }
    out.z = std::move(best);
    out.objective = -best_value;
    return out;
}

PriceAssignment baseline(BaselineKind kind, const MarketInstance& market) {
    check_market(market);
    const auto& pts = market.points;
    const std::size_t n = pts.size();
    PriceAssignment out;
    out.z.assign(n, 0.0);
    out.feasibility = Feasibility::relaxed_5;

    switch (kind) {
        case BaselineKind::lin: {
            const double slope =
                n == 1 ? 0.0 : (pts[n - 1].v - pts[0].v) / (pts[n - 1].a - pts[0].a);
            const double intercept = pts[0].v - slope * pts[0].a;
            for (std::size_t j = 0; j < n; ++j) {
                out.z[j] = pts[0].v + slope * (pts[j].a - pts[0].a);
            }
            if (intercept < -kPriceTol) out.feasibility = Feasibility::unconstrained;
            break;
        }
        case BaselineKind::max_c: {
            for (auto& z : out.z) z = pts[n - 1].v;
            break;
        }
        case BaselineKind::med_c: {
            double total = 0.0;
            for (const auto& p : pts) total += p.b;
            double best = pts[0].v;
            for (const auto& p : pts) {
                double mass = 0.0;
                for (const auto& q : pts) {
                    if (q.v >= p.v) mass += q.b;
                }
                if (mass >= total / 2.0 && p.v > best) best = p.v;
            }
            for (auto& z : out.z) z = best;
            break;
        }
        case BaselineKind::opt_c: {
            double best_value = -1.0;
            double best_price = 0.0;
            for (const auto& p : pts) {
                double mass = 0.0;
                for (const auto& q : pts) {
                    if (q.v >= p.v) mass += q.b;
                }
                const double value = p.v * mass;
                if (value > best_value) {
                    best_value = value;
                    best_price = p.v;
                }
            }
            for (auto& z : out.z) z = best_price;
            break;
        }
    }
    out.objective = market_revenue(out.z, market);
    return out;
}

double revenue(const PriceAssignment& assignment, const MarketInstance& market) {
    check_market(market);
    if (assignment.z.size() != market.size()) {
        throw DomainError("price vector length does not match the market");
    }
    return market_revenue(assignment.z, market);
}

double affordability(const PriceAssignment& assignment, const MarketInstance& market) {
    check_market(market);
    if (assignment.z.size() != market.size()) {
        throw DomainError("price vector length does not match the market");
    }
    double total = 0.0, served = 0.0;
    for (std::size_t j = 0; j < market.size(); ++j) {
        total += market.points[j].b;
        if (affordable(assignment.z[j], market.points[j].v)) served += market.points[j].b;
    }
    if (total <= 0.0) throw DomainError("affordability needs positive total demand mass");
    return served / total;
}

MarketInstance isotonize_valuations(const MarketInstance& market) {
    if (market.points.empty()) throw DomainError("market instance has no points");
    std::vector<double> v(market.size());
    for (std::size_t j = 0; j < market.size(); ++j) v[j] = market.points[j].v;
    const auto fit = isotonic_increasing(v);
    MarketInstance repaired = market;
    for (std::size_t j = 0; j < market.size(); ++j) repaired.points[j].v = fit[j];
    return repaired;
}

PricingCurve to_pricing_curve(const MarketInstance& market, const PriceAssignment& assignment) {
    if (assignment.z.size() != market.size()) {
        throw DomainError("price vector length does not match the market");
    }
    std::vector<PricePoint> pts(market.size());
    for (std::size_t j = 0; j < market.size(); ++j) {
        pts[j] = {market.points[j].a, assignment.z[j]};
    }
    return make_piecewise(std::move(pts));
}

}  // namespace mbp
