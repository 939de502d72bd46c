// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// anything fails. Tolerances are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mbp/dataset.hpp"
#include "mbp/isotonic.hpp"
#include "mbp/mechanism.hpp"
#include "mbp/models.hpp"
#include "mbp/pricing.hpp"
#include "mbp/revenue.hpp"
#include "mbp/rng.hpp"
#include "support/generators.hpp"

namespace {

int failures = 0;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %s — %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

void run(int number, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& criterion) {
    try {
        const auto [pass, detail] = criterion();
        report(number, name, pass, detail);
    } catch (const std::exception& e) {
        report(number, name, false, std::string("exception: ") + e.what());
    }
}

double time_min(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        Stopwatch watch;
        fn();
        best = std::min(best, watch.seconds());
    }
    return best;
}

// Per-call seconds, amortized over batches: stable for calls in the
// microsecond range where single-call minima still jitter.
double time_batched(const std::function<void()>& fn, int batch, int rounds) {
    double best = 1e300;
    for (int r = 0; r < rounds; ++r) {
        Stopwatch watch;
        for (int b = 0; b < batch; ++b) fn();
        best = std::min(best, watch.seconds() / batch);
    }
    return best;
}

// --- criterion 1: square-loss calibration -------------------------------

std::pair<bool, std::string> calibration() {
    Stopwatch watch;
    const std::size_t samples = 10000;
    bool pass = true;
    double worst = 0.0;
    for (double delta : {0.1, 1.0, 10.0}) {
        for (std::size_t d : {std::size_t{1}, std::size_t{5}, std::size_t{20}}) {
            mbp::ModelInstance model;
            model.weights.assign(d, 0.5);
            double mean = 0.0;
            for (std::size_t i = 0; i < samples; ++i) {
                const auto noisy = mbp::perturb(model, delta, mbp::derive_seed(100, d, i));
                double sq = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = noisy.weights[c] - model.weights[c];
                    sq += diff * diff;
                }
                mean += sq;
            }
            mean /= static_cast<double>(samples);
            const double tol = 5.0 * delta * std::sqrt(2.0 / static_cast<double>(d)) /
                               std::sqrt(static_cast<double>(samples));
            worst = std::max(worst, std::abs(mean - delta) / tol);
            if (std::abs(mean - delta) > tol) pass = false;
        }
    }
    const double elapsed = watch.seconds();
    if (elapsed >= 10.0) pass = false;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "empirical E[error] = delta at 5 sigma for 9 (delta, d) pairs; worst "
                  "deviation %.2f of tolerance; %.1fs (< 10s)",
                  worst, elapsed);
    return {pass, detail};
}

// --- criterion 2: unbiased release --------------------------------------

std::pair<bool, std::string> unbiasedness() {
    const std::size_t d = 20;
    const std::size_t samples = 10000;
    const double delta = 2.0;
    const auto data = mbp::gen_simulated1(10000, d, 42);
    const auto model = mbp::train_linear(data, 0.0);
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto noisy = mbp::perturb(model, delta, mbp::derive_seed(200, 0, i));
        for (std::size_t c = 0; c < d; ++c) mean[c] += noisy.weights[c];
    }
    const double tol = 5.0 * std::sqrt(delta / (static_cast<double>(d) * samples));
    bool pass = true;
    double worst = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        mean[c] /= static_cast<double>(samples);
        worst = std::max(worst, std::abs(mean[c] - model.weights[c]));
        if (std::abs(mean[c] - model.weights[c]) > tol) pass = false;
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "coordinatewise mean of 1e4 releases within %.2e of the optimum "
                  "(worst %.2e)",
                  tol, worst);
    return {pass, detail};
}

// --- criterion 3: monotone error curves ---------------------------------

std::pair<bool, std::string> monotone_curves() {
    Stopwatch watch;
    const std::size_t n = 100000;
    const std::size_t samples = 2000;
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(0.01 * std::pow(10.0, i / 2.75));

    bool pass = true;
    std::string note;

    {
        const auto data = mbp::gen_simulated1(n, 20, 7);
        const auto parts = mbp::split(data, 0.75, 1);
        const auto model = mbp::train_linear(parts.train, 0.0);
        const mbp::LossSpec spec{mbp::LossFamily::square, 0.0, {}};
        const auto curve =
            mbp::estimate_error_curve(model, parts.test, spec, grid, samples, 11);
        const auto fit = mbp::smoothed_errors(curve);
        for (std::size_t i = 0; i < fit.size(); ++i) {
            if (std::abs(fit[i] - curve.points[i].mean_error) >
                2.0 * curve.points[i].std_error) {
                pass = false;
                note += " square-curve deviation at point " + std::to_string(i) + ";";
            }
        }
    }
    {
        const auto data = mbp::gen_simulated2(n, 20, 8);
        const auto parts = mbp::split(data, 0.75, 2);
        const auto model =
            mbp::train_iterative(parts.train, mbp::LossFamily::log_loss, 1e-4, {1e-4, 3000});
        const mbp::LossSpec log_spec{mbp::LossFamily::log_loss, 0.0, {}};
        const auto log_curve =
            mbp::estimate_error_curve(model, parts.test, log_spec, grid, samples, 12);
        const auto log_fit = mbp::smoothed_errors(log_curve);
        for (std::size_t i = 0; i < log_fit.size(); ++i) {
            if (std::abs(log_fit[i] - log_curve.points[i].mean_error) >
                2.0 * log_curve.points[i].std_error) {
                pass = false;
                note += " log-curve deviation at point " + std::to_string(i) + ";";
            }
        }

        const mbp::LossSpec zo_spec{mbp::LossFamily::zero_one, 0.0, {}};
        const auto zo_curve =
            mbp::estimate_error_curve(model, parts.test, zo_spec, grid, samples, 13);
        const auto zo_fit = mbp::smoothed_errors(zo_curve);
        for (std::size_t i = 0; i + 1 < zo_fit.size(); ++i) {
            if (zo_fit[i + 1] > zo_fit[i] + 1e-12) {
                pass = false;
                note += " zero-one fit not monotone;";
            }
        }
        // The smoothed zero-one curve must actually be invertible.
        const double mid = 0.5 * (zo_fit.front() + zo_fit.back());
        (void)mbp::invert_error(zo_curve, mid);
    }
    const double elapsed = watch.seconds();
    if (elapsed >= 120.0) {
        pass = false;
        note += " runtime over budget;";
    }
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "square/log curves monotone within 2 stderr, zero-one monotone after "
                  "smoothing, 2000 samples x 12 points;%s %.0fs (< 120s)",
                  note.empty() ? " clean;" : note.c_str(), elapsed);
    return {pass, detail};
}

// --- criterion 4: dynamic program exactness -----------------------------

std::pair<bool, std::string> dp_exactness() {
    mbp::MarketInstance fig5;
    fig5.points = {{1.0, 100.0, 0.25}, {2.0, 150.0, 0.25}, {3.0, 280.0, 0.25},
                   {4.0, 350.0, 0.25}};
    const auto dp_fig5 = mbp::optimize_dp(fig5);
    bool pass = std::abs(dp_fig5.objective - 193.75) <= 1e-9;

    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto market = gen::random_market(1 + trial % 6, 10, 40000 + trial);
        const auto dp = mbp::optimize_dp(market);
        const auto oracle = mbp::oracle_relaxed(market);
        if (std::abs(dp.objective - oracle.objective) > 1e-9) ++mismatches;
    }
    if (mismatches > 0) pass = false;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "worked example objective %.2f (expect 193.75); %d/1000 random "
                  "instances disagree with the exhaustive oracle",
                  dp_fig5.objective, mismatches);
    return {pass, detail};
}

// --- criterion 5: relaxation sandwich ------------------------------------

std::pair<bool, std::string> relaxation_sandwich() {
    mbp::MarketInstance fig5;
    fig5.points = {{1.0, 100.0, 0.25}, {2.0, 150.0, 0.25}, {3.0, 280.0, 0.25},
                   {4.0, 350.0, 0.25}};
    const double dp_value = mbp::optimize_dp(fig5).objective;
    const double exact_value = mbp::oracle_exact(fig5, 1000000).objective;
    bool pass = std::abs(exact_value - 200.0) <= 1e-9;
    if (!(dp_value >= 100.0 - 1e-9 && dp_value <= 200.0 + 1e-9)) pass = false;
    if (std::abs(dp_value / exact_value - 0.96875) > 1e-12) pass = false;

    int violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto market = gen::random_market(1 + trial % 8, 12, 90000 + trial);
        const double dp = mbp::optimize_dp(market).objective;
        const double exact = mbp::oracle_exact(market, 1000000).objective;
        if (dp < exact / 2.0 - 1e-9 || dp > exact + 1e-9) ++violations;
    }
    if (violations > 0) pass = false;
    char detail[180];
    std::snprintf(detail, sizeof(detail),
                  "worked example: relaxed %.2f vs exact %.2f (ratio %.3f); %d/200 random "
                  "instances violate C/2 <= DP <= C",
                  dp_value, exact_value, dp_value / exact_value, violations);
    return {pass, detail};
}

// --- criterion 6: envelope sandwich --------------------------------------

std::pair<bool, std::string> envelope_sandwich() {
    int violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto price = gen::random_concave_price(30.0, 60000 + trial);
        std::vector<double> grid;
        mbp::SplitMix64 rng(mbp::derive_seed(61, trial, 0));
        double x = 0.2 + rng.uniform01();
        for (int i = 0; i < 15; ++i) {
            grid.push_back(x);
            x *= 1.2 + 0.4 * rng.uniform01();
        }
        const auto q = mbp::subadditive_envelope(price, grid);
        for (double g : grid) {
            const double p = price(g);
            const double e = q.eval(g);
            if (e < p / 2.0 - 1e-9 || e > p + 1e-9) {
                ++violations;
                break;
            }
        }
    }
    char detail[120];
    std::snprintf(detail, sizeof(detail),
                  "p/2 <= envelope <= p pointwise on %d/200 random monotone subadditive "
                  "functions",
                  200 - violations);
    return {violations == 0, detail};
}

// --- criterion 7: emitted curves are well behaved -------------------------

std::pair<bool, std::string> emitted_curves_validate() {
    int dirty = 0;
    int curves = 0;
    mbp::SplitMix64 rng(71);
    auto random_grid = [&] {
        std::vector<double> grid;
        double x = 0.05 + 0.1 * rng.uniform01();
        while (grid.size() < 100) {
            grid.push_back(x);
            x *= 1.02 + 0.08 * rng.uniform01();
        }
        return grid;
    };
    for (int trial = 0; trial < 30; ++trial) {
        const auto market = gen::random_market(2 + trial % 7, 12, 70000 + trial);
        const auto check = [&](const mbp::PriceAssignment& assignment) {
            const auto curve = mbp::to_pricing_curve(market, assignment);
            const auto grid = random_grid();
            const auto report = mbp::validate([&](double v) { return curve.eval(v); }, grid);
            ++curves;
            if (!report.ok() || !report.witnesses.empty()) ++dirty;
        };
        check(mbp::optimize_dp(market));
        for (auto kind :
             {mbp::BaselineKind::max_c, mbp::BaselineKind::med_c, mbp::BaselineKind::opt_c}) {
            check(mbp::baseline(kind, market));
        }
        std::vector<mbp::PricePoint> targets;
        for (const auto& p : market.points) {
            targets.push_back({p.a, p.v * (0.5 + rng.uniform01())});
        }
        check(mbp::solve_interpolation(targets, mbp::InterpLoss::l2));
    }
    char detail[120];
    std::snprintf(detail, sizeof(detail),
                  "%d/%d optimizer/baseline/interpolation curves validate with zero "
                  "witnesses on 100-point grids",
                  curves - dirty, curves);
    return {dirty == 0, detail};
}

// --- criterion 8: baseline dominance --------------------------------------

std::pair<bool, std::string> baseline_dominance() {
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto market = gen::random_market(2 + trial % 7, 12, 80000 + trial);
        const double dp = mbp::optimize_dp(market).objective;
        for (auto kind :
             {mbp::BaselineKind::max_c, mbp::BaselineKind::med_c, mbp::BaselineKind::opt_c}) {
            if (dp < mbp::baseline(kind, market).objective - 1e-9) ++violations;
        }
        const auto lin = mbp::baseline(mbp::BaselineKind::lin, market);
        if (lin.feasibility == mbp::Feasibility::relaxed_5 && dp < lin.objective - 1e-9) {
            ++violations;
        }
    }

    mbp::MarketInstance convex;
    for (int j = 1; j <= 10; ++j) {
        convex.points.push_back({double(j), double(j) * j, 1.0});
    }
    const double dp_convex = mbp::optimize_dp(convex).objective;
    const double lin_convex = mbp::baseline(mbp::BaselineKind::lin, convex).objective;
    const double ratio = dp_convex / lin_convex;
    const bool pass = violations == 0 && ratio > 1.5;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "%d dominance violations on 100 random markets; convex-valuation market "
                  "gains %.2fx over the linear baseline (need > 1.5x)",
                  violations, ratio);
    return {pass, detail};
}

// --- criterion 9: runtime envelopes ---------------------------------------

std::pair<bool, std::string> runtime_envelopes() {
    const auto market_small = gen::random_market(200, 1000000, 5);
    const auto market_big = gen::random_market(2000, 1000000, 5);
    const double t_small =
        time_batched([&] { (void)mbp::optimize_dp(market_small); }, 50, 6);
    const double t_big = time_batched([&] { (void)mbp::optimize_dp(market_big); }, 4, 4);
    const double dp_ratio = t_big / t_small;

    mbp::MarketInstance m8, m12;
    {
        mbp::SplitMix64 rng(91);
        std::vector<double> v8(8), v12(12);
        for (auto& v : v8) v = 1.0 + 99.0 * rng.uniform01();
        for (auto& v : v12) v = 1.0 + 99.0 * rng.uniform01();
        std::sort(v8.begin(), v8.end());
        std::sort(v12.begin(), v12.end());
        for (int j = 0; j < 8; ++j) m8.points.push_back({double(j + 1), v8[j], 1.0});
        for (int j = 0; j < 12; ++j) m12.points.push_back({double(j + 1), v12[j], 1.0});
    }
    const double t8 = time_batched([&] { (void)mbp::oracle_exact(m8, 1000000); }, 50, 6);
    const double t12 = time_batched([&] { (void)mbp::oracle_exact(m12, 1000000); }, 10, 4);
    const double exact_ratio = t12 / t8;
    const double exact_floor = std::pow(2.0, (12.0 - 8.0) / 2.0);

    const bool pass = t_big < 5.0 && dp_ratio <= 100.0 && exact_ratio > exact_floor;
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "DP: %.3fs at n=2000 (< 5s), scaling %.1fx from n=200 (<= 100x); exact "
                  "oracle: %.4fs at n=12, growth %.1fx from n=8 (> %.0fx)",
                  t_big, dp_ratio, t12, exact_ratio, exact_floor);
    return {pass, detail};
}

// --- criterion 10: interpolation projection --------------------------------

std::pair<bool, std::string> interpolation_projection() {
    bool pass = true;
    std::string note;

    const auto proj = mbp::solve_interpolation(
        std::vector<mbp::PricePoint>{{1.0, 1.0}, {2.0, 4.0}}, mbp::InterpLoss::l2);
    if (std::abs(proj.z[0] - 1.8) > 1e-6 || std::abs(proj.z[1] - 3.6) > 1e-6) {
        pass = false;
        note += " KKT point missed;";
    }

    mbp::SplitMix64 rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> params;
        double a = 0.5 + rng.uniform01();
        for (int i = 0; i < 4; ++i) {
            params.push_back(a);
            a += 0.3 + rng.uniform01();
        }
        const auto z = gen::random_feasible_prices(params, 111000 + trial);
        std::vector<mbp::PricePoint> pts;
        for (std::size_t i = 0; i < params.size(); ++i) pts.push_back({params[i], z[i]});
        const auto fixed = mbp::solve_interpolation(pts, mbp::InterpLoss::l2);
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (std::abs(fixed.z[i] - z[i]) > 1e-7 * (1.0 + std::abs(z[i]))) {
                pass = false;
                note += " not idempotent;";
                break;
            }
        }
    }

    // Additive bound against the exact unrelaxed optimum on small
    // instances; the exact side comes from a grid search filtered by the
    // interpolation feasibility checker.
    struct Case {
        std::vector<mbp::PricePoint> pts;
        double lo, hi, coarse;
    };
    const std::vector<Case> cases = {
        {{{2.0, 2.0}, {5.0, 5.2}}, 1.5, 6.5, 0.05},
        {{{2.0, 2.0}, {3.0, 3.0}, {5.0, 5.5}}, 1.5, 6.5, 0.05},
        {{{1.0, 1.5}, {2.0, 2.0}, {3.0, 4.0}}, 0.5, 5.0, 0.05},
    };
    for (const auto& c : cases) {
        double sum_sq = 0.0;
        for (const auto& p : c.pts) sum_sq += p.z * p.z;
        const double relaxed = mbp::solve_interpolation(c.pts, mbp::InterpLoss::l2).objective;

        // Two-stage grid search for the exact-(3) optimum of the negative
        // squared deviation.
        auto search = [&](std::vector<double> lo, std::vector<double> hi, double step) {
            const std::size_t n = c.pts.size();
            std::vector<double> z(n, 0.0), best_z(n, 0.0);
            double best = -1e300;
            auto rec = [&](auto&& self, std::size_t j) -> void {
                if (j == n) {
                    std::vector<mbp::PricePoint> candidate;
                    for (std::size_t i = 0; i < n; ++i) {
                        candidate.push_back({c.pts[i].a, z[i]});
                    }
                    if (!mbp::interpolation_feasible(candidate, 1000000)) return;
                    double value = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        value -= (z[i] - c.pts[i].z) * (z[i] - c.pts[i].z);
                    }
                    if (value > best) {
                        best = value;
                        best_z = z;
                    }
                    return;
                }
                const double start = j == 0 ? lo[j] : std::max(lo[j], z[j - 1]);
                for (double v = start; v <= hi[j]; v += step) {
                    z[j] = v;
                    self(self, j + 1);
                }
            };
            rec(rec, 0);
            return std::make_pair(best, best_z);
        };
        const std::size_t n = c.pts.size();
        auto [coarse_value, coarse_z] =
            search(std::vector<double>(n, c.lo), std::vector<double>(n, c.hi), c.coarse);
        std::vector<double> lo2(n), hi2(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo2[i] = std::max(0.01, coarse_z[i] - 1.5 * c.coarse);
            hi2[i] = coarse_z[i] + 1.5 * c.coarse;
        }
        auto [exact_grid, z2] = search(lo2, hi2, 0.002);
        (void)z2;

        // Lower side of the additive bound: exact >= grid value, so the
        // grid value is a sound stand-in. Upper side allows the fine-grid
        // resolution slack.
        if (relaxed < exact_grid - sum_sq / 2.0 - 1e-9) {
            pass = false;
            note += " additive lower bound violated;";
        }
        if (relaxed > exact_grid + 0.02) {
            pass = false;
            note += " relaxed value exceeds the exact optimum;";
        }
    }
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "projection (1.8, 3.6) +- 1e-6; idempotent on 20 feasible inputs; "
                  "additive bound vs grid-search exact optimum on 3 instances;%s",
                  note.empty() ? " clean" : note.c_str());
    return {pass, detail};
}

// --- criterion 11: feasibility checker -------------------------------------

std::pair<bool, std::string> feasibility_checker() {
    const bool reject = !mbp::interpolation_feasible(
        std::vector<mbp::PricePoint>{{2.0, 2.0}, {3.0, 3.0}, {5.0, 5.5}}, 1000000);
    const bool accept = mbp::interpolation_feasible(
        std::vector<mbp::PricePoint>{{2.0, 2.0}, {3.0, 3.0}, {5.0, 5.0}}, 1000000);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "{(2,2),(3,3),(5,5.5)} -> %s (expect infeasible), {(2,2),(3,3),(5,5)} -> "
                  "%s (expect feasible)",
                  reject ? "infeasible" : "feasible", accept ? "feasible" : "infeasible");
    return {reject && accept, detail};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    run(1, "square-loss calibration", calibration);
    run(2, "unbiased release", unbiasedness);
    run(3, "monotone error curves", monotone_curves);
    run(4, "dynamic program exactness", dp_exactness);
    run(5, "relaxation sandwich", relaxation_sandwich);
    run(6, "subadditive envelope sandwich", envelope_sandwich);
    run(7, "emitted curves are well behaved", emitted_curves_validate);
    run(8, "baseline dominance", baseline_dominance);
    run(9, "runtime envelopes", runtime_envelopes);
    run(10, "interpolation projection", interpolation_projection);
    run(11, "interpolation feasibility checker", feasibility_checker);
    if (failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria failed\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
