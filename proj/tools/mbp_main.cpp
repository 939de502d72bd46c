// Command-line front end for the model pricing engine. Pipeline:
// gen-data -> train -> curve -> price -> validate -> simulate -> quote.
// Exit codes: 0 success, 1 domain/infeasibility errors, 2 I/O or usage.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbp/dataset.hpp"
#include "mbp/errors.hpp"
#include "mbp/json_io.hpp"
#include "mbp/mechanism.hpp"
#include "mbp/models.hpp"
#include "mbp/pricing.hpp"
#include "mbp/revenue.hpp"
#include "mbp/rng.hpp"

namespace {

using mbp::io::json;

constexpr int kOk = 0;
constexpr int kDomainExit = 1;
constexpr int kUsageExit = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        mbp::io::write_json_file(out_path, j);
    }
}

// "lo:hi:count" -> count points from lo to hi.
std::vector<double> parse_grid(const std::string& text, bool geometric) {
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos) {
        throw UsageError("grid must look like lo:hi:count, got '" + text + "'");
    }
    double lo = 0.0, hi = 0.0;
    long count = 0;
    try {
        lo = std::stod(text.substr(0, first));
        hi = std::stod(text.substr(first + 1, second - first - 1));
        count = std::stol(text.substr(second + 1));
    } catch (const std::exception&) {
        throw UsageError("grid must look like lo:hi:count, got '" + text + "'");
    }
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw UsageError("grid needs 0 < lo < hi and count >= 2");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (geometric) {
        const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(count - 1));
        double x = lo;
        for (auto& g : grid) {
            g = x;
            x *= ratio;
        }
    } else {
        const double step = (hi - lo) / static_cast<double>(count - 1);
        for (long i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
    }
    grid.back() = hi;
    return grid;
}

mbp::Dataset load_for_model(const std::string& path, mbp::ModelKind kind) {
    const auto task =
        kind == mbp::ModelKind::linear ? mbp::Task::regression : mbp::Task::classification;
    return mbp::load_csv(path, task);
}

int run_gen_data(const std::string& kind, std::size_t n, std::size_t d, std::uint64_t seed,
                 const std::string& out) {
    mbp::Dataset data;
    if (kind == "simulated1") {
        data = mbp::gen_simulated1(n, d, seed);
    } else if (kind == "simulated2") {
        data = mbp::gen_simulated2(n, d, seed);
    } else {
        throw UsageError("unknown dataset kind '" + kind + "'");
    }
    mbp::save_csv(out, data);
    return kOk;
}

int run_train(const std::string& data_path, const std::string& model_name, double mu,
              double tol, std::size_t max_iter, const std::string& out) {
    const mbp::ModelKind kind = mbp::io::kind_from_name(model_name);
    if (kind == mbp::ModelKind::svm_l2 && mu <= 0.0) {
        throw UsageError("--model svm_l2 requires --mu > 0");
    }
    const mbp::Dataset data = load_for_model(data_path, kind);
    mbp::ModelInstance model;
    if (kind == mbp::ModelKind::linear) {
        model = mbp::train_linear(data, mu);
    } else {
        const auto family = kind == mbp::ModelKind::logistic ? mbp::LossFamily::log_loss
                                                             : mbp::LossFamily::hinge_l2;
        model = mbp::train_iterative(data, family, mu, {tol, max_iter});
    }
    emit(mbp::io::model_to_json(model), out);
    return kOk;
}

int run_curve(const std::string& model_path, const std::string& data_path,
              const std::string& epsilon, double mu, const std::string& grid_text,
              std::size_t samples, std::uint64_t seed, const std::string& out) {
    if (samples < 2) throw UsageError("--samples must be at least 2");
    const mbp::ModelInstance model =
        mbp::io::model_from_json(mbp::io::read_json_file(model_path));
    const auto family = mbp::io::family_from_name(epsilon);

    mbp::LossSpec spec;
    spec.family = family;
    spec.mu = mu;
    mbp::Dataset data;
    if (family == mbp::LossFamily::square_to_optimal) {
        spec.reference = model;
        data.task = mbp::Task::regression;
        data.features.cols = model.dim();
    } else {
        if (data_path.empty()) throw UsageError("--data is required for this epsilon");
        const auto task = family == mbp::LossFamily::square ? mbp::Task::regression
                                                            : mbp::Task::classification;
        data = mbp::load_csv(data_path, task);
    }

    std::vector<double> grid;
    if (!grid_text.empty()) {
        grid = parse_grid(grid_text, /*geometric=*/true);
    } else {
        const double base_error = mbp::loss_eval(model, data, spec);
        grid = mbp::default_x_grid(base_error);
    }
    const auto curve = mbp::estimate_error_curve(model, data, spec, grid, samples, seed);
    emit(mbp::io::curve_to_json(curve), out);
    return kOk;
}

int run_price_optimize(const std::string& market_path, const std::string& out) {
    const auto market = mbp::io::market_from_json(mbp::io::read_json_file(market_path));
    const auto assignment = mbp::optimize_dp(market);
    emit(mbp::io::assignment_to_json(assignment, market), out);
    return kOk;
}

int run_price_oracle(const std::string& market_path, bool exact, std::int64_t scale_cap,
                     const std::string& out) {
    const auto market = mbp::io::market_from_json(mbp::io::read_json_file(market_path));
    const auto assignment =
        exact ? mbp::oracle_exact(market, scale_cap) : mbp::oracle_relaxed(market);
    emit(mbp::io::assignment_to_json(assignment, market), out);
    return kOk;
}

int run_price_interpolate(const std::string& points_path, const std::string& loss_name,
                          double tol, std::size_t max_iter, const std::string& out) {
    const auto j = mbp::io::read_json_file(points_path);
    const auto curve = mbp::io::pricing_from_json(j, /*check_feasibility=*/false);
    const auto& pts = curve.breakpoints();
    mbp::InterpLoss loss;
    if (loss_name == "l2") {
        loss = mbp::InterpLoss::l2;
    } else if (loss_name == "l1") {
        loss = mbp::InterpLoss::l1;
    } else {
        throw UsageError("--loss must be l1 or l2");
    }
    const auto assignment = mbp::solve_interpolation(pts, loss, {tol, max_iter});
    json breakpoints = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        breakpoints.push_back({{"a", pts[i].a}, {"price", assignment.z[i]}});
    }
    json result{{"z", assignment.z},
                {"objective", assignment.objective},
                {"feasibility", "relaxed_5"},
                {"breakpoints", breakpoints}};
    emit(result, out);
    return kOk;
}

int run_price_baseline(const std::string& market_path, const std::string& kind_name,
                       const std::string& out) {
    mbp::BaselineKind kind;
    if (kind_name == "lin") {
        kind = mbp::BaselineKind::lin;
    } else if (kind_name == "max_c") {
        kind = mbp::BaselineKind::max_c;
    } else if (kind_name == "med_c") {
        kind = mbp::BaselineKind::med_c;
    } else if (kind_name == "opt_c") {
        kind = mbp::BaselineKind::opt_c;
    } else {
        throw UsageError("--kind must be one of lin, max_c, med_c, opt_c");
    }
    const auto market = mbp::io::market_from_json(mbp::io::read_json_file(market_path));
    const auto assignment = mbp::baseline(kind, market);
    emit(mbp::io::assignment_to_json(assignment, market), out);
    return kOk;
}

int run_validate(const std::string& curve_path, const std::string& grid_text,
                 const std::string& out) {
    const auto curve =
        mbp::io::pricing_from_json(mbp::io::read_json_file(curve_path), false);
    const auto grid = parse_grid(grid_text, /*geometric=*/false);
    const auto report =
        mbp::validate([&](double x) { return curve.eval(x); }, grid);
    emit(mbp::io::report_to_json(report), out);
    return report.ok() ? kOk : kDomainExit;
}

int run_simulate(const std::string& market_path, const std::string& prices_path,
                 const std::string& out) {
    const auto market = mbp::io::market_from_json(mbp::io::read_json_file(market_path));
    const auto assignment =
        mbp::io::assignment_from_json(mbp::io::read_json_file(prices_path));
    json metrics{{"revenue", mbp::revenue(assignment, market)},
                 {"affordability", mbp::affordability(assignment, market)}};
    emit(metrics, out);
    return kOk;
}

int run_quote(const std::string& curve_path, const std::string& errors_path,
              const double* error_budget, const double* price_budget, const double* point,
              const std::string& out) {
    const int given = (error_budget != nullptr) + (price_budget != nullptr) +
                      (point != nullptr);
    if (given != 1) {
        throw UsageError("pass exactly one of --error-budget, --price-budget, --point");
    }
    const auto prices = mbp::io::pricing_from_json(mbp::io::read_json_file(curve_path));
    const auto errors = mbp::io::curve_from_json(mbp::io::read_json_file(errors_path));
    mbp::QuoteResult quote{};
    if (error_budget) {
        quote = mbp::quote_by_error_budget(prices, errors, *error_budget);
    } else if (price_budget) {
        quote = mbp::quote_by_price_budget(prices, errors, *price_budget);
    } else {
        quote = mbp::quote_at_point(prices, errors, *point);
    }
    emit(mbp::io::quote_to_json(quote), out);
    return kOk;
}

mbp::MarketInstance bench_market(std::size_t n, std::uint64_t seed, double a_cap) {
    mbp::SplitMix64 rng(mbp::derive_seed(seed, 17, n));
    mbp::MarketInstance market;
    market.points.resize(n);
    std::vector<double> values(n);
    for (auto& v : values) v = 1.0 + 99.0 * rng.uniform01();
    std::sort(values.begin(), values.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double a = a_cap > 0.0 ? (a_cap * static_cast<double>(j + 1)) /
                                           static_cast<double>(n)
                                     : static_cast<double>(j + 1);
        market.points[j] = {a, values[j], rng.uniform01()};
    }
    return market;
}

double time_seconds(const std::function<void()>& fn, int repetitions) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(stop - start).count());
    }
    return best;
}

int run_bench(const std::string& out) {
    json rows = json::array();
    for (const std::size_t n : {std::size_t{200}, std::size_t{2000}}) {
        const auto market = bench_market(n, 7, 0.0);
        const double seconds = time_seconds([&] { (void)mbp::optimize_dp(market); }, 3);
        rows.push_back({{"algo", "optimize_dp"}, {"n", n}, {"seconds", seconds}});
    }
    for (const std::size_t n : {std::size_t{8}, std::size_t{12}}) {
        mbp::MarketInstance market = bench_market(n, 11, 0.0);
        for (std::size_t j = 0; j < n; ++j) market.points[j].a = static_cast<double>(j + 1);
        const double seconds =
            time_seconds([&] { (void)mbp::oracle_exact(market, 1000000); }, 3);
        rows.push_back({{"algo", "oracle_exact"}, {"n", n}, {"seconds", seconds}});
    }
    emit(rows, out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy model version pricing engine"};
    app.require_subcommand(1);

    std::string kind, out, data_path, model_name = "linear", model_path, epsilon = "square";
    std::string grid_text, market_path, points_path, loss_name = "l2", curve_path;
    std::string errors_path, prices_path, baseline_kind = "opt_c";
    std::size_t n = 1000, d = 5, samples = 2000, max_iter = 100000;
    std::uint64_t seed = 0;
    double mu = 0.0, tol = 1e-8, scale_cap_d = 1e6;
    bool exact = false;
    double error_budget = 0.0, price_budget = 0.0, point = 0.0;

    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset CSV");
    gen->add_option("kind", kind, "simulated1 (regression) or simulated2 (classification)")
        ->required();
    gen->add_option("--n", n, "number of rows")->required();
    gen->add_option("--d", d, "number of features")->required();
    gen->add_option("--seed", seed, "RNG seed (default 0)");
    gen->add_option("--out", out, "output CSV path")->required();

    auto* train = app.add_subcommand("train", "Train the optimal model instance");
    train->add_option("--data", data_path, "training CSV")->required();
    train->add_option("--model", model_name, "linear | logistic | svm_l2")->required();
    train->add_option("--mu", mu, "L2 regularization strength");
    train->add_option("--tol", tol, "gradient tolerance (iterative models)");
    train->add_option("--max-iter", max_iter, "iteration cap (iterative models)");
    train->add_option("--out", out, "output model JSON");

    auto* curve = app.add_subcommand("curve", "Estimate the expected-error curve");
    curve->add_option("--model", model_path, "trained model JSON")->required();
    curve->add_option("--data", data_path, "evaluation CSV");
    curve->add_option("--epsilon", epsilon,
                      "square | log | hinge_l2 | zero_one | square_to_optimal");
    curve->add_option("--mu", mu, "regularizer included in the reported error");
    curve->add_option("--grid", grid_text, "x grid as lo:hi:count (geometric)");
    curve->add_option("--samples", samples, "Monte Carlo samples per grid point");
    curve->add_option("--seed", seed, "RNG seed (default 0)");
    curve->add_option("--out", out, "output curve JSON");

    auto* price = app.add_subcommand("price", "Revenue optimization and baselines");
    price->require_subcommand(1);
    auto* popt = price->add_subcommand("optimize", "Dynamic program for the relaxed problem");
    popt->add_option("--market", market_path, "market JSON")->required();
    popt->add_option("--out", out, "output assignment JSON");
    auto* porc = price->add_subcommand("oracle", "Exhaustive reference optimizers");
    porc->add_option("--market", market_path, "market JSON")->required();
    porc->add_flag("--exact", exact, "solve the unrelaxed problem by subset enumeration");
    porc->add_option("--scale-cap", scale_cap_d, "integer grid cap for --exact");
    porc->add_option("--out", out, "output assignment JSON");
    auto* pint = price->add_subcommand("interpolate", "Fit prices to target points");
    pint->add_option("--points", points_path, "target points JSON (breakpoints format)")
        ->required();
    pint->add_option("--loss", loss_name, "l2 | l1");
    pint->add_option("--tol", tol, "movement tolerance");
    pint->add_option("--max-iter", max_iter, "iteration cap");
    pint->add_option("--out", out, "output assignment JSON");
    auto* pbase = price->add_subcommand("baseline", "Reference pricing policies");
    pbase->add_option("--market", market_path, "market JSON")->required();
    pbase->add_option("--kind", baseline_kind, "lin | max_c | med_c | opt_c")->required();
    pbase->add_option("--out", out, "output assignment JSON");

    auto* validate_cmd = app.add_subcommand("validate", "Check a pricing curve on a grid");
    validate_cmd->add_option("--curve", curve_path, "pricing curve JSON")->required();
    validate_cmd->add_option("--grid", grid_text, "grid as lo:hi:count (linear)")->required();
    validate_cmd->add_option("--out", out, "output report JSON");

    auto* simulate = app.add_subcommand("simulate", "Revenue and affordability of prices");
    simulate->add_option("--market", market_path, "market JSON")->required();
    simulate->add_option("--prices", prices_path, "price assignment JSON")->required();
    simulate->add_option("--out", out, "output metrics JSON");

    auto* quote = app.add_subcommand("quote", "Quote a version for a buyer");
    quote->add_option("--curve", curve_path, "pricing curve JSON")->required();
    quote->add_option("--errors", errors_path, "error curve JSON")->required();
    auto* opt_eb = quote->add_option("--error-budget", error_budget, "max expected error");
    auto* opt_pb = quote->add_option("--price-budget", price_budget, "max price");
    auto* opt_pt = quote->add_option("--point", point, "exact inverse noise level x");
    quote->add_option("--out", out, "output quote JSON");

    auto* bench = app.add_subcommand("bench", "Wall times of the optimizers");
    bench->add_option("--out", out, "output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageExit;
    }

    try {
        if (gen->parsed()) return run_gen_data(kind, n, d, seed, out);
        if (train->parsed()) return run_train(data_path, model_name, mu, tol, max_iter, out);
        if (curve->parsed()) {
            return run_curve(model_path, data_path, epsilon, mu, grid_text, samples, seed, out);
        }
        if (price->parsed()) {
            if (popt->parsed()) return run_price_optimize(market_path, out);
            if (porc->parsed()) {
                return run_price_oracle(market_path, exact,
                                        static_cast<std::int64_t>(scale_cap_d), out);
            }
            if (pint->parsed()) {
                return run_price_interpolate(points_path, loss_name, tol, max_iter, out);
            }
            if (pbase->parsed()) return run_price_baseline(market_path, baseline_kind, out);
        }
        if (validate_cmd->parsed()) return run_validate(curve_path, grid_text, out);
        if (simulate->parsed()) return run_simulate(market_path, prices_path, out);
        if (quote->parsed()) {
            const double* eb = opt_eb->count() ? &error_budget : nullptr;
            const double* pb = opt_pb->count() ? &price_budget : nullptr;
            const double* pt = opt_pt->count() ? &point : nullptr;
            return run_quote(curve_path, errors_path, eb, pb, pt, out);
        }
        if (bench->parsed()) return run_bench(out);
        std::cerr << "no subcommand given\n";
        return kUsageExit;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const mbp::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const mbp::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const mbp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainExit;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kDomainExit;
    }
}
