#include "mbp/json_io.hpp"

#include <cmath>
#include <fstream>

#include "mbp/errors.hpp"

namespace mbp::io {

namespace {

const json& require(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing JSON key '") + key + "'");
    return *it;
}

}  // namespace

std::string family_name(LossFamily family) {
    switch (family) {
        case LossFamily::square: return "square";
        case LossFamily::log_loss: return "log";
        case LossFamily::hinge_l2: return "hinge_l2";
        case LossFamily::zero_one: return "zero_one";
        case LossFamily::square_to_optimal: return "square_to_optimal";
    }
    throw DomainError("unknown loss family");
}

LossFamily family_from_name(const std::string& name) {
    if (name == "square") return LossFamily::square;
    if (name == "log") return LossFamily::log_loss;
    if (name == "hinge_l2") return LossFamily::hinge_l2;
    if (name == "zero_one") return LossFamily::zero_one;
    if (name == "square_to_optimal") return LossFamily::square_to_optimal;
    throw ParseError("unknown loss family '" + name + "'");
}

std::string kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::linear: return "linear";
        case ModelKind::logistic: return "logistic";
        case ModelKind::svm_l2: return "svm_l2";
    }
    throw DomainError("unknown model kind");
}

ModelKind kind_from_name(const std::string& name) {
    if (name == "linear") return ModelKind::linear;
    if (name == "logistic") return ModelKind::logistic;
    if (name == "svm_l2") return ModelKind::svm_l2;
    throw ParseError("unknown model kind '" + name + "'");
}

json model_to_json(const ModelInstance& model) {
    return json{{"kind", kind_name(model.kind)},
                {"weights", model.weights},
                {"mu", model.mu}};
}

ModelInstance model_from_json(const json& j) {
    ModelInstance model;
    model.kind = kind_from_name(require(j, "kind").get<std::string>());
    model.weights = require(j, "weights").get<std::vector<double>>();
    model.mu = require(j, "mu").get<double>();
    if (model.weights.empty()) throw ParseError("model has no weights");
    for (double w : model.weights) {
        if (!std::isfinite(w)) throw ParseError("model weights must be finite");
    }
    return model;
}

json curve_to_json(const ErrorCurve& curve) {
    json points = json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"x", p.x},
                          {"mean_error", p.mean_error},
                          {"stderr", p.std_error},
                          {"samples", p.samples}});
    }
    return json{{"epsilon", family_name(curve.epsilon_family)},
                {"seed", curve.seed},
                {"points", points}};
}

ErrorCurve curve_from_json(const json& j) {
    ErrorCurve curve;
    curve.epsilon_family = family_from_name(require(j, "epsilon").get<std::string>());
    curve.seed = require(j, "seed").get<std::uint64_t>();
    double prev_x = 0.0;
    for (const auto& p : require(j, "points")) {
        ErrorCurvePoint point{};
        point.x = require(p, "x").get<double>();
        point.mean_error = require(p, "mean_error").get<double>();
        point.std_error = require(p, "stderr").get<double>();
        point.samples = require(p, "samples").get<std::size_t>();
        if (!(point.x > prev_x)) throw ParseError("curve x grid must be strictly increasing");
        if (point.samples < 1) throw ParseError("curve point needs samples >= 1");
        if (point.std_error < 0.0) throw ParseError("curve stderr must be nonnegative");
        prev_x = point.x;
        curve.points.push_back(point);
    }
    if (curve.points.empty()) throw ParseError("error curve has no points");
    return curve;
}

json pricing_to_json(const PricingCurve& curve) {
    json breakpoints = json::array();
    for (const auto& p : curve.breakpoints()) {
        breakpoints.push_back({{"a", p.a}, {"price", p.z}});
    }
    return json{{"breakpoints", breakpoints}};
}

PricingCurve pricing_from_json(const json& j, bool check_feasibility) {
    std::vector<PricePoint> pts;
    for (const auto& p : require(j, "breakpoints")) {
        pts.push_back({require(p, "a").get<double>(), require(p, "price").get<double>()});
    }
    return check_feasibility ? make_piecewise(std::move(pts))
                             : PricingCurve::unchecked(std::move(pts));
}

json report_to_json(const ValidationReport& report) {
    json witnesses = json::array();
    for (const auto& w : report.witnesses) {
        witnesses.push_back(
            {{"check", w.check}, {"x", w.x}, {"y", w.y}, {"lhs", w.lhs}, {"rhs", w.rhs}});
    }
    return json{{"non_negative", report.non_negative},
                {"monotone", report.monotone},
                {"subadditive", report.subadditive},
                {"witnesses", witnesses}};
}

json market_to_json(const MarketInstance& market) {
    json points = json::array();
    for (const auto& p : market.points) {
        points.push_back({{"a", p.a}, {"v", p.v}, {"b", p.b}});
    }
    return json{{"points", points}};
}

MarketInstance market_from_json(const json& j) {
    MarketInstance market;
    for (const auto& p : require(j, "points")) {
        market.points.push_back({require(p, "a").get<double>(),
                                 require(p, "v").get<double>(),
                                 require(p, "b").get<double>()});
    }
    check_market(market);
    return market;
}

namespace {

std::string feasibility_name(Feasibility f) {
    switch (f) {
        case Feasibility::relaxed_5: return "relaxed_5";
        case Feasibility::exact_3: return "exact_3";
        case Feasibility::unconstrained: return "unconstrained";
    }
    throw DomainError("unknown feasibility tag");
}

Feasibility feasibility_from_name(const std::string& name) {
    if (name == "relaxed_5") return Feasibility::relaxed_5;
    if (name == "exact_3") return Feasibility::exact_3;
    if (name == "unconstrained") return Feasibility::unconstrained;
    throw ParseError("unknown feasibility tag '" + name + "'");
}

}  // namespace

json assignment_to_json(const PriceAssignment& assignment, const MarketInstance& market) {
    json breakpoints = json::array();
    for (std::size_t j = 0; j < market.size(); ++j) {
        breakpoints.push_back({{"a", market.points[j].a}, {"price", assignment.z[j]}});
    }
    return json{{"z", assignment.z},
                {"objective", assignment.objective},
                {"feasibility", feasibility_name(assignment.feasibility)},
                {"breakpoints", breakpoints}};
}

PriceAssignment assignment_from_json(const json& j) {
    PriceAssignment assignment;
    assignment.z = require(j, "z").get<std::vector<double>>();
    assignment.objective = require(j, "objective").get<double>();
    assignment.feasibility =
        feasibility_from_name(require(j, "feasibility").get<std::string>());
    return assignment;
}

json quote_to_json(const QuoteResult& quote) {
    return json{{"delta", quote.delta},
                {"x", quote.x},
                {"price", quote.price},
                {"expected_error", quote.expected_error}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open JSON file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write JSON file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write: " + path);
}

}  // namespace mbp::io
