#pragma once

#include <string>

#include <json.hpp>

#include "mbp/mechanism.hpp"
#include "mbp/models.hpp"
#include "mbp/pricing.hpp"
#include "mbp/revenue.hpp"

namespace mbp::io {

using nlohmann::json;

json model_to_json(const ModelInstance& model);
ModelInstance model_from_json(const json& j);

json curve_to_json(const ErrorCurve& curve);
ErrorCurve curve_from_json(const json& j);

json pricing_to_json(const PricingCurve& curve);
/// check_feasibility selects make_piecewise (quotes need a lawful curve)
/// versus PricingCurve::unchecked (validation inspects foreign curves).
PricingCurve pricing_from_json(const json& j, bool check_feasibility = true);

json report_to_json(const ValidationReport& report);

json market_to_json(const MarketInstance& market);
MarketInstance market_from_json(const json& j);

json assignment_to_json(const PriceAssignment& assignment, const MarketInstance& market);
PriceAssignment assignment_from_json(const json& j);

json quote_to_json(const QuoteResult& quote);

std::string family_name(LossFamily family);
LossFamily family_from_name(const std::string& name);
std::string kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace mbp::io
