#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "dualcop/dual.hpp"
#include "dualcop/inference.hpp"
#include "dualcop/simharness.hpp"

namespace dualcop::io {

using json = nlohmann::ordered_json;

json to_json(const EstimationResult& r);
json to_json(const PseudoLikelihoodResult& r);
json to_json(const VarianceEstimates& v);
json to_json(const TestReport& r);
json to_json(const PowerPlan& p);
json to_json(const SimulationSummary& s);

std::string to_string(Engine e);
std::string to_string(DomainCheck d);
std::string to_string(PowerForm f);
std::string to_string(SimMode m);

/// "t,ecdf,chi2_cdf" rows, 17 significant digits, LF line endings.
void write_ecdf_csv(std::ostream& out, const SimulationSummary& s);

}  // namespace dualcop::io
