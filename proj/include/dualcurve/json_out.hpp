#pragma once

#include <string>

#include "json.hpp"

#include "dualcurve/inequality_lab.hpp"
#include "dualcurve/measures.hpp"

namespace dualcurve {

inline constexpr const char* kReportSchema = "dualcurve.run/1";

nlohmann::json to_json(const MeasureEstimate& e);
nlohmann::json to_json(const RatioReport& r);
nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const TrialRecord& r);
nlohmann::json to_json(const FuzzSummary& s, bool with_records = true);
nlohmann::json to_json(const CylinderSweep& s);
nlohmann::json to_json(const RngSeed& s);

// %.17g
std::string format_double(double x);

// Two-space indented JSON with every double written as %.17g.
std::string dump(const nlohmann::json& j);

}  // namespace dualcurve
