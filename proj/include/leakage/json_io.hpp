#pragma once

// JSON encodings of distributions, events and reports. Every report object
// carries "schema": "leakage-lab/1".

#include <json.hpp>

#include <string>

#include "leakage/adaptive.hpp"
#include "leakage/bounds.hpp"
#include "leakage/dist.hpp"
#include "leakage/error.hpp"
#include "leakage/harness.hpp"
#include "leakage/mechanisms.hpp"
#include "leakage/report.hpp"

namespace leakage::json {

using nlohmann::json;

inline constexpr const char* kSchema = "leakage-lab/1";

/// Finite values as numbers; infinities as the strings "inf" / "-inf".
json number(double v);

/// {"x_labels": [...], "y_labels": [...], "probs": [[...], ...]}. Numeric
/// labels are read as their JSON text.
JointDist joint_from_json(const json& j);
json to_json(const JointDist& j);

/// {"pairs": [[i, j], ...]}.
Event event_from_json(const json& j, std::size_t nx, std::size_t ny);
json to_json(const Event& e);

json to_json(const BoundReport& r);
json to_json(const MechanismLeakage& m);
json to_json(const CompositionLedger& l);
json to_json(const VerificationReport& r);
json to_json(const ExperimentResult& r);
json to_json(const DpRegimeComparison& c);
json error_json(const Error& e);

/// Reads and parses a file; InvalidArgument on I/O or syntax errors.
json read_file(const std::string& path);

}  // namespace leakage::json
