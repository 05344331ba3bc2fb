#pragma once

#include <json.hpp>
#include <string>

#include "kere/classify.hpp"
#include "kere/conjugacy.hpp"
#include "kere/orbit.hpp"

namespace kere {

using OrderedJson = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Fixed 12-significant-digit decimal string; all floating-point output
/// goes through this so reports are byte-stable run to run.
std::string fmt_real(double v);

OrderedJson point_to_json(const SurfacePoint& p);
OrderedJson vec2_to_json(Vec2 v);
OrderedJson mat2i_to_json(const Mat2i& m);

OrderedJson classification_to_json(const ClassificationResult& r);
OrderedJson singular_to_json(const SingularSetEstimate& est);
OrderedJson conjugacy_to_json(const ConjugacyMap& h, bool include_nodes = true);

/// Top-level document: tool_version / config / result / diagnostics.
OrderedJson make_document(OrderedJson config, OrderedJson result, OrderedJson diagnostics);

/// Minimal structural validator for the subset of JSON Schema used by the
/// checked-in report schema: type, required, properties, items, enum.
bool validate_schema(const nlohmann::json& schema, const nlohmann::json& doc,
                     std::string* error = nullptr);

}  // namespace kere
