#pragma once

#include <json.hpp>

#include "kere/surface_map.hpp"

namespace kere {

/// Map definitions on the wire:
///   {"surface": "...", "kind": "...", "params": {...}, "chain": [...]}
/// Complex parameters are [re, im] pairs; profile knots are [r, angle]
/// pairs. `chain` holds sub-maps for composite, inverted, klein_lift,
/// mobius_strip_lift and double kinds.
SurfaceMap map_from_json(const nlohmann::json& j);
nlohmann::json map_to_json(const SurfaceMap& f);

SurfaceMap map_from_string(const std::string& text);

}  // namespace kere
