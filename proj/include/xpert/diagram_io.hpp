#pragma once

#include <string>

#include "json.hpp"
#include "xpert/diagram.hpp"

namespace xpert {

// {"homology_dim": k, "points": [[birth, death], ...]}
void to_json(nlohmann::json& j, const PersistenceDiagram& d);
void from_json(const nlohmann::json& j, PersistenceDiagram& d);

// {"ord0": ..., "rel1": ..., "ext0_plus": ..., "ext1_minus": ...}
void to_json(nlohmann::json& j, const ExtendedPersistenceDiagram& e);
void from_json(const nlohmann::json& j, ExtendedPersistenceDiagram& e);

/// Whole-file helpers; throw std::runtime_error with the path on failure.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace xpert
