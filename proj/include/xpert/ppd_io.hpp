#pragma once

#include "json.hpp"
#include "xpert/ppd.hpp"

namespace xpert {

// {"H": int, "grid": [[int, ...], ...]} with rows = birth bins.
void to_json(nlohmann::json& j, const Ppd& p);
void from_json(const nlohmann::json& j, Ppd& p);

// {"H": int, "channels": [ppd x 4], "b_max": real, "p_max": real}
void to_json(nlohmann::json& j, const ExtendedPpd& p);
void from_json(const nlohmann::json& j, ExtendedPpd& p);

}  // namespace xpert
