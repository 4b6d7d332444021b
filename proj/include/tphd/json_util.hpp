#pragma once

#include "tphd/spd.hpp"

#include <json.hpp>

namespace tphd {

nlohmann::json vec_to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);

/// Matrices serialize as row arrays.
nlohmann::json mat_to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j);

}  // namespace tphd
