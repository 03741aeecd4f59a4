// Deterministic JSON output: doubles always carry 17 significant digits.
#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace rtourn::cli {

using Json = nlohmann::ordered_json;

/// %.17g; NaN and infinities become null.
std::string format_double(double x);

void write_json(std::ostream& os, const Json& value);

}  // namespace rtourn::cli
