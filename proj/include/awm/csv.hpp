// csv.hpp: full-precision text for doubles in CSV output.

#pragma once

#include <string>

namespace awm {

/// 17 significant digits, so every value parses back to the same double.
std::string format_double(double x);

}  // namespace awm
