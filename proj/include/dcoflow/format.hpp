#pragma once

#include <string>

namespace dcoflow {

// Shortest round-trip decimal text for a double; '.' separator, no grouping,
// independent of the global locale. Infinity prints as "inf".
std::string format_number(double value);

}  // namespace dcoflow
