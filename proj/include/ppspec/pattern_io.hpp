#pragma once

#include <string>

#include "ppspec/geometry.hpp"

namespace ppspec {

// Pattern CSV: '# dim:' and '# window:' comment headers, then one
// comma-separated point per row at full %.17g precision.
PointPattern read_pattern(const std::string& path);
void write_pattern(const PointPattern& pattern, const std::string& path);

// Field CSV: grid/taper metadata headers, then rows k1..kd, omega1..omegad, value.
PeriodogramField read_field(const std::string& path);
void write_field(const PeriodogramField& field, const std::string& path);

}  // namespace ppspec
