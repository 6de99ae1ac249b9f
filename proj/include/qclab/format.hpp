#pragma once

#include <string>

namespace qclab {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace qclab
