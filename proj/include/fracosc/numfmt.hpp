#pragma once

#include <string>

namespace fracosc {

/// Shortest decimal text that reads back to the same double.
std::string fmt_double(double v);

}  // namespace fracosc
