#pragma once

// SVG charts of report pages: one circle per basis class at (n, w), one
// line per nonzero entry of d_r, weight increasing upward.

#include <string>

#include "thhcalc/runner.hpp"

namespace thhcalc {

// Throws Error if the report has no page r. Output is deterministic.
std::string emit_chart(const RunReport& report, int r);

}  // namespace thhcalc
