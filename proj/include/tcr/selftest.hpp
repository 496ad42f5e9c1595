#pragma once

#include <ostream>

namespace tcr {

// Desk-scale property checks across all modules; one PASS/FAIL line each.
bool selftest(std::ostream& out);

} // namespace tcr
