#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace funreg::cli {

/**
 * Entry point of the funreg tool: `funreg <simulate|fit|predict|cv|bench> [options]`.
 *
 * Options come from an optional JSON file (--config) and are overridden by
 * flags. Progress and summaries go to `out` as one JSON object per line; on
 * failure a single line {"error": <kind>, "message": ...} goes to `err` and
 * the return value is nonzero.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace funreg::cli
