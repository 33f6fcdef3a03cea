#pragma once

#include <iosfwd>
#include <string>

#include "cbfem/config.hpp"

namespace cbfem {

/// Dispatches config.command (price, surface, greeks, converge, mms,
/// compare-fdm), writing the result table to config.out_path when set and
/// to `out` otherwise. Returns 0 on success; on failure writes one
/// machine-readable JSON error object to `err` and returns nonzero.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace cbfem
