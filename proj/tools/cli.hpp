#pragma once

#include <iosfwd>

namespace granuflow {

/// Entry point of the `granuflow` tool. Returns 0 on success, 1 when a
/// criterion or contraction check fails (or the solver gives up), 2 on usage,
/// config or input errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace granuflow
