#pragma once

namespace pnd::cli {

/// Subcommands generate, check, solve, separate, simulate, tradeoff, bench.
/// Returns 0 on success, 1 on an infeasible or limited result, 2 on usage or input errors.
int run(int argc, char** argv);

}  // namespace pnd::cli
