#pragma once

namespace ptds {

/// Full command-line entry point. Exit codes: 0 success, 1 configuration or
/// argument errors, 2 infeasible query point, 3 certify verdict DIVERGENT,
/// 4 aborted computation (failed simulation step, infeasible start state,
/// solver non-convergence).
int run_cli(int argc, char** argv);

} // namespace ptds
