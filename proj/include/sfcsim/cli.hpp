#pragma once

namespace sfcsim {

// Full command-line front end. Returns the process exit code: 0 on success,
// 1 on usage or input errors, 2 when a run left services unserved or the
// exact solver proved (or could not disprove) infeasibility.
int run_cli(int argc, const char* const* argv);

}  // namespace sfcsim
