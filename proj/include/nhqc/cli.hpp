#pragma once

#include <string>
#include <vector>

namespace nhqc::cli {

// Batch command dispatcher.  Subcommands: check, synth-identity, synth-gate,
// compile-qft, run, lower, emulate, selftest.  Returns 0 on success, 1 on a
// domain error (bad file contents, synthesis failure), 2 on a usage error.
// Callable in-process; main() forwards to it.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace nhqc::cli
