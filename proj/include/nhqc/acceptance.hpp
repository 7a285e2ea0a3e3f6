#pragma once

#include <string>

namespace nhqc {

// Runs the end-to-end self-check suite: every release-gating property of the
// toolkit, each reported as one [PASS]/[FAIL] line with its measured values
// and runtime.  `filter` keeps only checks whose name contains the substring
// (empty = all).  Returns the number of failed checks.
int run_acceptance(const std::string& filter = {});

}  // namespace nhqc
