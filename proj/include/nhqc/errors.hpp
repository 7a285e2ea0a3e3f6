#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nhqc {

// Broken structural invariant: wrong dimensions, malformed indices, invalid layout.
struct structural_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative search exhausted its budget; carries the best value it reached.
struct convergence_error : std::runtime_error {
    double best;
    convergence_error(const std::string& what, double best_value)
        : std::runtime_error(what), best(best_value) {}
};

// A linear system too ill-conditioned to trust; carries the condition number.
struct ill_conditioned_error : std::runtime_error {
    double condition;
    ill_conditioned_error(const std::string& what, double cond)
        : std::runtime_error(what), condition(cond) {}
};

// Gate synthesis failed for every allowed step count; carries per-attempt notes.
struct synthesis_error : std::runtime_error {
    std::vector<std::string> diagnostics;
    synthesis_error(const std::string& what, std::vector<std::string> notes)
        : std::runtime_error(what), diagnostics(std::move(notes)) {}
};

// Request exceeds a hard resource cap (e.g. state-vector size).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nhqc
