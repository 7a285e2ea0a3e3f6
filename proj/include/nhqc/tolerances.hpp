#pragma once

namespace nhqc {

// Every numeric tolerance used across the toolkit, collected in one record so
// nothing is buried in call sites.
struct Tolerances {
    double hermitian_symmetry = 1e-12;  // entrywise |H - H^dag| bound for Hermitian inputs
    double unitarity = 1e-10;           // ||U^dag U - I||_F bound for unitary inputs
    double eigenvalue_gap = 1e-8;       // divided-difference switch to the analytic limit
    double degenerate_phase = 1e-8;     // eigenphase counted as pi if within this of pi
    double closure_rank = 1e-8;         // relative residual admitting a new closure basis vector
    double identity_objective = 1e-18;  // goal for the eight-segment root-of-identity search
    double identity_distance = 1e-6;    // ||U(64T) - I||_F verification bound
    double eigenphase = 1e-7;           // per-root phase bound for the eighth-root verification
    double newton = 1e-10;              // default newton_refine stopping distance
    double newton_step = 1e-11;         // step-target distance used inside gate synthesis
    double gate_distance = 1e-8;        // phase-aligned distance for an accepted gate
    double condition_limit = 1e12;      // largest usable least-squares condition number
    double state_norm = 1e-10;          // register-state normalization bound
};

inline constexpr Tolerances default_tolerances{};

}  // namespace nhqc
