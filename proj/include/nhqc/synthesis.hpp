#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nhqc/hamiltonians.hpp"

namespace nhqc {

struct Segment {
    int k = 0;                                   // 1-based position; k = 1 acts first
    Perturbation perturbation = Perturbation::S; // S for odd k, omega for even k
    double C = 0.0;                              // control strength
};

// A piecewise-constant control schedule: 64 segments of equal duration T,
// alternating Stark and field perturbations, repeated `repetitions` times.
struct ControlSequence {
    std::vector<Segment> segments;
    double T = 250.0;
    int repetitions = 1;
    std::vector<std::string> warnings;  // e.g. strengths driven nonpositive by refinement

    std::array<double, 64> strengths() const;
};

// Throws structural_error unless the sequence has exactly 64 segments numbered
// k = 1..64 with alternating perturbations starting at S, T > 0, repetitions >= 1.
void validate_sequence(const ControlSequence& seq);

// Tiles 8 strengths (segments k = 1..8) eight times into a 64-segment sequence.
ControlSequence tile_eight(const std::array<double, 8>& C8, double T);

// Time-ordered product over the 64 segments (k = 1 is the rightmost factor),
// raised to the power `repetitions`.
Matrix total_evolution(const CellOperators& ops, const ControlSequence& seq);

// Objective of the root-of-identity search: with U = U(8T) from the eight
// alternating segments, sum_j |c_j - t_j|^2 between char_poly(U) and the
// coefficients of lambda^8 - 1.  Zero exactly when the eigenvalues of U are
// the eight distinct eighth roots of unity.
double identity_objective(const CellOperators& ops, const std::array<double, 8>& C8, double T);
double identity_objective_of(const Matrix& U8);

struct IdentityOptions {
    int max_restarts = 200;
    double objective_goal = default_tolerances.identity_objective;
    double box_lo = 0.2, box_hi = 3.0;  // randomized start box for the strengths
};

struct IdentityResult {
    ControlSequence sequence;          // the 8 strengths tiled to 64 segments, m = 1
    std::array<double, 8> strengths;
    double objective = 0.0;
    double identity_distance = 0.0;    // ||U(64T) - I||_F
    double max_eigenphase_error = 0.0; // worst circular deviation from the eighth roots
    int trials_used = 0;
};

// Searches for 8 positive strengths making U(8T) a nondegenerate eighth root
// of the identity: derivative-free simplex descent from seeded random starts
// in [box_lo, box_hi], followed by a damped Gauss-Newton polish on the
// coefficient residuals, restarting until the objective drops below the goal
// and the solution verifies (positivity, ||U(64T) - I||_F, distinct
// eighth-root eigenphases).  Deterministic for a given seed.  Throws
// convergence_error carrying the best objective when restarts are exhausted.
IdentityResult find_identity_sequence(const CellOperators& ops, std::uint64_t seed,
                                      double T, const IdentityOptions& opt = {});

// The 64 derivative matrices J_k = d/dC_k of the single 64-segment product:
// (product of segments k+1..64) * dexpm_direction(H0 + C_k P_k, P_k, T) *
// (product of segments 1..k-1).  Repetitions are not differentiated through.
std::vector<Matrix> control_jacobian(const CellOperators& ops, const ControlSequence& seq);

// Solves sum_k J_k deltaC_k = -i eps H_cal in the least-squares sense, with
// both sides expressed in the fixed skew-Hermitian coordinate basis (64 real
// unknowns, 64 equations).  Reports the system's condition number through
// `condition` when non-null and throws ill_conditioned_error above the limit.
RVector solve_delta(const std::vector<Matrix>& J, const Matrix& H_cal, double epsilon,
                    double* condition = nullptr);

struct NewtonResult {
    ControlSequence sequence;
    double distance = 0.0;        // phase-aligned distance to the target at exit
    double residual_phase = 0.0;  // global phase between U(C) and the target
    std::vector<double> trace;    // distance per iterate, starting at the initial point
    int iterations = 0;
};

// Newton refinement of the strengths toward U_target starting from
// base + delta0.  Each iterate solves the linear system again with right-hand
// side -i L, L = principal_log_unitary(U_target U(C)^dag) phase-aligned, the
// Jacobian columns right-translated by U(C)^dag so the equation is first-order
// consistent at the current point; steps are damped by a backtracking line
// search on the phase-aligned distance.  Throws convergence_error carrying the
// best distance when the iteration budget runs out or no damped step improves.
NewtonResult newton_refine(const CellOperators& ops, const ControlSequence& base_seq,
                           const RVector& delta0, const Matrix& U_target,
                           double tol = default_tolerances.newton, int max_iterations = 50);

struct SynthesisResult {
    ControlSequence sequence;  // repetitions set to m
    int m = 1;                 // total repetitions (doubled when the target was split)
    double distance = 0.0;     // phase-aligned ||U(seq) - U_target||_F
    double epsilon = 0.0;      // rotation angle of the target
    double residual_phase = 0.0;
    bool split = false;        // target realized as W^2 with W = exp(-i L / 2)
    std::vector<std::string> attempts;  // one diagnostic line per m tried
};

// Full gate-synthesis pipeline: L = principal_log_unitary(U_target),
// eps = ||L||, H_cal = L / eps; targets with a degenerate -1 eigenvalue are
// split as U = W^2, W = exp(-i L / 2), and W is synthesized with the returned
// repetition count doubled.  Tries m in {1, 2, 4, 8, 16} (total repetitions
// capped at 16): linearized first guess from solve_delta, then newton_refine
// on the step target exp(-i L / m); a stalled refinement is retried along a
// short continuation path of intermediate rotations.  Returns the first m
// whose repeated step lands within distance_tol of U_target; throws
// synthesis_error with per-m diagnostics when every m fails.
SynthesisResult effect_unitary(const CellOperators& ops, const ControlSequence& base_seq,
                               const Matrix& U_target,
                               double distance_tol = default_tolerances.gate_distance);

}  // namespace nhqc
