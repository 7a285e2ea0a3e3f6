#pragma once

#include "nhqc/linalg.hpp"

// Unit conventions: energies in E_u, durations in hbar/E_u, hbar = 1 throughout.
// Basis ordering for one cell of three two-level atoms: |x2 x1 x0> with
// x = sum_r x_r 2^r, atom i storing bit i-1.

namespace nhqc {

// Physical constants of one three-atom cell.  The defaults are the reference
// operating point used by every command unless a parameter file overrides them.
struct CellParams {
    double D12 = 1.1, D23 = 0.946, D13 = 0.86;            // dipole-dipole couplings
    double V1 = 0.3, V2 = 0.33, V3 = 0.24;                // field couplings at reference strength
    double Delta1 = 0.1, Delta2 = 0.11, Delta3 = 0.312;   // Stark shifts at reference strength
    double A1 = 0.0, A2 = 0.0, A3 = 0.0;                  // residual detunings
    double T = 250.0;                                     // segment duration
};

struct CellOperators {
    Matrix H0;       // drift: excitation-conserving dipole couplings + residual detunings
    Matrix P_omega;  // field perturbation pattern: single spin flips, zero diagonal
    Matrix P_S;      // Stark perturbation pattern: diagonal level shifts
};

enum class Perturbation { S, omega };

// Builds the three 8x8 cell operators.  H0 couples equal-excitation states
// whose indices differ in exactly two bits (entry D_ij for the two flipped
// atoms) and carries the residual detunings on its diagonal; P_omega couples
// states differing in exactly one bit (entry V_i for the flipped atom); P_S is
// diagonal with the summed Stark shifts of the excited atoms.  Both
// perturbation patterns are normalized to reference control strength 1, so a
// segment Hamiltonian is H0 + C * P.
CellOperators build_cell_operators(const CellParams& p);

// exp(-i (H0 + C * P) T) for the selected perturbation pattern.
Matrix segment_propagator(const CellOperators& ops, Perturbation which, double C, double T);

}  // namespace nhqc
