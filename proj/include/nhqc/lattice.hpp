#pragma once

#include <array>
#include <functional>
#include <vector>

#include "nhqc/device.hpp"
#include "nhqc/linalg.hpp"

namespace nhqc {

// Real coefficients of an 8x8 Hermitian operator in the 64-element tensor
// basis {I, X, Y, Z}^3.  Index layout: c[16*a3 + 4*a2 + a1] multiplies
// sigma_{a3} x sigma_{a2} x sigma_{a1}, where slot r is the triad's r-th
// listed atom (local bit r-1) and alpha in {0:I, 1:X, 2:Y, 3:Z}.
struct PauliDecomposition {
    std::array<double, 64> c{};

    double identity_offset() const { return c[0]; }
    double& one_body(int slot, int alpha);             // slot in {1,2,3}, alpha in {1,2,3}
    double& two_body(int si, int sj, int ai, int aj);  // distinct slots, alphas in {1,2,3}
    double& three_body(int a1, int a2, int a3);        // alphas in {1,2,3}
    double one_body(int slot, int alpha) const;
    double two_body(int si, int sj, int ai, int aj) const;
    double three_body(int a1, int a2, int a3) const;
};

// sigma_{a3} x sigma_{a2} x sigma_{a1} for alphas in {0:I, 1:X, 2:Y, 3:Z}.
Matrix pauli_basis_element(int a3, int a2, int a1);

// Trace projection: coefficient = tr(H * basis element) / 8.  Exact inverse
// pair with pauli_reconstruct.
PauliDecomposition pauli_decompose(const Matrix& H);
Matrix pauli_reconstruct(const PauliDecomposition& d);

// Three period partitions of a rows x cols lattice into triads.  Atoms are
// numbered 1..n in row-major order and read as a cyclic chain; period p
// groups chain positions (3k+p, 3k+p+1, 3k+p+2) mod n, so every
// chain-adjacent pair shares a triad in at least one period and the grouping
// repeats with period 3.  Every triad is listed in ascending atom order; the
// listing is the slot assignment for that triad's coefficient tables.
struct RegroupSchedule {
    int rows = 0, cols = 0;
    std::array<std::vector<std::array<int, 3>>, 3> periods;

    int n_atoms() const { return rows * cols; }
};

// Throws structural_error unless rows * cols is divisible by 3.
RegroupSchedule regroup_schedule(int rows, int cols);

// Per-step coefficient source: (step index, period = step mod 3, triad index)
// -> decomposition of that triad's Hamiltonian.
using CoefficientFn = std::function<PauliDecomposition(int step, int period, int triad)>;

// Trotterized field emulation: step t applies exp(-i H_{q,p} epsilon) for
// every triad q of period p = t mod 3 (the triads of one period are disjoint,
// so their exponentials commute).  Over whole period cycles this approximates
// evolution under the average Hamiltonian sum_{p,q} H_{q,p} / 3 with a
// first-order splitting defect O(epsilon).  Throws resource_error when the
// lattice exceeds 12 atoms.
RegisterState emulate_field(const RegroupSchedule& schedule, const CoefficientFn& coeffs,
                            double epsilon, int steps, const RegisterState& initial);

}  // namespace nhqc
