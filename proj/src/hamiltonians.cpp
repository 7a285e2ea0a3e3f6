#include "nhqc/hamiltonians.hpp"

#include <bit>

#include "nhqc/errors.hpp"

namespace nhqc {

CellOperators build_cell_operators(const CellParams& p) {
    // Coupling between the pair of atoms occupying bit positions (lo, hi).
    const auto pair_coupling = [&p](int lo, int hi) {
        if (lo == 0 && hi == 1) return p.D12;
        if (lo == 1 && hi == 2) return p.D23;
        return p.D13;  // lo == 0, hi == 2
    };
    const double A[3] = {p.A1, p.A2, p.A3};
    const double V[3] = {p.V1, p.V2, p.V3};
    const double Delta[3] = {p.Delta1, p.Delta2, p.Delta3};

    CellOperators ops;
    ops.H0 = Matrix::Zero(8, 8);
    ops.P_omega = Matrix::Zero(8, 8);
    ops.P_S = Matrix::Zero(8, 8);
    for (unsigned x = 0; x < 8; ++x) {
        for (unsigned y = 0; y < 8; ++y) {
            if (x == y || std::popcount(x) != std::popcount(y)) continue;
            const unsigned z = x ^ y;
            if (std::popcount(z) != 2) continue;
            // The two flipped bits identify the atom pair exchanging excitation.
            const int lo = std::countr_zero(z);
            const int hi = std::bit_width(z) - 1;
            ops.H0(x, y) = pair_coupling(lo, hi);
        }
        for (int r = 0; r < 3; ++r) {
            ops.P_omega(x, x ^ (1u << r)) = V[r];
            if ((x >> r) & 1u) {
                ops.H0(x, x) += A[r];
                ops.P_S(x, x) += Delta[r];
            }
        }
    }
    return ops;
}

Matrix segment_propagator(const CellOperators& ops, Perturbation which, double C, double T) {
    const Matrix& P = (which == Perturbation::S) ? ops.P_S : ops.P_omega;
    return expm_hermitian(ops.H0 + C * P, T);
}

}  // namespace nhqc
