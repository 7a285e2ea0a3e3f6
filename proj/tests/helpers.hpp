#pragma once

// Shared fixtures for the unit suites: deterministic random matrices and the
// one expensive object several suites reuse (a verified root-of-identity
// sequence at the default operating point).

#include <complex>
#include <random>

#include "nhqc/hamiltonians.hpp"
#include "nhqc/linalg.hpp"
#include "nhqc/synthesis.hpp"

namespace nhqc::testing {

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline Matrix random_complex(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            M(r, c) = complexd(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    return M;
}

inline Matrix random_hermitian(int dim, std::uint64_t seed) {
    const Matrix A = random_complex(dim, dim, seed);
    return 0.5 * (A + A.adjoint());
}

inline Matrix random_unitary(int dim, std::uint64_t seed) {
    const Eigen::HouseholderQR<Matrix> qr(random_complex(dim, dim, seed));
    Matrix Q = qr.householderQ();
    // Fix the phase freedom of QR so the result is a deterministic function
    // of the seed.
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c) {
        const complexd d = R(c, c);
        if (std::abs(d) > 0.0) Q.col(c) *= d / std::abs(d);
    }
    return Q;
}

inline Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            K.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
    return K;
}

inline Matrix pauli(int alpha) {
    Matrix s(2, 2);
    switch (alpha) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, complexd(0, -1), complexd(0, 1), 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}

// Root-of-identity sequence for the default cell, found once per process and
// shared by every test that needs a synthesis base point.
inline const IdentityResult& shared_identity_root() {
    static const IdentityResult root = [] {
        const CellOperators ops = build_cell_operators(CellParams{});
        return find_identity_sequence(ops, 1, CellParams{}.T);
    }();
    return root;
}

inline const CellOperators& default_ops() {
    static const CellOperators ops = build_cell_operators(CellParams{});
    return ops;
}

}  // namespace nhqc::testing
