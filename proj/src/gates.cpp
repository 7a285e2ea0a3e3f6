#include "nhqc/gates.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nhqc/errors.hpp"

namespace nhqc {

namespace {

void require_qubit(int q) {
    if (q < 1 || q > 3)
        throw structural_error("cell qubit index must be 1, 2, or 3; got " + std::to_string(q));
}

void require_pair(int i, int j) {
    require_qubit(i);
    require_qubit(j);
    if (i == j) throw structural_error("gate needs two distinct qubits, got twice qubit " +
                                       std::to_string(i));
}

int bit_of(int q) { return q - 1; }

int swap_bits(int x, int bi, int bj) {
    const int vi = (x >> bi) & 1;
    const int vj = (x >> bj) & 1;
    int y = x & ~((1 << bi) | (1 << bj));
    return y | (vi << bj) | (vj << bi);
}

// Full 8x8 permutation matrix exchanging the states of two qubits.
Matrix swap_matrix(int i, int j) {
    Matrix M = Matrix::Zero(8, 8);
    for (int x = 0; x < 8; ++x) M(swap_bits(x, bit_of(i), bit_of(j)), x) = 1.0;
    return M;
}

// Balanced beam splitter on one qubit: |0> -> (|0>+|1>)/sqrt2,
// |1> -> (|0>-|1>)/sqrt2, identity on the other two.
Matrix split_matrix(int q) {
    const int bit = 1 << bit_of(q);
    const double s = 1.0 / std::sqrt(2.0);
    Matrix M = Matrix::Zero(8, 8);
    for (int x = 0; x < 8; ++x) {
        const bool set = (x & bit) != 0;
        M(x, x) = set ? -s : s;
        M(x ^ bit, x) = s;
    }
    return M;
}

Matrix toffoli_matrix() {
    Matrix M = Matrix::Identity(8, 8);
    M(6, 6) = M(7, 7) = 0.0;
    M(6, 7) = M(7, 6) = 1.0;
    return M;
}

Matrix cond_phase_matrix(int i, int j, double phi) {
    const int mask = (1 << bit_of(i)) | (1 << bit_of(j));
    Matrix M = Matrix::Identity(8, 8);
    for (int x = 0; x < 8; ++x)
        if ((x & mask) == mask) M(x, x) = std::exp(complexd(0.0, phi));
    return M;
}

}  // namespace

GateSpec GateSpec::Toffoli() { return {Kind::toffoli, 0, 0, 0.0}; }

GateSpec GateSpec::Perm(int i, int j) { return {Kind::perm, i, j, 0.0}; }

GateSpec GateSpec::Split(int q) { return {Kind::split, q, 0, 0.0}; }

GateSpec GateSpec::CondPhase(int i, int j, double phi) { return {Kind::cond_phase, i, j, phi}; }

Matrix gate_matrix(const GateSpec& spec) {
    switch (spec.kind) {
        case GateSpec::Kind::toffoli:
            return toffoli_matrix();
        case GateSpec::Kind::perm:
            require_pair(spec.q1, spec.q2);
            return swap_matrix(spec.q1, spec.q2);
        case GateSpec::Kind::split:
            require_qubit(spec.q1);
            return split_matrix(spec.q1);
        case GateSpec::Kind::cond_phase:
            require_pair(spec.q1, spec.q2);
            return cond_phase_matrix(spec.q1, spec.q2, spec.phi);
    }
    throw structural_error("unknown gate kind");
}

GateGenerator gate_generator(const GateSpec& spec) {
    constexpr double pi = std::numbers::pi;
    const Matrix I = Matrix::Identity(8, 8);
    switch (spec.kind) {
        case GateSpec::Kind::toffoli: {
            // Projector onto (|110> - |111>)/sqrt2; I - 2P exchanges the pair.
            Matrix P = Matrix::Zero(8, 8);
            P(6, 6) = P(7, 7) = 0.5;
            P(6, 7) = P(7, 6) = -0.5;
            return {P, pi};
        }
        case GateSpec::Kind::perm: {
            require_pair(spec.q1, spec.q2);
            return {(I - swap_matrix(spec.q1, spec.q2)) / 2.0, pi};
        }
        case GateSpec::Kind::split: {
            require_qubit(spec.q1);
            return {(I - split_matrix(spec.q1)) / 2.0, pi};
        }
        case GateSpec::Kind::cond_phase: {
            require_pair(spec.q1, spec.q2);
            if (spec.phi == 0.0) return {Matrix::Zero(8, 8), 0.0};
            const int mask = (1 << bit_of(spec.q1)) | (1 << bit_of(spec.q2));
            const double sign = (spec.phi > 0.0) ? 1.0 : -1.0;
            Matrix H = Matrix::Zero(8, 8);
            for (int x = 0; x < 8; ++x)
                if ((x & mask) == mask) H(x, x) = -sign;
            return {H, std::abs(spec.phi)};
        }
    }
    throw structural_error("unknown gate kind");
}

}  // namespace nhqc
