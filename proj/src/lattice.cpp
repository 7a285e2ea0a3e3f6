#include "nhqc/lattice.hpp"

#include <algorithm>
#include <string>

#include "nhqc/errors.hpp"

namespace nhqc {

namespace {

void require_alpha(int alpha, bool allow_identity) {
    const int lo = allow_identity ? 0 : 1;
    if (alpha < lo || alpha > 3)
        throw structural_error("tensor-basis label must be in " +
                               std::string(allow_identity ? "0..3" : "1..3") + ", got " +
                               std::to_string(alpha));
}

void require_slot(int slot) {
    if (slot < 1 || slot > 3)
        throw structural_error("triad slot must be 1, 2, or 3, got " + std::to_string(slot));
}

int basis_index(int a3, int a2, int a1) { return 16 * a3 + 4 * a2 + a1; }

// Index with `alpha` in the given slot and identity elsewhere.
int slot_index(int slot, int alpha) {
    int labels[4] = {0, 0, 0, 0};  // labels[r] is the slot-r letter
    labels[slot] = alpha;
    return basis_index(labels[3], labels[2], labels[1]);
}

Matrix pauli_letter(int alpha) {
    Matrix s(2, 2);
    switch (alpha) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, complexd(0, -1), complexd(0, 1), 0; break;
        case 3: s << 1, 0, 0, -1; break;
        default: require_alpha(alpha, true);
    }
    return s;
}

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            K.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
    return K;
}

}  // namespace

double& PauliDecomposition::one_body(int slot, int alpha) {
    require_slot(slot);
    require_alpha(alpha, false);
    return c[static_cast<std::size_t>(slot_index(slot, alpha))];
}

double PauliDecomposition::one_body(int slot, int alpha) const {
    return const_cast<PauliDecomposition*>(this)->one_body(slot, alpha);
}

double& PauliDecomposition::two_body(int si, int sj, int ai, int aj) {
    require_slot(si);
    require_slot(sj);
    if (si == sj) throw structural_error("two-body term needs distinct slots");
    require_alpha(ai, false);
    require_alpha(aj, false);
    int labels[4] = {0, 0, 0, 0};
    labels[si] = ai;
    labels[sj] = aj;
    return c[static_cast<std::size_t>(basis_index(labels[3], labels[2], labels[1]))];
}

double PauliDecomposition::two_body(int si, int sj, int ai, int aj) const {
    return const_cast<PauliDecomposition*>(this)->two_body(si, sj, ai, aj);
}

double& PauliDecomposition::three_body(int a1, int a2, int a3) {
    require_alpha(a1, false);
    require_alpha(a2, false);
    require_alpha(a3, false);
    return c[static_cast<std::size_t>(basis_index(a3, a2, a1))];
}

double PauliDecomposition::three_body(int a1, int a2, int a3) const {
    return const_cast<PauliDecomposition*>(this)->three_body(a1, a2, a3);
}

Matrix pauli_basis_element(int a3, int a2, int a1) {
    require_alpha(a3, true);
    require_alpha(a2, true);
    require_alpha(a1, true);
    return kron(pauli_letter(a3), kron(pauli_letter(a2), pauli_letter(a1)));
}

PauliDecomposition pauli_decompose(const Matrix& H) {
    require_hermitian(H);
    if (H.rows() != 8) throw structural_error("tensor decomposition expects an 8x8 operator");
    PauliDecomposition d;
    for (int a3 = 0; a3 < 4; ++a3)
        for (int a2 = 0; a2 < 4; ++a2)
            for (int a1 = 0; a1 < 4; ++a1) {
                const complexd overlap = (H * pauli_basis_element(a3, a2, a1)).trace();
                d.c[static_cast<std::size_t>(basis_index(a3, a2, a1))] = overlap.real() / 8.0;
            }
    return d;
}

Matrix pauli_reconstruct(const PauliDecomposition& d) {
    Matrix H = Matrix::Zero(8, 8);
    for (int a3 = 0; a3 < 4; ++a3)
        for (int a2 = 0; a2 < 4; ++a2)
            for (int a1 = 0; a1 < 4; ++a1)
                H += d.c[static_cast<std::size_t>(basis_index(a3, a2, a1))] *
                     pauli_basis_element(a3, a2, a1);
    return H;
}

RegroupSchedule regroup_schedule(int rows, int cols) {
    if (rows < 1 || cols < 1)
        throw structural_error("lattice dimensions must be positive");
    const int n = rows * cols;
    if (n % 3 != 0)
        throw structural_error("lattice of " + std::to_string(n) +
                               " atoms cannot be partitioned into triads");
    RegroupSchedule schedule;
    schedule.rows = rows;
    schedule.cols = cols;
    // Row-major order read as a cyclic chain; period p starts the grouping at
    // chain offset p, so consecutive periods shift the triad boundaries by one
    // and every adjacent pair is interior to a triad somewhere.  Each triad is
    // listed in ascending atom order: the listing fixes which atom each
    // coefficient slot addresses, and a canonical order keeps a coefficient
    // table meaningful across periods (on the 3-atom chain every period
    // regroups the same triad, which must therefore read identically).
    for (int p = 0; p < 3; ++p)
        for (int k = 0; k < n / 3; ++k) {
            std::array<int, 3> triad = {(3 * k + p) % n + 1, (3 * k + p + 1) % n + 1,
                                        (3 * k + p + 2) % n + 1};
            std::sort(triad.begin(), triad.end());
            schedule.periods[static_cast<std::size_t>(p)].push_back(triad);
        }
    return schedule;
}

RegisterState emulate_field(const RegroupSchedule& schedule, const CoefficientFn& coeffs,
                            double epsilon, int steps, const RegisterState& initial) {
    const int n = schedule.n_atoms();
    if (n > 12)
        throw resource_error("lattice emulation is capped at 12 atoms, got " +
                             std::to_string(n));
    if (initial.n != n)
        throw structural_error("initial register has " + std::to_string(initial.n) +
                               " atoms, lattice has " + std::to_string(n));
    if (steps < 0) throw structural_error("step count must be nonnegative");
    if (!(epsilon > 0.0)) throw structural_error("step size must be positive");
    require_normalized(initial);

    RegisterState state = initial;
    for (int t = 0; t < steps; ++t) {
        const int p = t % 3;
        const auto& triads = schedule.periods[static_cast<std::size_t>(p)];
        for (std::size_t q = 0; q < triads.size(); ++q) {
            const PauliDecomposition d = coeffs(t, p, static_cast<int>(q));
            const Matrix H = pauli_reconstruct(d);
            const Matrix U = expm_hermitian(H, epsilon);
            // Slot r of the decomposition is the triad's r-th listed atom at
            // local bit r-1; the cell-op embedding lists most significant
            // first, so the triad goes in reversed.
            state = apply_cell_op(state, {triads[q][2], triads[q][1], triads[q][0]}, U);
        }
    }
    return state;
}

}  // namespace nhqc
