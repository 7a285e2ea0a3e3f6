#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "nhqc/errors.hpp"
#include "nhqc/gates.hpp"

using namespace nhqc;

namespace {

constexpr double pi = std::numbers::pi;

// Basis index with the bit of qubit q set.
int bit(int q) { return 1 << (q - 1); }

}  // namespace

TEST_SUITE("gates") {
    TEST_CASE("Toffoli swaps the two doubly-controlled states") {
        const Matrix U = gate_matrix(GateSpec::Toffoli());
        for (int x = 0; x < 6; ++x) CHECK(U(x, x) == complexd(1.0));
        CHECK(U(6, 7) == complexd(1.0));  // |110> <-> |111>: target atom 1 flips
        CHECK(U(7, 6) == complexd(1.0));
        CHECK(U(6, 6) == complexd(0.0));
        CHECK((U * U - Matrix::Identity(8, 8)).norm() == 0.0);
    }

    TEST_CASE("state permutations swap qubit pairs") {
        const Matrix p12 = gate_matrix(GateSpec::Perm(1, 2));
        // |010> (qubit 2 excited) becomes |001> (qubit 1 excited).
        CHECK(p12(bit(1), bit(2)) == complexd(1.0));
        CHECK(p12(bit(2), bit(1)) == complexd(1.0));
        CHECK(p12(0, 0) == complexd(1.0));
        CHECK(p12(7, 7) == complexd(1.0));
        CHECK((p12 * p12 - Matrix::Identity(8, 8)).norm() == 0.0);

        // Exhaustive bit-swap action for every pair.
        for (int i = 1; i <= 3; ++i)
            for (int j = i + 1; j <= 3; ++j) {
                const Matrix p = gate_matrix(GateSpec::Perm(i, j));
                for (int x = 0; x < 8; ++x) {
                    const int bi = (x >> (i - 1)) & 1, bj = (x >> (j - 1)) & 1;
                    const int y = (x & ~bit(i) & ~bit(j)) | (bj << (i - 1)) | (bi << (j - 1));
                    CHECK(p(y, x) == complexd(1.0));
                }
            }
    }

    TEST_CASE("balanced splitter") {
        const double s = 1.0 / std::sqrt(2.0);
        const Matrix U = gate_matrix(GateSpec::Split(1));
        // |0> -> (|0> + |1>)/sqrt2, |1> -> (|0> - |1>)/sqrt2 on the qubit.
        CHECK(U(0, 0) == complexd(s));
        CHECK(U(1, 0) == complexd(s));
        CHECK(U(0, 1) == complexd(s));
        CHECK(U(1, 1) == complexd(-s));
        CHECK(U(2, 0) == complexd(0.0));
        CHECK((U * U - Matrix::Identity(8, 8)).norm() < 1e-15);

        // The untouched qubits factor out: the action repeats blockwise.
        CHECK(U(6, 6) == complexd(-s));
        CHECK(U(6, 7) == complexd(s));

        const Matrix U3 = gate_matrix(GateSpec::Split(3));
        CHECK(U3(0, 4) == complexd(s));
        CHECK(U3(4, 4) == complexd(-s));
    }

    TEST_CASE("conditional phase marks only the doubly-excited states") {
        const double phi = 0.37;
        const Matrix U = gate_matrix(GateSpec::CondPhase(1, 2, phi));
        const complexd mark = std::exp(complexd(0.0, phi));
        for (int x = 0; x < 8; ++x) {
            const bool both = (x & bit(1)) && (x & bit(2));
            CHECK(U(x, x) == (both ? mark : complexd(1.0)));
        }
        CHECK((U - Matrix(U.diagonal().asDiagonal())).norm() == 0.0);

        // Inverse pair and the trivial angle.
        const Matrix Um = gate_matrix(GateSpec::CondPhase(1, 2, -phi));
        CHECK((U * Um - Matrix::Identity(8, 8)).norm() < 1e-15);
        CHECK((gate_matrix(GateSpec::CondPhase(2, 3, 0.0)) - Matrix::Identity(8, 8)).norm() ==
              0.0);
    }

    TEST_CASE("closed-form generators reproduce their gates") {
        std::vector<GateSpec> specs = {GateSpec::Toffoli(),
                                       GateSpec::Perm(1, 2),
                                       GateSpec::Perm(2, 3),
                                       GateSpec::Perm(1, 3),
                                       GateSpec::Split(1),
                                       GateSpec::Split(2),
                                       GateSpec::Split(3),
                                       GateSpec::CondPhase(1, 2, pi / 8),
                                       GateSpec::CondPhase(1, 3, -pi / 8),
                                       GateSpec::CondPhase(2, 3, 2.9)};
        for (const GateSpec& spec : specs) {
            const GateGenerator gen = gate_generator(spec);
            CHECK_NOTHROW(require_hermitian(gen.H_cal));
            CHECK(spectral_norm_hermitian(gen.H_cal) <= 1.0 + 1e-12);
            CHECK(gen.epsilon >= 0.0);
            CHECK(phase_aligned_distance(expm_hermitian(gen.H_cal, gen.epsilon),
                                         gate_matrix(spec)) < 1e-12);
        }
    }

    TEST_CASE("involutory gates use projector generators with angle pi") {
        for (const GateSpec& spec :
             {GateSpec::Toffoli(), GateSpec::Perm(1, 3), GateSpec::Split(2)}) {
            const GateGenerator gen = gate_generator(spec);
            CHECK(gen.epsilon == pi);
            // Idempotency is exact: the entries are dyadic rationals.
            CHECK((gen.H_cal * gen.H_cal - gen.H_cal).norm() == 0.0);
            // For a projector P, exp(-i pi P) = I - 2P with no approximation.
            CHECK((expm_hermitian(gen.H_cal, pi) -
                   (Matrix::Identity(8, 8) - 2.0 * gen.H_cal))
                      .norm() < 1e-14);
        }

        const GateGenerator toff = gate_generator(GateSpec::Toffoli());
        CHECK(toff.H_cal(6, 6) == complexd(0.5));
        CHECK(toff.H_cal(7, 7) == complexd(0.5));
        CHECK(toff.H_cal(6, 7) == complexd(-0.5));
        CHECK(toff.H_cal(7, 6) == complexd(-0.5));
        CHECK(toff.H_cal.cwiseAbs().sum() == doctest::Approx(2.0));  // nothing else
    }

    TEST_CASE("conditional-phase generator") {
        const double phi = pi / 8;
        for (double sign : {1.0, -1.0}) {
            const GateGenerator gen = gate_generator(GateSpec::CondPhase(1, 2, sign * phi));
            CHECK(gen.epsilon == phi);  // |phi|, whatever the sign
            // Diagonal pattern with -sign(phi) on the marked states.
            CHECK(gen.H_cal(3, 3) == complexd(-sign));
            CHECK(gen.H_cal(7, 7) == complexd(-sign));
            CHECK(gen.H_cal.cwiseAbs().sum() == 2.0);
        }

        const GateGenerator trivial = gate_generator(GateSpec::CondPhase(1, 2, 0.0));
        CHECK(trivial.epsilon == 0.0);
        CHECK(trivial.H_cal.norm() == 0.0);
    }

    TEST_CASE("malformed qubit indices are rejected") {
        CHECK_THROWS_AS(gate_matrix(GateSpec::Perm(1, 1)), structural_error);
        CHECK_THROWS_AS(gate_matrix(GateSpec::Perm(0, 2)), structural_error);
        CHECK_THROWS_AS(gate_matrix(GateSpec::Perm(1, 4)), structural_error);
        CHECK_THROWS_AS(gate_matrix(GateSpec::Split(0)), structural_error);
        CHECK_THROWS_AS(gate_matrix(GateSpec::Split(4)), structural_error);
        CHECK_THROWS_AS(gate_matrix(GateSpec::CondPhase(2, 2, 0.1)), structural_error);
        CHECK_THROWS_AS(gate_generator(GateSpec::CondPhase(3, 5, 0.1)), structural_error);
    }
}
