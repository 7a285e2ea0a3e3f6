#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nhqc/controllability.hpp"
#include "nhqc/errors.hpp"
#include "nhqc/oracles.hpp"

using namespace nhqc;
using nhqc::testing::pauli;
using nhqc::testing::random_unitary;

TEST_SUITE("controllability") {
    TEST_CASE("single generator closes on itself") {
        const ClosureReport report = lie_closure({pauli(1)});
        CHECK(report.dim_reached == 1);
        CHECK(report.target_dim == 4);
        CHECK(report.generations_used == 1);
        CHECK(report.verdict == "not fully controllable");
    }

    TEST_CASE("two anticommuting spin axes span su(2)") {
        const ClosureReport report = lie_closure({pauli(3), pauli(1)});
        CHECK(report.dim_reached == 3);
        CHECK(report.target_dim == 4);
        CHECK(report.basis.size() == 3);
        // Traceless generators can never produce the identity direction, so
        // N^2 - 1 is both the ceiling and, here, the achieved dimension.
        CHECK(report.verdict == "controllable up to global phase");
    }

    TEST_CASE("default cell operators generate the full algebra") {
        const CellOperators& ops = nhqc::testing::default_ops();
        const ClosureReport report = lie_closure({ops.H0, ops.P_omega, ops.P_S});
        CHECK(report.dim_reached == 64);
        CHECK(report.target_dim == 64);
        CHECK(report.verdict == "completely controllable");
        CHECK(report.generations_used >= 2);

        // Independent rank count of the admitted basis.
        CHECK(oracles::stacked_rank(report.basis, 1e-10) == 64);

        // The basis is orthonormal under Re tr(A^dag B) ...
        for (std::size_t a = 0; a < report.basis.size(); ++a)
            for (std::size_t b = a; b < report.basis.size(); ++b) {
                const double inner =
                    (report.basis[a].adjoint() * report.basis[b]).trace().real();
                CHECK(std::abs(inner - (a == b ? 1.0 : 0.0)) < 1e-10);
            }

        // ... and contains every generator: i G re-expands exactly.
        for (const Matrix* g : {&ops.H0, &ops.P_omega, &ops.P_S}) {
            Matrix residual = complexd(0.0, 1.0) * (*g);
            for (const Matrix& b : report.basis)
                residual -= (b.adjoint() * residual).trace().real() * b;
            CHECK(residual.norm() < 1e-8 * g->norm());
        }
    }

    TEST_CASE("closure dimension is a property of the set, not its presentation") {
        const CellOperators& ops = nhqc::testing::default_ops();
        const ClosureReport base = lie_closure({ops.H0, ops.P_omega, ops.P_S});

        const ClosureReport reordered = lie_closure({ops.P_S, ops.H0, ops.P_omega});
        CHECK(reordered.dim_reached == base.dim_reached);

        const Matrix Q = random_unitary(8, 91);
        const ClosureReport conjugated = lie_closure({Q * ops.H0 * Q.adjoint(),
                                                      Q * ops.P_omega * Q.adjoint(),
                                                      Q * ops.P_S * Q.adjoint()});
        CHECK(conjugated.dim_reached == base.dim_reached);
        CHECK(conjugated.verdict == base.verdict);
    }

    TEST_CASE("malformed generator sets are rejected") {
        CHECK_THROWS_AS(lie_closure({}), structural_error);
        CHECK_THROWS_AS(lie_closure({pauli(1), Matrix::Identity(3, 3)}), structural_error);
        CHECK_THROWS_AS(lie_closure({nhqc::testing::random_complex(2, 2, 92)}),
                        structural_error);
    }
}
