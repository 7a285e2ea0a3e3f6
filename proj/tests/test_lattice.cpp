#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "nhqc/errors.hpp"
#include "nhqc/lattice.hpp"
#include "nhqc/oracles.hpp"

using namespace nhqc;
using nhqc::testing::kron;
using nhqc::testing::pauli;

namespace {

RegisterState random_state(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RegisterState state;
    state.n = n;
    state.amplitudes = Vector(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
        state.amplitudes(i) = complexd(nhqc::testing::uniform01(rng) - 0.5,
                                       nhqc::testing::uniform01(rng) - 0.5);
    state.amplitudes /= state.amplitudes.norm();
    return state;
}

PauliDecomposition random_decomposition(std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    PauliDecomposition d;
    for (double& c : d.c) c = scale * (nhqc::testing::uniform01(rng) - 0.5);
    return d;
}

bool shares_triad(const RegroupSchedule& schedule, int a, int b) {
    for (const auto& period : schedule.periods)
        for (const auto& t : period) {
            const bool has_a = (t[0] == a || t[1] == a || t[2] == a);
            const bool has_b = (t[0] == b || t[1] == b || t[2] == b);
            if (has_a && has_b) return true;
        }
    return false;
}

}  // namespace

TEST_SUITE("lattice") {
    TEST_CASE("tensor basis elements") {
        CHECK((pauli_basis_element(0, 0, 0) - Matrix::Identity(8, 8)).norm() == 0.0);
        // Slot 1 is the least significant factor.
        CHECK((pauli_basis_element(0, 0, 1) - kron(pauli(0), kron(pauli(0), pauli(1))))
                  .norm() == 0.0);
        CHECK((pauli_basis_element(3, 2, 1) - kron(pauli(3), kron(pauli(2), pauli(1))))
                  .norm() == 0.0);

        // Orthogonality under the trace inner product: tr(B^dag B') = 8 delta.
        for (int i = 0; i < 64; ++i) {
            const Matrix Bi = pauli_basis_element(i >> 4, (i >> 2) & 3, i & 3);
            for (int j = i; j < 64; ++j) {
                const Matrix Bj = pauli_basis_element(j >> 4, (j >> 2) & 3, j & 3);
                const complexd inner = (Bi.adjoint() * Bj).trace();
                CHECK(std::abs(inner - complexd(i == j ? 8.0 : 0.0)) < 1e-13);
            }
        }

        CHECK_THROWS_AS(pauli_basis_element(0, 0, 4), structural_error);
        CHECK_THROWS_AS(pauli_basis_element(-1, 0, 0), structural_error);
    }

    TEST_CASE("decomposition picks out single operators") {
        // sigma_z on the first triad slot: exactly one coefficient.
        const PauliDecomposition z1 = pauli_decompose(pauli_basis_element(0, 0, 3));
        CHECK(z1.one_body(1, 3) == doctest::Approx(1.0).epsilon(1e-14));
        double off_sum = 0.0;
        for (int i = 0; i < 64; ++i)
            if (i != 3) off_sum += std::abs(z1.c[static_cast<std::size_t>(i)]);
        CHECK(off_sum < 1e-13);

        // The identity decomposes to the offset alone.
        const PauliDecomposition id = pauli_decompose(Matrix::Identity(8, 8));
        CHECK(id.identity_offset() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(id.one_body(2, 1) == doctest::Approx(0.0).epsilon(1e-14));

        CHECK_THROWS_AS(pauli_decompose(Matrix::Identity(4, 4)), structural_error);
    }

    TEST_CASE("decomposition accessors address the coefficient table") {
        PauliDecomposition d;
        d.one_body(2, 2) = 0.5;
        CHECK(d.c[8] == 0.5);  // 4 * alpha with slot 2 in the middle position
        d.two_body(1, 2, 1, 2) = 0.7;
        CHECK(d.c[9] == 0.7);  // a2 = 2, a1 = 1
        d.two_body(3, 1, 3, 2) = -0.2;
        CHECK(d.c[50] == -0.2);  // a3 = 3, a1 = 2
        d.three_body(1, 2, 3) = 0.3;
        CHECK(d.c[57] == 0.3);  // 16*3 + 4*2 + 1

        // Slot order is immaterial for two-body terms.
        CHECK(d.two_body(2, 1, 2, 1) == 0.7);

        // The reconstruction honors the same layout.
        const Matrix H = pauli_reconstruct(d);
        const Matrix manual = 0.5 * pauli_basis_element(0, 2, 0) +
                              0.7 * pauli_basis_element(0, 2, 1) +
                              -0.2 * pauli_basis_element(3, 0, 2) +
                              0.3 * pauli_basis_element(3, 2, 1);
        CHECK((H - manual).norm() < 1e-14);

        CHECK_THROWS_AS(d.one_body(0, 1), structural_error);
        CHECK_THROWS_AS(d.one_body(1, 0), structural_error);
        CHECK_THROWS_AS(d.two_body(1, 1, 2, 3), structural_error);
        CHECK_THROWS_AS(d.three_body(1, 2, 4), structural_error);
    }

    TEST_CASE("decompose and reconstruct invert each other") {
        const Matrix H = nhqc::testing::random_hermitian(8, 111);
        const Matrix rebuilt = pauli_reconstruct(pauli_decompose(H));
        CHECK((rebuilt - H).norm() < 1e-13);
        CHECK_NOTHROW(require_hermitian(rebuilt));

        const PauliDecomposition d = random_decomposition(112, 1.0);
        const PauliDecomposition back = pauli_decompose(pauli_reconstruct(d));
        for (int i = 0; i < 64; ++i)
            CHECK(back.c[static_cast<std::size_t>(i)] ==
                  doctest::Approx(d.c[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }

    TEST_CASE("regrouping schedule tiles the chain three ways") {
        const RegroupSchedule line = regroup_schedule(1, 3);
        CHECK(line.n_atoms() == 3);
        for (const auto& period : line.periods) {
            REQUIRE(period.size() == 1);
            CHECK(std::set<int>(period[0].begin(), period[0].end()) ==
                  std::set<int>{1, 2, 3});
        }

        const RegroupSchedule grid = regroup_schedule(3, 3);
        CHECK(grid.n_atoms() == 9);
        for (const auto& period : grid.periods) {
            REQUIRE(period.size() == 3);
            std::set<int> covered;
            for (const auto& t : period)
                for (int a : t) CHECK(covered.insert(a).second);
            CHECK(covered == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
        }
        CHECK(grid.periods[0][0] == std::array<int, 3>{1, 2, 3});
        CHECK(grid.periods[1][0] == std::array<int, 3>{2, 3, 4});
        CHECK(grid.periods[2][0] == std::array<int, 3>{3, 4, 5});

        // Every chain-adjacent pair (cyclically) shares a triad somewhere.
        for (int a = 1; a <= 9; ++a) CHECK(shares_triad(grid, a, a % 9 + 1));

        CHECK_THROWS_AS(regroup_schedule(2, 2), structural_error);
        CHECK_THROWS_AS(regroup_schedule(0, 3), structural_error);
        CHECK_THROWS_AS(regroup_schedule(1, -3), structural_error);
    }

    TEST_CASE("field emulation basics") {
        const RegroupSchedule line = regroup_schedule(1, 3);
        const RegisterState psi = random_state(3, 113);

        // Zero coefficients leave the state alone.
        const CoefficientFn zero = [](int, int, int) { return PauliDecomposition{}; };
        CHECK((emulate_field(line, zero, 0.1, 12, psi).amplitudes - psi.amplitudes).norm() <
              1e-13);
        CHECK((emulate_field(line, zero, 0.1, 0, psi).amplitudes - psi.amplitudes).norm() ==
              0.0);

        // An identity offset only turns a global phase.
        PauliDecomposition offset;
        offset.c[0] = 0.4;
        const CoefficientFn offs = [&offset](int, int, int) { return offset; };
        const RegisterState phased = emulate_field(line, offs, 0.05, 9, psi);
        const complexd expected_phase = std::exp(complexd(0.0, -0.4 * 0.05 * 9));
        CHECK((phased.amplitudes - expected_phase * psi.amplitudes).norm() < 1e-12);

        // The coefficient source is consulted with period = step mod 3 and a
        // triad index inside that period's partition.
        std::vector<std::array<int, 3>> calls;
        const CoefficientFn recording = [&calls](int step, int period, int triad) {
            calls.push_back({step, period, triad});
            return PauliDecomposition{};
        };
        emulate_field(line, recording, 0.1, 7, psi);
        REQUIRE(calls.size() == 7);
        for (int t = 0; t < 7; ++t) {
            CHECK(calls[static_cast<std::size_t>(t)][0] == t);
            CHECK(calls[static_cast<std::size_t>(t)][1] == t % 3);
            CHECK(calls[static_cast<std::size_t>(t)][2] == 0);
        }

        CHECK_THROWS_AS(emulate_field(line, zero, 0.0, 3, psi), structural_error);
        CHECK_THROWS_AS(emulate_field(line, zero, 0.1, -1, psi), structural_error);
        CHECK_THROWS_AS(emulate_field(line, zero, 0.1, 3, random_state(2, 114)),
                        structural_error);
        CHECK_THROWS_AS(
            emulate_field(regroup_schedule(3, 5), zero, 0.1, 1, random_state(15, 115)),
            resource_error);
    }

    TEST_CASE("a single constant triad evolves exactly") {
        // With one triad per period and step-independent coefficients, the
        // emulation is exp(-i H epsilon)^steps = exp(-i H epsilon steps).
        const RegroupSchedule line = regroup_schedule(1, 3);
        const PauliDecomposition d = random_decomposition(116, 0.3);
        const Matrix H = pauli_reconstruct(d);
        const CoefficientFn constant = [&d](int, int, int) { return d; };

        const RegisterState psi = random_state(3, 117);
        const RegisterState out = emulate_field(line, constant, 0.05, 40, psi);
        const Vector exact = oracles::expm_taylor(H, 0.05 * 40) * psi.amplitudes;
        CHECK((out.amplitudes - exact).norm() < 1e-10);
    }

    TEST_CASE("splitting defect shrinks first order with the step size") {
        // Three alternating triad Hamiltonians on the 1x3 chain approximate
        // their average; halving epsilon (at fixed total time) must shrink
        // the defect by about half.
        const RegroupSchedule line = regroup_schedule(1, 3);
        std::array<PauliDecomposition, 3> table = {random_decomposition(118, 0.4),
                                                   random_decomposition(119, 0.4),
                                                   random_decomposition(120, 0.4)};
        const CoefficientFn by_period = [&table](int, int period, int) {
            return table[static_cast<std::size_t>(period)];
        };
        Matrix average = Matrix::Zero(8, 8);
        for (const auto& d : table) average += pauli_reconstruct(d);
        average /= 3.0;

        const RegisterState psi = random_state(3, 121);
        const double total = 3.0;
        const auto defect = [&](double epsilon) {
            const int steps = static_cast<int>(std::lround(total / epsilon));
            const RegisterState out = emulate_field(line, by_period, epsilon, steps, psi);
            return (out.amplitudes - oracles::expm_taylor(average, total) * psi.amplitudes)
                .norm();
        };
        const double coarse = defect(0.06);
        const double fine = defect(0.03);
        CHECK(coarse < 0.05);
        CHECK(fine < 0.65 * coarse);
    }

    TEST_CASE("long runs preserve the norm") {
        const RegroupSchedule grid = regroup_schedule(3, 3);
        const CoefficientFn wobble = [](int step, int period, int triad) {
            PauliDecomposition d = random_decomposition(
                1000 + static_cast<std::uint64_t>(step * 9 + period * 3 + triad), 0.5);
            d.c[0] = 0.0;
            return d;
        };
        const RegisterState psi = random_state(9, 122);
        const RegisterState out = emulate_field(grid, wobble, 0.01, 1000, psi);
        CHECK(std::abs(out.amplitudes.norm() - 1.0) < 1e-9);
    }
}
