#include "nhqc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nhqc/errors.hpp"

namespace nhqc {

namespace {

constexpr double kPi = std::numbers::pi;

Perturbation parity_perturbation(int k) {
    // Segment k = 1 applies the Stark pattern; even k the field pattern.
    return (k % 2 == 1) ? Perturbation::S : Perturbation::omega;
}

// Eigendecomposition of one segment Hamiltonian, reused by the propagator,
// the derivative kernel, and their products.
struct SegmentFactor {
    Eigen::VectorXd w;
    Matrix V;
    const Matrix* P;
};

std::vector<SegmentFactor> segment_factors(const CellOperators& ops,
                                           const std::array<double, 64>& C) {
    std::vector<SegmentFactor> factors(64);
    for (int k = 0; k < 64; ++k) {
        const Matrix& P =
            (parity_perturbation(k + 1) == Perturbation::S) ? ops.P_S : ops.P_omega;
        Eigen::SelfAdjointEigenSolver<Matrix> es(ops.H0 + C[k] * P);
        factors[k] = {es.eigenvalues(), es.eigenvectors(), &P};
    }
    return factors;
}

Matrix factor_propagator(const SegmentFactor& f, double T) {
    Vector phases(f.w.size());
    for (Eigen::Index a = 0; a < f.w.size(); ++a)
        phases(a) = std::exp(complexd(0.0, -f.w(a) * T));
    return f.V * phases.asDiagonal() * f.V.adjoint();
}

// Divided-difference derivative of one segment propagator with respect to its
// control strength, from the precomputed eigendecomposition.
Matrix factor_derivative(const SegmentFactor& f, double T) {
    const Eigen::Index n = f.w.size();
    const Matrix Pt = f.V.adjoint() * (*f.P) * f.V;
    Matrix kernel(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const complexd ea = std::exp(complexd(0.0, -f.w(a) * T));
        for (Eigen::Index b = 0; b < n; ++b) {
            const double gap = f.w(a) - f.w(b);
            if (std::abs(gap) < default_tolerances.eigenvalue_gap)
                kernel(a, b) = complexd(0.0, -T) * ea;
            else
                kernel(a, b) = (ea - std::exp(complexd(0.0, -f.w(b) * T))) / gap;
        }
    }
    return f.V * kernel.cwiseProduct(Pt) * f.V.adjoint();
}

Matrix product_of_factors(const std::vector<SegmentFactor>& factors, double T) {
    Matrix U = Matrix::Identity(8, 8);
    for (const SegmentFactor& f : factors) U = factor_propagator(f, T) * U;
    return U;
}

Matrix single_pass_evolution(const CellOperators& ops, const std::array<double, 64>& C,
                             double T) {
    return product_of_factors(segment_factors(ops, C), T);
}

Matrix matrix_power(Matrix U, int m) {
    Matrix result = Matrix::Identity(U.rows(), U.cols());
    while (m > 0) {
        if (m & 1) result = U * result;
        U = U * U;
        m >>= 1;
    }
    return result;
}

ControlSequence sequence_from_strengths(const std::array<double, 64>& C, double T) {
    ControlSequence seq;
    seq.T = T;
    seq.segments.resize(64);
    for (int k = 1; k <= 64; ++k) seq.segments[k - 1] = {k, parity_perturbation(k), C[k - 1]};
    return seq;
}

void attach_positivity_warnings(ControlSequence& seq) {
    for (const Segment& s : seq.segments)
        if (s.C <= 0.0)
            seq.warnings.push_back("segment " + std::to_string(s.k) +
                                   " strength is nonpositive after refinement (C = " +
                                   std::to_string(s.C) + ")");
}

// Jacobian columns and the sequence unitary in one pass over the factors.
struct JacobianData {
    std::vector<Matrix> J;
    Matrix U;
};

JacobianData jacobian_data(const CellOperators& ops, const std::array<double, 64>& C,
                           double T) {
    const std::vector<SegmentFactor> factors = segment_factors(ops, C);
    std::vector<Matrix> prefix(65), suffix(65);
    prefix[0] = Matrix::Identity(8, 8);
    for (int k = 0; k < 64; ++k) prefix[k + 1] = factor_propagator(factors[k], T) * prefix[k];
    suffix[64] = Matrix::Identity(8, 8);
    for (int k = 63; k >= 0; --k) suffix[k] = suffix[k + 1] * factor_propagator(factors[k], T);

    JacobianData data;
    data.J.resize(64);
    for (int k = 0; k < 64; ++k)
        data.J[k] = suffix[k + 1] * factor_derivative(factors[k], T) * prefix[k];
    data.U = prefix[64];
    return data;
}

// Least-squares solve of A x = b with the columns of A given as matrices in
// skew-Hermitian coordinates.  Shared by solve_delta and the Newton iteration.
RVector least_squares_skew(const std::vector<Matrix>& columns, const Matrix& rhs,
                           double* condition) {
    RMatrix A(64, 64);
    for (int k = 0; k < 64; ++k) A.col(k) = skew_coordinates(columns[k]);
    const RVector b = skew_coordinates(rhs);
    Eigen::JacobiSVD<RMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    if (condition) *condition = cond;
    if (cond > default_tolerances.condition_limit)
        throw ill_conditioned_error(
            "control system condition number " + std::to_string(cond) +
                " exceeds the usable limit (poor base sequence)",
            cond);
    return svd.solve(b);
}

std::array<double, 64> shifted_strengths(const ControlSequence& base, const RVector& delta) {
    std::array<double, 64> C = base.strengths();
    for (int k = 0; k < 64; ++k) C[k] += delta(k);
    return C;
}

}  // namespace

std::array<double, 64> ControlSequence::strengths() const {
    std::array<double, 64> C{};
    for (std::size_t i = 0; i < segments.size() && i < 64; ++i) C[i] = segments[i].C;
    return C;
}

void validate_sequence(const ControlSequence& seq) {
    if (seq.segments.size() != 64)
        throw structural_error("control sequence must have exactly 64 segments, got " +
                               std::to_string(seq.segments.size()));
    for (int i = 0; i < 64; ++i) {
        const Segment& s = seq.segments[i];
        if (s.k != i + 1)
            throw structural_error("segment " + std::to_string(i) + " is numbered " +
                                   std::to_string(s.k) + ", expected " + std::to_string(i + 1));
        if (s.perturbation != parity_perturbation(s.k))
            throw structural_error("segment " + std::to_string(s.k) +
                                   " breaks the S/omega alternation (S at odd positions)");
    }
    if (!(seq.T > 0.0)) throw structural_error("segment duration must be positive");
    if (seq.repetitions < 1) throw structural_error("repetition count must be at least 1");
}

ControlSequence tile_eight(const std::array<double, 8>& C8, double T) {
    std::array<double, 64> C{};
    for (int k = 0; k < 64; ++k) C[k] = C8[k % 8];
    return sequence_from_strengths(C, T);
}

Matrix total_evolution(const CellOperators& ops, const ControlSequence& seq) {
    validate_sequence(seq);
    return matrix_power(single_pass_evolution(ops, seq.strengths(), seq.T), seq.repetitions);
}

double identity_objective_of(const Matrix& U8) {
    const Vector coeffs = char_poly(U8);
    // Target polynomial lambda^8 - 1: middle coefficients 0, constant term -1.
    double objective = 0.0;
    for (int j = 1; j <= 7; ++j) objective += std::norm(coeffs(j));
    objective += std::norm(coeffs(8) - complexd(-1.0, 0.0));
    return objective;
}

namespace {

Matrix eight_segment_unitary(const CellOperators& ops, const std::array<double, 8>& C8,
                             double T) {
    Matrix U = Matrix::Identity(8, 8);
    for (int k = 1; k <= 8; ++k) {
        const Matrix& P =
            (parity_perturbation(k) == Perturbation::S) ? ops.P_S : ops.P_omega;
        U = expm_hermitian(ops.H0 + C8[k - 1] * P, T) * U;
    }
    return U;
}

}  // namespace

double identity_objective(const CellOperators& ops, const std::array<double, 8>& C8,
                          double T) {
    return identity_objective_of(eight_segment_unitary(ops, C8, T));
}

namespace {

using Point8 = Eigen::Matrix<double, 8, 1>;

double boxed_objective(const CellOperators& ops, const Point8& x, double T) {
    // Keep the simplex away from nonpositive strengths with a steep penalty.
    double penalty = 0.0;
    for (int i = 0; i < 8; ++i)
        if (x(i) <= 0.0) penalty += 1.0 - x(i);
    if (penalty > 0.0) return 1e12 * penalty;
    std::array<double, 8> C8;
    for (int i = 0; i < 8; ++i) C8[i] = x(i);
    return identity_objective(ops, C8, T);
}

// Standard Nelder-Mead simplex descent (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2).  Returns the best vertex found.
std::pair<Point8, double> nelder_mead(const CellOperators& ops, const Point8& start, double T,
                                      double goal, int max_iters) {
    const auto f = [&](const Point8& x) { return boxed_objective(ops, x, T); };
    std::array<Point8, 9> xs;
    std::array<double, 9> fs;
    xs[0] = start;
    fs[0] = f(start);
    for (int i = 0; i < 8; ++i) {
        xs[i + 1] = start;
        xs[i + 1](i) += 0.25;
        fs[i + 1] = f(xs[i + 1]);
    }
    std::array<int, 9> order;
    for (int it = 0; it < max_iters; ++it) {
        for (int i = 0; i < 9; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        if (fs[order[0]] < goal) break;
        if (fs[order[8]] - fs[order[0]] < 1e-30) break;  // simplex collapsed

        Point8 centroid = Point8::Zero();
        for (int i = 0; i < 8; ++i) centroid += xs[order[i]];
        centroid /= 8.0;
        const int worst = order[8];

        const Point8 reflected = centroid + (centroid - xs[worst]);
        const double fr = f(reflected);
        if (fr < fs[order[0]]) {
            const Point8 expanded = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(expanded);
            if (fe < fr) {
                xs[worst] = expanded;
                fs[worst] = fe;
            } else {
                xs[worst] = reflected;
                fs[worst] = fr;
            }
        } else if (fr < fs[order[7]]) {
            xs[worst] = reflected;
            fs[worst] = fr;
        } else {
            const Point8 contracted = centroid + 0.5 * (xs[worst] - centroid);
            const double fc = f(contracted);
            if (fc < fs[worst]) {
                xs[worst] = contracted;
                fs[worst] = fc;
            } else {
                for (int i = 1; i < 9; ++i) {
                    xs[order[i]] = xs[order[0]] + 0.5 * (xs[order[i]] - xs[order[0]]);
                    fs[order[i]] = f(xs[order[i]]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i < 9; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best]};
}

// Residual vector of the coefficient fit: real and imaginary parts of
// c_j - t_j for j = 1..8 (16 real components).
Eigen::Matrix<double, 16, 1> coefficient_residual(const CellOperators& ops, const Point8& x,
                                                  double T) {
    std::array<double, 8> C8;
    for (int i = 0; i < 8; ++i) C8[i] = x(i);
    const Vector coeffs = char_poly(eight_segment_unitary(ops, C8, T));
    Eigen::Matrix<double, 16, 1> r;
    for (int j = 1; j <= 8; ++j) {
        const complexd target = (j == 8) ? complexd(-1.0, 0.0) : complexd(0.0, 0.0);
        r(j - 1) = (coeffs(j) - target).real();
        r(7 + j) = (coeffs(j) - target).imag();
    }
    return r;
}

// Levenberg-Marquardt polish of the coefficient residuals with a central
// finite-difference Jacobian.  The simplex gets close; this drives the
// objective far below the acceptance goal.
std::pair<Point8, double> gauss_newton_polish(const CellOperators& ops, Point8 x, double T,
                                              double goal, int max_iters) {
    const auto objective = [&](const Point8& p) {
        for (int i = 0; i < 8; ++i)
            if (p(i) <= 0.0) return std::numeric_limits<double>::infinity();
        return coefficient_residual(ops, p, T).squaredNorm();
    };
    double fx = objective(x);
    double lambda = 1e-8;
    const double h = 1e-6;
    for (int it = 0; it < max_iters && fx >= goal * 1e-6; ++it) {
        const Eigen::Matrix<double, 16, 1> r = coefficient_residual(ops, x, T);
        Eigen::Matrix<double, 16, 8> Jr;
        for (int j = 0; j < 8; ++j) {
            Point8 xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            Jr.col(j) = (coefficient_residual(ops, xp, T) - coefficient_residual(ops, xm, T)) /
                        (2.0 * h);
        }
        const Eigen::Matrix<double, 8, 8> JtJ = Jr.transpose() * Jr;
        const Eigen::Matrix<double, 8, 1> g = Jr.transpose() * r;
        bool stepped = false;
        for (int tries = 0; tries < 8; ++tries) {
            const Eigen::Matrix<double, 8, 8> M =
                JtJ + lambda * Eigen::Matrix<double, 8, 8>::Identity();
            const Point8 candidate = x - M.ldlt().solve(g);
            const double fc = objective(candidate);
            if (fc < fx) {
                x = candidate;
                fx = fc;
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }
    return {x, fx};
}

// Circular comparison of the eigenvalues of U(8T) against the eight distinct
// eighth roots of unity: every root must be claimed by exactly one eigenvalue
// within the phase tolerance.  Returns the worst phase deviation, or infinity
// when the matching is not a bijection.
double eighth_root_phase_error(const Matrix& U8) {
    Eigen::ComplexEigenSolver<Matrix> es(U8, false);
    std::array<bool, 8> claimed{};
    double worst = 0.0;
    for (int a = 0; a < 8; ++a) {
        const double phase = std::arg(es.eigenvalues()(a));
        const double scaled = phase / (2.0 * kPi / 8.0);
        const int m = ((static_cast<int>(std::lround(scaled)) % 8) + 8) % 8;
        double diff = phase - m * (2.0 * kPi / 8.0);
        if (diff > kPi) diff -= 2.0 * kPi;
        if (diff < -kPi) diff += 2.0 * kPi;
        if (claimed[m]) return std::numeric_limits<double>::infinity();
        claimed[m] = true;
        worst = std::max(worst, std::abs(diff));
    }
    return worst;
}

}  // namespace

IdentityResult find_identity_sequence(const CellOperators& ops, std::uint64_t seed, double T,
                                      const IdentityOptions& opt) {
    std::mt19937_64 rng(seed);
    // Explicit 53-bit scaling keeps the draw sequence identical across
    // standard libraries (distribution objects are not pinned by the standard).
    const auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };

    double best_objective = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < opt.max_restarts; ++trial) {
        Point8 start;
        for (int i = 0; i < 8; ++i) start(i) = uniform(opt.box_lo, opt.box_hi);

        auto [x, fx] = nelder_mead(ops, start, T, 1e-16, 2500);
        std::tie(x, fx) = gauss_newton_polish(ops, x, T, opt.objective_goal, 60);
        best_objective = std::min(best_objective, fx);
        if (!(fx < opt.objective_goal)) continue;

        bool positive = true;
        std::array<double, 8> C8;
        for (int i = 0; i < 8; ++i) {
            C8[i] = x(i);
            positive &= (C8[i] > 0.0);
        }
        if (!positive) continue;

        const Matrix U8 = eight_segment_unitary(ops, C8, T);
        const double phase_error = eighth_root_phase_error(U8);
        if (!(phase_error < default_tolerances.eigenphase)) continue;

        IdentityResult result;
        result.sequence = tile_eight(C8, T);
        result.strengths = C8;
        result.objective = fx;
        result.identity_distance =
            (matrix_power(U8, 8) - Matrix::Identity(8, 8)).norm();
        result.max_eigenphase_error = phase_error;
        result.trials_used = trial + 1;
        if (!(result.identity_distance < default_tolerances.identity_distance)) continue;
        return result;
    }
    throw convergence_error("root-of-identity search exhausted " +
                                std::to_string(opt.max_restarts) +
                                " restarts; best objective " + std::to_string(best_objective),
                            best_objective);
}

std::vector<Matrix> control_jacobian(const CellOperators& ops, const ControlSequence& seq) {
    validate_sequence(seq);
    return jacobian_data(ops, seq.strengths(), seq.T).J;
}

RVector solve_delta(const std::vector<Matrix>& J, const Matrix& H_cal, double epsilon,
                    double* condition) {
    if (J.size() != 64) throw structural_error("expected 64 Jacobian matrices");
    require_hermitian(H_cal);
    const Matrix rhs = complexd(0.0, -epsilon) * H_cal;
    return least_squares_skew(J, rhs, condition);
}

NewtonResult newton_refine(const CellOperators& ops, const ControlSequence& base_seq,
                           const RVector& delta0, const Matrix& U_target, double tol,
                           int max_iterations) {
    validate_sequence(base_seq);
    require_unitary(U_target);
    if (delta0.size() != 64) throw structural_error("expected 64 strength corrections");

    std::array<double, 64> C = shifted_strengths(base_seq, delta0);
    JacobianData data = jacobian_data(ops, C, base_seq.T);
    double phase = phase_alignment(data.U, U_target);
    double dist = (data.U - std::exp(complexd(0.0, phase)) * U_target).norm();

    NewtonResult result;
    result.trace.push_back(dist);

    // Trial evaluation shared by the plain and damped line searches: returns
    // true (and commits the point) when the step earns the requested relative
    // improvement.
    const auto try_step = [&](const RVector& step, double alpha, double gain) {
        std::array<double, 64> C_try = C;
        for (int k = 0; k < 64; ++k) C_try[k] += alpha * step(k);
        const Matrix U_try = single_pass_evolution(ops, C_try, base_seq.T);
        const double phase_try = phase_alignment(U_try, U_target);
        const double dist_try = (U_try - std::exp(complexd(0.0, phase_try)) * U_target).norm();
        if (!(dist_try < dist * (1.0 - gain * alpha))) return false;
        C = C_try;
        data = jacobian_data(ops, C, base_seq.T);
        phase = phase_try;
        dist = dist_try;
        return true;
    };

    for (int it = 0; it <= max_iterations; ++it) {
        if (dist < tol) {
            result.sequence = sequence_from_strengths(C, base_seq.T);
            attach_positivity_warnings(result.sequence);
            result.distance = dist;
            result.residual_phase = phase;
            result.iterations = it;
            return result;
        }
        if (it == max_iterations) break;

        // First-order model at the current point: right-translating the
        // Jacobian columns by U(C)^dag moves them to the identity, where the
        // residual generator L lives, making sum_k (J_k U^dag) dC_k = -i L
        // consistent to O(L^2).
        const Matrix aligned_target = std::exp(complexd(0.0, phase)) * U_target;
        const Matrix L = principal_log_unitary(aligned_target * data.U.adjoint());
        const Matrix Udag = data.U.adjoint();
        RMatrix A(64, 64);
        for (int k = 0; k < 64; ++k) A.col(k) = skew_coordinates(data.J[k] * Udag);
        const RVector b = skew_coordinates(complexd(0.0, -1.0) * L);
        Eigen::JacobiSVD<RMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double cond = (sv(63) > 0.0) ? sv(0) / sv(63) : std::numeric_limits<double>::infinity();
        if (cond > default_tolerances.condition_limit)
            throw ill_conditioned_error("control system condition number " +
                                            std::to_string(cond) +
                                            " exceeds the usable limit (poor base sequence)",
                                        cond);

        // Backtracking line search on the phase-aligned distance.
        bool accepted = false;
        const RVector step = svd.solve(b);
        double alpha = 1.0;
        for (int bt = 0; bt < 12 && !accepted; ++bt) {
            accepted = try_step(step, alpha, 0.25);
            alpha *= 0.5;
        }

        // The plain least-squares step can be dominated by weakly controlled
        // directions (small singular values blow the step up far beyond the
        // linearization's trust region).  Fall back to spectrally damped steps
        // that correct the well-conditioned directions first and demand only
        // modest progress.
        const RVector Utb = svd.matrixU().transpose() * b;
        for (int d = 0; d < 4 && !accepted; ++d) {
            const double lambda = sv(0) * std::pow(10.0, -4.0 + d);
            RVector scaled(64);
            for (int a = 0; a < 64; ++a)
                scaled(a) = Utb(a) * sv(a) / (sv(a) * sv(a) + lambda * lambda);
            const RVector damped = svd.matrixV() * scaled;
            for (double a : {1.0, 0.5, 0.25}) {
                accepted = try_step(damped, a, 0.05);
                if (accepted) break;
            }
        }

        result.trace.push_back(dist);
        if (!accepted)
            throw convergence_error(
                "Newton refinement stalled at distance " + std::to_string(dist) +
                    " (step rotation too large for the linearization)",
                dist);
    }
    throw convergence_error("Newton refinement did not converge in " +
                                std::to_string(max_iterations) + " iterations; best distance " +
                                std::to_string(dist),
                            dist);
}

namespace {

RVector strengths_delta(const ControlSequence& base, const std::array<double, 64>& C) {
    const std::array<double, 64> base_C = base.strengths();
    RVector delta(64);
    for (int k = 0; k < 64; ++k) delta(k) = C[k] - base_C[k];
    return delta;
}

}  // namespace

SynthesisResult effect_unitary(const CellOperators& ops, const ControlSequence& base_seq,
                               const Matrix& U_target, double distance_tol) {
    validate_sequence(base_seq);
    require_unitary(U_target);
    if (U_target.rows() != 8) throw structural_error("gate synthesis targets are 8x8");

    bool degenerate = false;
    const Matrix L = principal_log_unitary(U_target, &degenerate);
    const double epsilon = spectral_norm_hermitian(L);

    SynthesisResult result;
    result.epsilon = epsilon;
    if (epsilon < 1e-12) {
        // Identity target: the base sequence already realizes it.
        result.sequence = base_seq;
        result.m = 1;
        result.distance = phase_aligned_distance(total_evolution(ops, base_seq), U_target);
        result.attempts.push_back("identity target: base sequence reused, m = 1");
        return result;
    }

    // A repeated -1 eigenvalue sits on the log branch cut; realize the target
    // as W^2 with W = exp(-i L / 2) (eigenphases at most pi/2) and double the
    // repetition count.
    const int mult = degenerate ? 2 : 1;
    const Matrix L_eff = L / static_cast<double>(mult);
    const Matrix H_cal = L / epsilon;
    result.split = degenerate;

    const std::vector<Matrix> J_base = control_jacobian(ops, base_seq);

    for (int m : {1, 2, 4, 8, 16}) {
        if (m * mult > 16) break;
        const Matrix U_step = expm_hermitian(L_eff, 1.0 / m);
        const double eps_step = epsilon / static_cast<double>(mult * m);
        std::ostringstream note;
        note << "m = " << m * mult << ": ";
        try {
            double condition = 0.0;
            NewtonResult refined;
            bool have = false;
            try {
                const RVector delta0 = solve_delta(J_base, H_cal, eps_step, &condition);
                refined = newton_refine(ops, base_seq, delta0, U_step,
                                        default_tolerances.newton_step);
                have = true;
                note << "direct refinement, " << refined.iterations << " iterations";
            } catch (const convergence_error&) {
                // Direct refinement left the contraction basin; walk a short
                // continuation path of intermediate rotations instead.
                for (int hops : {2, 4, 8}) {
                    RVector delta = solve_delta(J_base, H_cal, eps_step / hops, &condition);
                    bool ok = true;
                    int iters = 0;
                    for (int j = 1; j <= hops && ok; ++j) {
                        const Matrix U_hop =
                            expm_hermitian(L_eff, static_cast<double>(j) / (hops * m));
                        try {
                            refined = newton_refine(ops, base_seq, delta, U_hop,
                                                    default_tolerances.newton_step);
                            delta = strengths_delta(base_seq, refined.sequence.strengths());
                            iters += refined.iterations;
                        } catch (const convergence_error&) {
                            ok = false;
                        }
                    }
                    if (ok) {
                        have = true;
                        note << "continuation with " << hops << " hops, " << iters
                             << " iterations";
                        break;
                    }
                }
                if (!have) note << "refinement stalled at every continuation length";
            }
            if (have) {
                const Matrix U_full =
                    matrix_power(total_evolution(ops, refined.sequence), m * mult);
                const double full_distance = phase_aligned_distance(U_full, U_target);
                note << ", step distance " << refined.distance << ", full distance "
                     << full_distance;
                if (full_distance < distance_tol) {
                    result.sequence = refined.sequence;
                    result.sequence.repetitions = m * mult;
                    result.m = m * mult;
                    result.distance = full_distance;
                    result.residual_phase = phase_alignment(U_full, U_target);
                    result.attempts.push_back(note.str() + " -- accepted");
                    return result;
                }
            }
        } catch (const ill_conditioned_error& e) {
            note << "linear system ill-conditioned (" << e.condition << ")";
        }
        result.attempts.push_back(note.str());
    }
    throw synthesis_error("gate synthesis failed for every repetition count up to 16",
                          result.attempts);
}

}  // namespace nhqc
