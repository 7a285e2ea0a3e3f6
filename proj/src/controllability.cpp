#include "nhqc/controllability.hpp"

#include "nhqc/errors.hpp"

namespace nhqc {

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass.  Returns the
// residual norm; the candidate is normalized in place when it survives.
double orthogonalize(Matrix& candidate, const std::vector<Matrix>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const Matrix& b : basis) {
            const double overlap = (b.adjoint() * candidate).trace().real();
            candidate -= overlap * b;
        }
    }
    return candidate.norm();
}

}  // namespace

ClosureReport lie_closure(const std::vector<Matrix>& generators, double rank_tol) {
    if (generators.empty()) throw structural_error("lie_closure needs at least one generator");
    const Eigen::Index N = generators.front().rows();
    for (const Matrix& g : generators) {
        require_hermitian(g);
        if (g.rows() != N)
            throw structural_error("lie_closure generators must share one dimension");
    }

    ClosureReport report;
    report.target_dim = static_cast<int>(N * N);
    report.rank_tolerance = rank_tol;

    // Work with skew-Hermitian elements i*G so the closure lives in a real
    // vector space of dimension N^2 under <A,B> = Re tr(A^dag B).
    std::vector<Matrix> skew_gens;
    skew_gens.reserve(generators.size());
    for (const Matrix& g : generators) skew_gens.push_back(complexd(0.0, 1.0) * g);

    const auto admit = [&](Matrix candidate) -> bool {
        const double scale = candidate.norm();
        if (scale == 0.0) return false;
        const double residual = orthogonalize(candidate, report.basis);
        if (residual <= rank_tol * scale) return false;
        report.basis.push_back(candidate / residual);
        return true;
    };

    // Generation 1: the generators themselves.
    std::size_t generation_begin = 0;
    for (const Matrix& g : skew_gens) admit(g);
    report.generations_used = report.basis.empty() ? 0 : 1;

    // Breadth-first sweeps: commute the previous generation's admissions with
    // every generator until a sweep admits nothing or the space is full.
    while (report.basis.size() < static_cast<std::size_t>(report.target_dim)) {
        const std::size_t generation_end = report.basis.size();
        bool admitted = false;
        for (std::size_t i = generation_begin; i < generation_end; ++i) {
            for (const Matrix& g : skew_gens) {
                Matrix comm = g * report.basis[i] - report.basis[i] * g;
                admitted |= admit(std::move(comm));
                if (report.basis.size() == static_cast<std::size_t>(report.target_dim)) break;
            }
            if (report.basis.size() == static_cast<std::size_t>(report.target_dim)) break;
        }
        if (!admitted) break;
        ++report.generations_used;
        generation_begin = generation_end;
    }

    report.dim_reached = static_cast<int>(report.basis.size());
    if (report.dim_reached == report.target_dim) {
        report.verdict = "completely controllable";
    } else if (report.dim_reached == report.target_dim - 1) {
        // The deficit is one-dimensional; check whether the identity
        // direction i*I is the missing one (it completes the span).
        Matrix identity_dir = complexd(0.0, 1.0) * Matrix::Identity(N, N);
        const double scale = identity_dir.norm();
        const double residual = orthogonalize(identity_dir, report.basis);
        report.verdict = (residual > rank_tol * scale) ? "controllable up to global phase"
                                                       : "not fully controllable";
    } else {
        report.verdict = "not fully controllable";
    }
    return report;
}

}  // namespace nhqc
