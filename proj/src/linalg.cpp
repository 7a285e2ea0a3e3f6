#include "nhqc/linalg.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "nhqc/errors.hpp"

namespace nhqc {

void require_hermitian(const Matrix& H, double tol) {
    if (H.rows() != H.cols())
        throw structural_error("Hermitian operator must be square, got " +
                               std::to_string(H.rows()) + "x" + std::to_string(H.cols()));
    for (Eigen::Index a = 0; a < H.rows(); ++a)
        for (Eigen::Index b = a; b < H.cols(); ++b)
            if (std::abs(H(a, b) - std::conj(H(b, a))) > tol)
                throw structural_error("matrix is not Hermitian at entry (" +
                                       std::to_string(a) + "," + std::to_string(b) + ")");
}

void require_unitary(const Matrix& U, double tol) {
    if (U.rows() != U.cols())
        throw structural_error("unitary operator must be square");
    const double defect = (U.adjoint() * U - Matrix::Identity(U.rows(), U.cols())).norm();
    if (!(defect <= tol))
        throw structural_error("matrix is not unitary: ||U^dag U - I||_F = " +
                               std::to_string(defect));
}

Matrix expm_hermitian(const Matrix& H, double t) {
    require_hermitian(H);
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Eigen::VectorXd& w = es.eigenvalues();
    const Matrix& V = es.eigenvectors();
    Vector phases(w.size());
    for (Eigen::Index a = 0; a < w.size(); ++a)
        phases(a) = std::exp(complexd(0.0, -w(a) * t));
    return V * phases.asDiagonal() * V.adjoint();
}

Matrix principal_log_unitary(const Matrix& U, bool* degenerate_minus_one) {
    require_unitary(U);
    const Eigen::Index n = U.rows();
    // A unitary matrix is normal, so its Schur form is diagonal up to roundoff
    // and the Schur vectors are an orthonormal eigenbasis.  Reading the
    // eigenphases off the Schur diagonal avoids any division by eigenvalue
    // gaps, so degenerate spectra cost nothing in accuracy.
    Eigen::ComplexSchur<Matrix> schur(U);
    const Matrix& Q = schur.matrixU();
    Eigen::VectorXd theta(n);
    int at_pi = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        double th = -std::arg(schur.matrixT()(a, a));
        if (th <= -std::numbers::pi + 1e-12) th = std::numbers::pi;  // branch tie-break
        if (std::abs(th - std::numbers::pi) < default_tolerances.degenerate_phase) ++at_pi;
        theta(a) = th;
    }
    if (degenerate_minus_one) *degenerate_minus_one = (at_pi > 1);
    Matrix L = Q * theta.cast<complexd>().asDiagonal() * Q.adjoint();
    return 0.5 * (L + L.adjoint());
}

Vector char_poly(const Matrix& U) {
    const Eigen::Index n = U.rows();
    if (n != U.cols()) throw structural_error("characteristic polynomial needs a square matrix");
    Eigen::ComplexEigenSolver<Matrix> es(U, /*computeEigenvectors=*/false);
    const Vector& lambda = es.eigenvalues();
    Vector coeffs = Vector::Zero(n + 1);
    coeffs(0) = 1.0;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index j = a + 1; j >= 1; --j)
            coeffs(j) -= lambda(a) * coeffs(j - 1);
    return coeffs;
}

Matrix dexpm_direction(const Matrix& H, const Matrix& P, double t) {
    require_hermitian(H);
    if (P.rows() != H.rows() || P.cols() != H.cols())
        throw structural_error("direction matrix dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Eigen::VectorXd& w = es.eigenvalues();
    const Matrix& V = es.eigenvectors();
    const Matrix Pt = V.adjoint() * P * V;
    const Eigen::Index n = w.size();
    Matrix kernel(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const complexd ea = std::exp(complexd(0.0, -w(a) * t));
        for (Eigen::Index b = 0; b < n; ++b) {
            const double gap = w(a) - w(b);
            if (std::abs(gap) < default_tolerances.eigenvalue_gap) {
                kernel(a, b) = complexd(0.0, -t) * ea;
            } else {
                kernel(a, b) = (ea - std::exp(complexd(0.0, -w(b) * t))) / gap;
            }
        }
    }
    return V * kernel.cwiseProduct(Pt) * V.adjoint();
}

double spectral_norm_hermitian(const Matrix& H) {
    require_hermitian(H);
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double phase_alignment(const Matrix& U, const Matrix& V) {
    const complexd tr = (V.adjoint() * U).trace();
    if (std::abs(tr) < 1e-300) return 0.0;
    return std::arg(tr);
}

double phase_aligned_distance(const Matrix& U, const Matrix& V) {
    const double phi = phase_alignment(U, V);
    return (U - std::exp(complexd(0.0, phi)) * V).norm();
}

std::vector<Matrix> skew_hermitian_basis(int dim) {
    std::vector<Matrix> basis;
    basis.reserve(static_cast<std::size_t>(dim) * dim);
    for (int a = 0; a < dim; ++a) {
        Matrix M = Matrix::Zero(dim, dim);
        M(a, a) = complexd(0.0, 1.0);
        basis.push_back(std::move(M));
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
            Matrix M1 = Matrix::Zero(dim, dim);
            M1(a, b) = s;
            M1(b, a) = -s;
            basis.push_back(std::move(M1));
            Matrix M2 = Matrix::Zero(dim, dim);
            M2(a, b) = complexd(0.0, s);
            M2(b, a) = complexd(0.0, s);
            basis.push_back(std::move(M2));
        }
    }
    return basis;
}

RVector skew_coordinates(const Matrix& M) {
    const int dim = static_cast<int>(M.rows());
    if (M.cols() != dim) throw structural_error("skew coordinates need a square matrix");
    RVector coords(dim * dim);
    int idx = 0;
    // Diagonal elements i e_aa: <B, M> = Im M(a,a).
    for (int a = 0; a < dim; ++a) coords(idx++) = M(a, a).imag();
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
            // (e_ab - e_ba)/sqrt2 and i(e_ab + e_ba)/sqrt2.
            coords(idx++) = s * (M(a, b).real() - M(b, a).real());
            coords(idx++) = s * (M(a, b).imag() + M(b, a).imag());
        }
    }
    return coords;
}

}  // namespace nhqc
