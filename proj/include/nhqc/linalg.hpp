#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "nhqc/tolerances.hpp"

namespace nhqc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using complexd = std::complex<double>;

// Throws structural_error unless H is square and entrywise Hermitian within tol.
void require_hermitian(const Matrix& H, double tol = default_tolerances.hermitian_symmetry);

// Throws structural_error unless ||U^dag U - I||_F <= tol.
void require_unitary(const Matrix& U, double tol = default_tolerances.unitarity);

// exp(-i H t) for Hermitian H, via eigendecomposition.
Matrix expm_hermitian(const Matrix& H, double t);

// Hermitian L with eigenphases in (-pi, pi] such that exp(-i L) = U; the phase
// -pi is deterministically mapped to +pi.  When degenerate_minus_one is
// non-null it is set to true if the eigenvalue -1 occurs with multiplicity
// greater than one (the branch choice is then basis-dependent within that
// eigenspace, though exp(-i L) = U still holds).
Matrix principal_log_unitary(const Matrix& U, bool* degenerate_minus_one = nullptr);

// Monic characteristic polynomial from the eigenvalue product; coeffs[j]
// multiplies lambda^(dim-j), with coeffs[0] = 1.
Vector char_poly(const Matrix& U);

// Directional derivative d/ds exp(-i (H + s P) t) at s = 0, computed in the
// eigenbasis of H with the divided-difference kernel
// (e^{-i a t} - e^{-i b t}) / (a - b) and the analytic limit -i t e^{-i a t}
// when |a - b| falls below the eigenvalue-gap tolerance.
Matrix dexpm_direction(const Matrix& H, const Matrix& P, double t);

// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm_hermitian(const Matrix& H);

// arg tr(V^dag U): the global phase phi* minimizing ||U - e^{i phi} V||_F.
double phase_alignment(const Matrix& U, const Matrix& V);

// min over phi of ||U - e^{i phi} V||_F.  Evaluated as ||U - e^{i phi*} V||_F
// by direct subtraction: the algebraically equal sqrt(2N - 2|tr V^dag U|)
// cancels catastrophically near zero (noise floor ~ sqrt(N * eps_machine)).
double phase_aligned_distance(const Matrix& U, const Matrix& V);

// Fixed orthonormal basis of skew-Hermitian dim x dim matrices under the real
// trace inner product <A,B> = Re tr(A^dag B): first {i e_aa} for each a, then
// for each pair a < b the two elements (e_ab - e_ba)/sqrt2, i(e_ab + e_ba)/sqrt2.
std::vector<Matrix> skew_hermitian_basis(int dim);

// Coordinates of M in skew_hermitian_basis(dim), computed directly from the
// entries of M (projects non-skew input onto the skew-Hermitian subspace).
RVector skew_coordinates(const Matrix& M);

}  // namespace nhqc
