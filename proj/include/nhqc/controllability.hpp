#pragma once

#include <string>
#include <vector>

#include "nhqc/linalg.hpp"

namespace nhqc {

struct ClosureReport {
    int dim_reached = 0;
    int target_dim = 0;              // N^2 for N x N generators
    std::vector<Matrix> basis;       // orthonormal skew-Hermitian vectors, admission order
    double rank_tolerance = 0.0;
    int generations_used = 0;        // commutator depth: generators count as depth 1
    std::string verdict;             // see lie_closure
};

// Computes the dimension of the Lie algebra generated by the given Hermitian
// operators under commutation.  Works in the real vector space of
// skew-Hermitian matrices (each generator multiplied by i), orthogonalizing by
// modified Gram-Schmidt with one re-orthogonalization pass; a candidate is
// admitted when its residual norm exceeds rank_tol times its own norm.
// Candidates are generated breadth-first: each sweep commutes the previous
// generation's admissions with every generator.
//
// Verdicts: "completely controllable" when dim_reached = N^2;
// "controllable up to global phase" when dim_reached = N^2 - 1 and the
// identity direction is the only missing one; otherwise "not fully
// controllable".
ClosureReport lie_closure(const std::vector<Matrix>& generators,
                          double rank_tol = default_tolerances.closure_rank);

}  // namespace nhqc
