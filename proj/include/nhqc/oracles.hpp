#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nhqc/device.hpp"
#include "nhqc/linalg.hpp"
#include "nhqc/synthesis.hpp"

// Independent reference implementations used by the self-check suite and the
// unit tests.  Each deliberately avoids the production code path it checks:
// series summation instead of eigendecomposition, finite differences instead
// of the analytic derivative kernel, trace recurrences instead of eigenvalue
// products, a fast transform instead of compiled gate programs, and a reverse
// multi-source search instead of the router's forward search.
namespace nhqc::oracles {

// exp(-i H t) by scaling-and-squaring Taylor summation.
Matrix expm_taylor(const Matrix& H, double t);

// Central finite difference of total_evolution in control direction k (0-based).
Matrix fd_jacobian_direction(const CellOperators& ops, const ControlSequence& seq,
                             int k, double h = 1e-5);

// Monic characteristic polynomial by the trace recurrence
// M_1 = A, c_1 = -tr M_1; M_j = A (M_{j-1} + c_{j-1} I), c_j = -tr(M_j) / j.
Vector char_poly_trace_recurrence(const Matrix& A);

// Radix-2 transform of a power-of-two vector, positive-exponent convention
// with 1/sqrt(N) normalization: y[k] = N^{-1/2} sum_x e^{+2 pi i x k / N} a[x].
Vector fft_forward(const Vector& a);

// Distance-to-goal map for routing k tracked qubits on a topology: reverse
// breadth-first search from every co-located configuration over the
// allowed-exchange moves.  Keys encode the ordered qubit positions in base 128.
std::unordered_map<std::uint64_t, int> routing_distance_map(const DeviceTopology& topo, int k);
std::uint64_t encode_positions(const std::vector<int>& positions);
int max_routing_distance(const DeviceTopology& topo, int k);

// Numerical rank of the span of a set of matrices, each flattened to a row of
// a stacked real matrix, via singular values above rel_tol * largest.
int stacked_rank(const std::vector<Matrix>& set, double rel_tol);

}  // namespace nhqc::oracles
