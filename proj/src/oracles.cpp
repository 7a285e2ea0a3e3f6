#include "nhqc/oracles.hpp"

#include <cmath>
#include <deque>
#include <numbers>

#include <Eigen/SVD>

#include "nhqc/errors.hpp"

namespace nhqc::oracles {

Matrix expm_taylor(const Matrix& H, double t) {
    // Scale A = -i H t down by a power of two until its norm is small, sum the
    // series to machine precision, then square back up.
    Matrix A = complexd(0.0, -t) * H;
    int squarings = 0;
    double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.25) {
        A /= 2.0;
        norm /= 2.0;
        ++squarings;
    }
    Matrix sum = Matrix::Identity(A.rows(), A.cols());
    Matrix term = sum;
    for (int j = 1; j <= 40; ++j) {
        term = (A * term) / static_cast<double>(j);
        sum += term;
        if (term.norm() < 1e-18 * sum.norm()) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

Matrix fd_jacobian_direction(const CellOperators& ops, const ControlSequence& seq, int k,
                             double h) {
    if (k < 0 || k >= 64) throw structural_error("control direction index outside 0..63");
    ControlSequence plus = seq, minus = seq;
    plus.segments[static_cast<std::size_t>(k)].C += h;
    minus.segments[static_cast<std::size_t>(k)].C -= h;
    plus.repetitions = 1;
    minus.repetitions = 1;
    return (total_evolution(ops, plus) - total_evolution(ops, minus)) / (2.0 * h);
}

Vector char_poly_trace_recurrence(const Matrix& A) {
    const Eigen::Index n = A.rows();
    Vector coeffs(n + 1);
    coeffs(0) = 1.0;
    Matrix M = A;
    for (Eigen::Index j = 1; j <= n; ++j) {
        coeffs(j) = -M.trace() / static_cast<double>(j);
        if (j < n) M = A * (M + coeffs(j) * Matrix::Identity(n, n));
    }
    return coeffs;
}

Vector fft_forward(const Vector& a) {
    const Eigen::Index n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw structural_error("transform length must be a power of two");
    Vector y = a;
    // Bit-reversal permutation, then iterative butterflies.
    for (Eigen::Index i = 1, j = 0; i < n; ++i) {
        Eigen::Index bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(y(i), y(j));
    }
    for (Eigen::Index len = 2; len <= n; len <<= 1) {
        const double angle = 2.0 * std::numbers::pi / static_cast<double>(len);
        const complexd w_len(std::cos(angle), std::sin(angle));
        for (Eigen::Index i = 0; i < n; i += len) {
            complexd w = 1.0;
            for (Eigen::Index j = 0; j < len / 2; ++j) {
                const complexd u = y(i + j);
                const complexd v = y(i + j + len / 2) * w;
                y(i + j) = u + v;
                y(i + j + len / 2) = u - v;
                w *= w_len;
            }
        }
    }
    return y / std::sqrt(static_cast<double>(n));
}

std::uint64_t encode_positions(const std::vector<int>& positions) {
    std::uint64_t key = 0;
    for (int p : positions) key = (key << 7) | static_cast<std::uint64_t>(p);
    return key;
}

std::unordered_map<std::uint64_t, int> routing_distance_map(const DeviceTopology& topo,
                                                            int k) {
    if (k < 1 || k > 3) throw structural_error("tracked qubit count must be 1, 2, or 3");
    if (topo.n_atoms > 127)
        throw structural_error("the base-128 position encoding caps atoms at 127");

    const auto moves = topo.allowed_exchanges();
    std::unordered_map<std::uint64_t, int> dist;
    std::deque<std::uint64_t> frontier;

    // Seed with every ordered k-tuple of distinct atoms already inside one triad.
    for (const auto& t : topo.all_triads()) {
        std::vector<int> idx(static_cast<std::size_t>(k), 0);
        while (true) {
            std::vector<int> pos(static_cast<std::size_t>(k));
            bool distinct = true;
            for (int i = 0; i < k; ++i) {
                pos[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(idx[i])];
                for (int j = 0; j < i; ++j) distinct &= (idx[i] != idx[j]);
            }
            if (distinct) {
                const std::uint64_t key = encode_positions(pos);
                if (!dist.count(key)) {
                    dist[key] = 0;
                    frontier.push_back(key);
                }
            }
            int carry = k - 1;
            while (carry >= 0 && ++idx[static_cast<std::size_t>(carry)] == 3)
                idx[static_cast<std::size_t>(carry--)] = 0;
            if (carry < 0) break;
        }
    }

    // Reverse search on the encoded keys: the move relation is symmetric, so
    // predecessors under an exchange are found by applying the same exchange.
    dist.reserve(1u << 20);
    while (!frontier.empty()) {
        const std::uint64_t key = frontier.front();
        frontier.pop_front();
        const int d = dist[key];
        for (const auto& [u, v] : moves) {
            std::uint64_t next = 0;
            bool touches = false;
            for (int i = 0; i < k; ++i) {
                const int shift = 7 * (k - 1 - i);
                int p = static_cast<int>((key >> shift) & 0x7f);
                if (p == u) {
                    p = v;
                    touches = true;
                } else if (p == v) {
                    p = u;
                    touches = true;
                }
                next |= static_cast<std::uint64_t>(p) << shift;
            }
            if (!touches) continue;
            if (dist.count(next)) continue;
            dist[next] = d + 1;
            frontier.push_back(next);
        }
    }
    return dist;
}

int max_routing_distance(const DeviceTopology& topo, int k) {
    int worst = 0;
    for (const auto& [key, d] : routing_distance_map(topo, k)) worst = std::max(worst, d);
    return worst;
}

int stacked_rank(const std::vector<Matrix>& set, double rel_tol) {
    if (set.empty()) return 0;
    const Eigen::Index dim = set.front().rows();
    RMatrix stacked(static_cast<Eigen::Index>(set.size()), 2 * dim * dim);
    for (std::size_t i = 0; i < set.size(); ++i) {
        Eigen::Index col = 0;
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c) {
                stacked(static_cast<Eigen::Index>(i), col++) = set[i](r, c).real();
                stacked(static_cast<Eigen::Index>(i), col++) = set[i](r, c).imag();
            }
    }
    Eigen::JacobiSVD<RMatrix> svd(stacked);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > rel_tol * sigma(0)) ++rank;
    return rank;
}

}  // namespace nhqc::oracles
