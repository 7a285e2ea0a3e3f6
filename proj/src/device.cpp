#include "nhqc/device.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "nhqc/errors.hpp"
#include "nhqc/gates.hpp"

namespace nhqc {

namespace {

void require_atom(const DeviceTopology& topo, int a) {
    if (a < 1 || a > topo.n_atoms)
        throw structural_error("atom index " + std::to_string(a) + " outside 1.." +
                               std::to_string(topo.n_atoms));
}

bool is_power_of_three(int n) {
    if (n < 1) return false;
    while (n % 3 == 0) n /= 3;
    return n == 1;
}

}  // namespace

RegisterState RegisterState::basis_state(int n, std::uint64_t x) {
    if (n < 1 || n > 30) throw structural_error("register width out of range");
    if (x >= (std::uint64_t{1} << n))
        throw structural_error("basis index " + std::to_string(x) + " outside a " +
                               std::to_string(n) + "-qubit register");
    RegisterState state;
    state.n = n;
    state.amplitudes = Vector::Zero(std::int64_t{1} << n);
    state.amplitudes(static_cast<Eigen::Index>(x)) = 1.0;
    return state;
}

void require_normalized(const RegisterState& state, double tol) {
    if (state.amplitudes.size() != (std::int64_t{1} << state.n))
        throw structural_error("register holds " + std::to_string(state.amplitudes.size()) +
                               " amplitudes, expected 2^" + std::to_string(state.n));
    const double norm = state.amplitudes.norm();
    if (std::abs(norm - 1.0) > tol)
        throw structural_error("register norm " + std::to_string(norm) + " is not 1");
}

std::vector<std::array<int, 3>> DeviceTopology::all_triads() const {
    std::vector<std::array<int, 3>> triads = cells;
    triads.insert(triads.end(), joints.begin(), joints.end());
    return triads;
}

std::vector<std::pair<int, int>> DeviceTopology::allowed_exchanges() const {
    std::set<std::pair<int, int>> pairs;
    for (const auto& t : all_triads()) {
        pairs.insert(std::minmax(t[0], t[1]));
        pairs.insert(std::minmax(t[0], t[2]));
        pairs.insert(std::minmax(t[1], t[2]));
    }
    return {pairs.begin(), pairs.end()};
}

DeviceTopology DeviceTopology::ternary_tree(int n_leaves) {
    if (!is_power_of_three(n_leaves))
        throw structural_error("leaf count must be a power of three, got " +
                               std::to_string(n_leaves));
    DeviceTopology topo;
    topo.n_atoms = 3 * n_leaves;
    // Each level groups three sibling triads and links them with a joint made
    // of one atom from each (last member of the first two, first member of the
    // third); the joint then stands in for the subtree at the next level, so
    // every triad shares an atom with its parent joint and a state climbs one
    // level per exchange.
    std::vector<std::array<int, 3>> level;
    for (int i = 0; i < n_leaves; ++i) {
        topo.cells.push_back({3 * i + 1, 3 * i + 2, 3 * i + 3});
        level.push_back(topo.cells.back());
    }
    while (level.size() > 1) {
        std::vector<std::array<int, 3>> next;
        for (std::size_t g = 0; g + 2 < level.size(); g += 3) {
            topo.joints.push_back({level[g][2], level[g + 1][2], level[g + 2][0]});
            next.push_back(topo.joints.back());
        }
        level = std::move(next);
    }
    return topo;
}

ProgramStep ProgramStep::CellOp(std::vector<int> atoms, Matrix U, std::string label) {
    ProgramStep step;
    step.type = Type::cell_op;
    step.atoms = std::move(atoms);
    step.U = std::move(U);
    step.label = std::move(label);
    return step;
}

ProgramStep ProgramStep::Exchange(int a, int b, std::string label) {
    ProgramStep step;
    step.type = Type::exchange;
    step.a = a;
    step.b = b;
    step.label = std::move(label);
    return step;
}

RegisterState apply_cell_op(const RegisterState& state, const std::vector<int>& atoms,
                            const Matrix& U) {
    require_normalized(state);
    const int k = static_cast<int>(atoms.size());
    if (k < 1 || k > 3) throw structural_error("a cell operation lists 1 to 3 atoms");
    for (int a : atoms)
        if (a < 1 || a > state.n)
            throw structural_error("cell operation atom " + std::to_string(a) +
                                   " outside the register");
    if (std::set<int>(atoms.begin(), atoms.end()).size() != atoms.size())
        throw structural_error("cell operation atoms must be distinct");
    if (U.rows() != (1 << k) || U.cols() != (1 << k))
        throw structural_error("cell operation matrix must be 2^" + std::to_string(k) +
                               " square");
    require_unitary(U);

    // Local index: the first listed atom contributes the most significant bit.
    std::uint64_t mask = 0;
    std::vector<int> shifts(k);
    for (int j = 0; j < k; ++j) {
        shifts[j] = atoms[j] - 1;
        mask |= std::uint64_t{1} << shifts[j];
    }
    const auto local_of = [&](std::uint64_t x) {
        int l = 0;
        for (int j = 0; j < k; ++j) l = (l << 1) | static_cast<int>((x >> shifts[j]) & 1);
        return l;
    };
    const auto with_local = [&](std::uint64_t base, int l) {
        std::uint64_t x = base;
        for (int j = 0; j < k; ++j)
            if ((l >> (k - 1 - j)) & 1) x |= std::uint64_t{1} << shifts[j];
        return x;
    };

    RegisterState out;
    out.n = state.n;
    out.amplitudes = Vector::Zero(state.amplitudes.size());
    const std::uint64_t dim = std::uint64_t{1} << state.n;
    for (std::uint64_t x = 0; x < dim; ++x) {
        const std::uint64_t base = x & ~mask;
        const int l = local_of(x);
        complexd acc = 0.0;
        for (int lp = 0; lp < (1 << k); ++lp)
            acc += U(l, lp) * state.amplitudes(static_cast<Eigen::Index>(with_local(base, lp)));
        out.amplitudes(static_cast<Eigen::Index>(x)) = acc;
    }
    return out;
}

RegisterState exchange(const RegisterState& state, int a, int b) {
    require_normalized(state);
    if (a < 1 || a > state.n || b < 1 || b > state.n || a == b)
        throw structural_error("exchange needs two distinct atoms inside the register");
    const int ba = a - 1, bb = b - 1;
    RegisterState out;
    out.n = state.n;
    out.amplitudes = Vector::Zero(state.amplitudes.size());
    const std::uint64_t dim = std::uint64_t{1} << state.n;
    for (std::uint64_t x = 0; x < dim; ++x) {
        const std::uint64_t va = (x >> ba) & 1, vb = (x >> bb) & 1;
        std::uint64_t y = x & ~((std::uint64_t{1} << ba) | (std::uint64_t{1} << bb));
        y |= (va << bb) | (vb << ba);
        out.amplitudes(static_cast<Eigen::Index>(y)) =
            state.amplitudes(static_cast<Eigen::Index>(x));
    }
    return out;
}

namespace {

// Tracked-position BFS state: where each requested logical qubit currently
// sits, encoded positionally.
std::uint64_t encode_path_state(const std::vector<int>& positions) {
    std::uint64_t key = 0;
    for (int p : positions) key = key * 4096 + static_cast<std::uint64_t>(p);
    return key;
}

bool positions_in_triad(const std::vector<int>& positions, const std::array<int, 3>& triad) {
    return std::all_of(positions.begin(), positions.end(), [&](int p) {
        return p == triad[0] || p == triad[1] || p == triad[2];
    });
}

}  // namespace

RouteResult route_to_common_cell(const DeviceTopology& topo, const std::vector<int>& qubits) {
    if (qubits.empty() || qubits.size() > 3)
        throw structural_error("routing handles 1 to 3 qubits");
    for (int q : qubits) require_atom(topo, q);
    if (std::set<int>(qubits.begin(), qubits.end()).size() != qubits.size())
        throw structural_error("routed qubits must be distinct");

    const std::vector<std::array<int, 3>> triads = topo.all_triads();
    const std::vector<std::pair<int, int>> moves = topo.allowed_exchanges();

    const auto goal_triad = [&](const std::vector<int>& pos) -> const std::array<int, 3>* {
        for (const auto& t : triads)
            if (positions_in_triad(pos, t)) return &t;
        return nullptr;
    };

    struct Visit {
        std::uint64_t parent;
        std::pair<int, int> move;
    };
    std::unordered_map<std::uint64_t, Visit> visited;
    std::unordered_map<std::uint64_t, std::vector<int>> decoded;
    std::deque<std::uint64_t> frontier;

    const std::uint64_t start = encode_path_state(qubits);
    visited[start] = {start, {0, 0}};
    decoded[start] = qubits;
    frontier.push_back(start);

    std::uint64_t goal_key = 0;
    const std::array<int, 3>* host_triad = nullptr;
    while (!frontier.empty()) {
        const std::uint64_t key = frontier.front();
        frontier.pop_front();
        const std::vector<int> pos = decoded[key];
        if (const auto* t = goal_triad(pos)) {
            goal_key = key;
            host_triad = t;
            break;
        }
        for (const auto& [u, v] : moves) {
            std::vector<int> next = pos;
            bool touches = false;
            for (int& p : next) {
                if (p == u) {
                    p = v;
                    touches = true;
                } else if (p == v) {
                    p = u;
                    touches = true;
                }
            }
            if (!touches) continue;
            const std::uint64_t nk = encode_path_state(next);
            if (visited.count(nk)) continue;
            visited[nk] = {key, {u, v}};
            decoded[nk] = next;
            frontier.push_back(nk);
        }
    }
    if (!host_triad)
        throw structural_error("no exchange path brings the requested qubits together "
                               "(disconnected topology)");

    RouteResult result;
    for (std::uint64_t key = goal_key; key != start; key = visited[key].parent)
        result.exchanges.push_back(visited[key].move);
    std::reverse(result.exchanges.begin(), result.exchanges.end());

    // Host triad listed most significant atom first (descending atom order);
    // local qubit q occupies host[3 - q].
    std::array<int, 3> host = *host_triad;
    std::sort(host.begin(), host.end(), std::greater<int>());
    result.host = host;
    const std::vector<int>& final_pos = decoded[goal_key];
    for (std::size_t i = 0; i < qubits.size(); ++i)
        for (int s = 0; s < 3; ++s)
            if (host[s] == final_pos[i]) result.slot[qubits[i]] = 3 - s;
    return result;
}

namespace {

void emit_routed_gate(GateProgram& prog, const DeviceTopology& topo,
                      const std::vector<int>& qubits, const GateSpec& spec,
                      const std::string& label) {
    const RouteResult route = route_to_common_cell(topo, qubits);
    for (const auto& [a, b] : route.exchanges) {
        prog.steps.push_back(ProgramStep::Exchange(a, b, label + " route"));
        ++prog.exchange_count;
    }

    // Current atom of each routed qubit, most significant gate operand first.
    std::vector<int> where(qubits.size());
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        where[i] = qubits[i];
        for (const auto& [a, b] : route.exchanges) {
            if (where[i] == a)
                where[i] = b;
            else if (where[i] == b)
                where[i] = a;
        }
    }

    // Relabel the gate onto cell-local qubits k..1 (first operand most
    // significant); the emitted atom list is then `where` in operand order.
    GateSpec local = spec;
    const int k = static_cast<int>(qubits.size());
    switch (spec.kind) {
        case GateSpec::Kind::split:
            local.q1 = 1;
            break;
        case GateSpec::Kind::perm:
        case GateSpec::Kind::cond_phase:
            local.q1 = 2;
            local.q2 = 1;
            break;
        case GateSpec::Kind::toffoli:
            throw structural_error("routed emission handles 1- and 2-qubit gates");
    }
    const Matrix full = gate_matrix(local);
    // The 8x8 cell matrix is identity outside the low 2^k block, so that block
    // is the gate on the listed atoms.
    const Matrix U = full.topLeftCorner(1 << k, 1 << k);
    prog.steps.push_back(ProgramStep::CellOp(where, U, label));

    for (auto it = route.exchanges.rbegin(); it != route.exchanges.rend(); ++it) {
        prog.steps.push_back(ProgramStep::Exchange(it->first, it->second, label + " unroute"));
        ++prog.exchange_count;
    }
}

}  // namespace

GateProgram compile_qft(const DeviceTopology& topo, int n) {
    if (n < 1 || n > topo.n_atoms)
        throw structural_error("transform width " + std::to_string(n) +
                               " does not fit the device");
    // Routing may pass through atoms beyond the transform width, so programs
    // address the full device register.
    GateProgram prog;
    prog.n = topo.n_atoms;

    // Bit reversal: swap qubits (i, n+1-i) by routing them together,
    // exchanging, and undoing the route.
    for (int i = 1; 2 * i < n + 1; ++i) {
        const int j = n + 1 - i;
        if (i == j) continue;
        const RouteResult route = route_to_common_cell(topo, {i, j});
        std::ostringstream label;
        label << "swap q" << i << " q" << j;
        for (const auto& [a, b] : route.exchanges) {
            prog.steps.push_back(ProgramStep::Exchange(a, b, label.str() + " route"));
            ++prog.exchange_count;
        }
        int pi = i, pj = j;
        for (const auto& [a, b] : route.exchanges) {
            if (pi == a)
                pi = b;
            else if (pi == b)
                pi = a;
            if (pj == a)
                pj = b;
            else if (pj == b)
                pj = a;
        }
        prog.steps.push_back(ProgramStep::Exchange(pi, pj, label.str()));
        ++prog.exchange_count;
        for (auto it = route.exchanges.rbegin(); it != route.exchanges.rend(); ++it) {
            prog.steps.push_back(
                ProgramStep::Exchange(it->first, it->second, label.str() + " unroute"));
            ++prog.exchange_count;
        }
    }

    // Butterfly: ascending over qubits, conditional phases from every lower
    // qubit, then the balanced split.
    constexpr double pi_v = std::numbers::pi;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j < i; ++j) {
            const double phi = pi_v / static_cast<double>(1 << (i - j));
            std::ostringstream label;
            label << "phase q" << i << " q" << j;
            emit_routed_gate(prog, topo, {i, j}, GateSpec::CondPhase(2, 1, phi), label.str());
        }
        std::ostringstream label;
        label << "split q" << i;
        emit_routed_gate(prog, topo, {i}, GateSpec::Split(1), label.str());
    }
    return prog;
}

RegisterState run_program(const RegisterState& state, const GateProgram& prog) {
    if (state.n != prog.n)
        throw structural_error("register width " + std::to_string(state.n) +
                               " does not match the program (" + std::to_string(prog.n) + ")");
    RegisterState current = state;
    for (const ProgramStep& step : prog.steps) {
        if (step.type == ProgramStep::Type::cell_op)
            current = apply_cell_op(current, step.atoms, step.U);
        else
            current = exchange(current, step.a, step.b);
    }
    return current;
}

namespace {

std::string unitary_fingerprint(const Matrix& U) {
    std::string key(static_cast<std::size_t>(U.size()) * sizeof(complexd), '\0');
    std::memcpy(key.data(), U.data(), key.size());
    return key;
}

// Lift a 1- or 2-atom operation to the full cell: the listed atoms occupy the
// least significant local qubits (in listed order), idle slots act as identity.
Matrix lift_to_cell(const Matrix& U, int k) {
    if (k == 3) return U;
    const Eigen::Index d = U.rows();
    Matrix lifted = Matrix::Zero(8, 8);
    const Eigen::Index copies = 8 / d;
    for (Eigen::Index c = 0; c < copies; ++c)
        lifted.block(c * d, c * d, d, d) = U;
    return lifted;
}

// The in-cell permutation realizing a state exchange between atoms a and b,
// expressed on the local qubits of the triad hosting both.
Matrix exchange_cell_unitary(const DeviceTopology& topo, int a, int b) {
    for (const auto& t : topo.all_triads()) {
        const bool has_a = (t[0] == a || t[1] == a || t[2] == a);
        const bool has_b = (t[0] == b || t[1] == b || t[2] == b);
        if (!has_a || !has_b) continue;
        std::array<int, 3> host = t;
        std::sort(host.begin(), host.end(), std::greater<int>());
        int la = 0, lb = 0;
        for (int s = 0; s < 3; ++s) {
            if (host[s] == a) la = 3 - s;
            if (host[s] == b) lb = 3 - s;
        }
        return gate_matrix(GateSpec::Perm(la, lb));
    }
    throw structural_error("exchange between atoms " + std::to_string(a) + " and " +
                           std::to_string(b) + " is not inside any triad");
}

}  // namespace

LoweredProgram lower_to_controls(const GateProgram& prog, const CellOperators& ops,
                                 const ControlSequence& base_seq) {
    // Topology is recovered from the register width: lowering is only defined
    // for programs compiled against the ternary tree over those atoms.
    int leaves = 1;
    while (3 * leaves < prog.n) leaves *= 3;
    if (3 * leaves != prog.n)
        throw structural_error("program width " + std::to_string(prog.n) +
                               " is not a full ternary tree register");
    const DeviceTopology topo = DeviceTopology::ternary_tree(leaves);

    LoweredProgram lowered;
    std::unordered_map<std::string, std::pair<ControlSequence, int>> cache;

    for (std::size_t idx = 0; idx < prog.steps.size(); ++idx) {
        const ProgramStep& step = prog.steps[idx];
        const Matrix target =
            (step.type == ProgramStep::Type::cell_op)
                ? lift_to_cell(step.U, static_cast<int>(step.atoms.size()))
                : exchange_cell_unitary(topo, step.a, step.b);
        const std::string key = unitary_fingerprint(target);

        auto found = cache.find(key);
        if (found == cache.end()) {
            try {
                const SynthesisResult synth = effect_unitary(ops, base_seq, target);
                found = cache.emplace(key, std::make_pair(synth.sequence, synth.m)).first;
            } catch (synthesis_error& e) {
                std::vector<std::string> diagnostics = e.diagnostics;
                diagnostics.insert(diagnostics.begin(),
                                   "step " + std::to_string(idx) + " (" + step.label + ")");
                throw synthesis_error(e.what(), diagnostics);
            }
        }
        LoweredStep ls;
        ls.seq = found->second.first;
        ls.m = found->second.second;
        ls.label = step.label;
        lowered.steps.push_back(std::move(ls));
        lowered.total_intervals += 64LL * found->second.second;
    }
    return lowered;
}

}  // namespace nhqc
