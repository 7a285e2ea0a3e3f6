#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nhqc/linalg.hpp"
#include "nhqc/synthesis.hpp"

namespace nhqc {

// n-qubit register: atom i stores bit i-1 of the basis index.
struct RegisterState {
    int n = 0;
    Vector amplitudes;  // 2^n entries

    static RegisterState basis_state(int n, std::uint64_t x);
};

void require_normalized(const RegisterState& state, double tol = default_tolerances.state_norm);

// Ternary tree of three-atom cells.  Leaf cells partition the atoms; joint
// triads (one per internal tree node, bottom-up) are formed from designated
// members of their three children, so a qubit climbs the tree by state
// exchanges with triad co-members.  Allowed exchanges are exactly the pairs
// co-resident in some triad.
struct DeviceTopology {
    std::vector<std::array<int, 3>> cells;   // leaf triads, ascending atom order
    std::vector<std::array<int, 3>> joints;  // higher-level triads, bottom-up
    int n_atoms = 0;

    std::vector<std::array<int, 3>> all_triads() const;  // cells then joints
    std::vector<std::pair<int, int>> allowed_exchanges() const;

    // n_leaves = 3^d.  The 9-atom instance has cells (1,2,3), (4,5,6), (7,8,9)
    // and the joint triad (3,6,7); larger trees repeat that local pattern
    // (last member of the first two children, first member of the third).
    static DeviceTopology ternary_tree(int n_leaves);
};

// One program step: either a dense unitary on 1..3 listed atoms (first listed
// atom = most significant local bit) or a state exchange between two atoms.
struct ProgramStep {
    enum class Type { cell_op, exchange };
    Type type = Type::cell_op;
    std::vector<int> atoms;  // cell_op: 1..3 atoms, most significant first
    Matrix U;                // cell_op: 2^|atoms| square
    int a = 0, b = 0;        // exchange endpoints
    std::string label;

    static ProgramStep CellOp(std::vector<int> atoms, Matrix U, std::string label = {});
    static ProgramStep Exchange(int a, int b, std::string label = {});
};

struct GateProgram {
    int n = 0;
    std::vector<ProgramStep> steps;
    int exchange_count = 0;
};

// Applies U to the subspace of the listed atoms (identity elsewhere).  The
// first listed atom carries the most significant local bit.
RegisterState apply_cell_op(const RegisterState& state, const std::vector<int>& atoms,
                            const Matrix& U);

// Swaps the states of atoms a and b (a transposition of basis indices).
RegisterState exchange(const RegisterState& state, int a, int b);

struct RouteResult {
    std::vector<std::pair<int, int>> exchanges;  // applied in order
    std::array<int, 3> host{};                   // hosting triad, most significant atom first
    std::map<int, int> slot;                     // logical qubit atom -> local qubit (1..3)
};

// Minimal exchange list (breadth-first search over the allowed-exchange graph)
// bringing the requested logical qubits into one triad.  The slot map records
// the local qubit index each routed qubit ends at; local qubit q sits at
// host[3-q].  Throws structural_error for malformed requests.
RouteResult route_to_common_cell(const DeviceTopology& topo, const std::vector<int>& qubits);

// Fourier-transform program over n qubits: bit-reversal swaps (i, n+1-i)
// routed through the tree, then for i = 1..n the conditional phases
// CondPhase(i, j, pi/2^{i-j}) for each j < i followed by Split on qubit i,
// every pairwise gate routed to a common cell and routed back.  Realizes
// F|x> = 2^{-n/2} sum_y e^{+2 pi i x y / 2^n} |y>.
GateProgram compile_qft(const DeviceTopology& topo, int n);

RegisterState run_program(const RegisterState& state, const GateProgram& prog);

struct LoweredStep {
    ControlSequence seq;
    int m = 1;
    std::string label;
};

struct LoweredProgram {
    std::vector<LoweredStep> steps;
    long long total_intervals = 0;  // sum over steps of 64 * m
};

// Maps every cell_op to an effect_unitary control sequence and every exchange
// to the sequence of the corresponding in-triad permutation gate, caching by
// unitary fingerprint.  While one triad executes a step, idle cells run the
// identity sequence, so a step costs 64 * m intervals device-wide.
// Synthesis failures are rethrown annotated with the offending step.
LoweredProgram lower_to_controls(const GateProgram& prog, const CellOperators& ops,
                                 const ControlSequence& base_seq);

}  // namespace nhqc
