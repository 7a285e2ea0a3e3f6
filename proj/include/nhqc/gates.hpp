#pragma once

#include "nhqc/linalg.hpp"

namespace nhqc {

// Cell-level gate specifications.  Qubit indices are cell-local, in {1, 2, 3},
// with qubit q stored in bit q-1 (the same convention as the cell operators).
struct GateSpec {
    enum class Kind { toffoli, perm, split, cond_phase };
    Kind kind = Kind::toffoli;
    int q1 = 0, q2 = 0;
    double phi = 0.0;

    static GateSpec Toffoli();                         // controls 2,3; target 1
    static GateSpec Perm(int i, int j);                // swap the states of qubits i, j
    static GateSpec Split(int q);                      // balanced beam-splitter on qubit q
    static GateSpec CondPhase(int i, int j, double phi);  // e^{+i phi} on |11> of the pair
};

// The 8x8 matrix of the gate in the computational basis |x2 x1 x0>, with
// uninvolved qubits acted on by the identity.  Throws structural_error for
// out-of-range or clashing qubit indices.
Matrix gate_matrix(const GateSpec& spec);

struct GateGenerator {
    Matrix H_cal;    // Hermitian, spectral norm <= 1 (zero matrix for the identity)
    double epsilon;  // rotation angle: exp(-i H_cal epsilon) = gate_matrix(spec)
};

// Closed-form normalized generator and angle for each gate kind.  The three
// involutory kinds use projector generators with epsilon = pi (for a projector
// P, exp(-i pi P) = I - 2P exactly); the conditional phase uses the diagonal
// pattern with entries -sign(phi) on the doubly-excited states and
// epsilon = |phi|, so the realized phase on |11> is e^{+i phi}.
GateGenerator gate_generator(const GateSpec& spec);

}  // namespace nhqc
