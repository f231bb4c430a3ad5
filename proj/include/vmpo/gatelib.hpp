#pragma once

// Target construction: multiqubit gates in the computational basis,
// the generalized CNOT scaling families, ancilla embedding, and
// isometry targets obtained by fixing input legs to product states.
//
// Index conventions (used consistently across the library):
//   * Qubit 1 is the most significant tensor factor, so basis state
//     |q_1 q_2 ... q_N> has index q_1 2^{N-1} + ... + q_N.
//   * The ancilla is the trailing (least significant) factor of the
//     enlarged space, of dimension D = ancilla_dim.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vmpo/numerics.hpp"

namespace vmpo {

/// Geometry of one decomposition problem: N system qubits, a
/// D-dimensional ancilla, and the number M <= N of free input qubits
/// (M == N describes a full unitary target; M < N an isometry that
/// fixes qubits M+1..N to reference states).
struct SystemShape {
    int n_qubits = 0;
    int ancilla_dim = 0;
    int input_qubits = 0;

    Eigen::Index gate_dim() const { return Eigen::Index(1) << n_qubits; }
    Eigen::Index full_dim() const { return gate_dim() * ancilla_dim; }
    Eigen::Index input_dim() const { return Eigen::Index(1) << input_qubits; }

    bool operator==(const SystemShape&) const = default;
};

/// Throws std::invalid_argument unless 1 <= N <= 16, D >= 1 and
/// 1 <= M <= N.
void validate_shape(const SystemShape& shape);

enum class GateKind {
    cnot,
    cz,
    cphase,
    swap_pair,
    toffoli,
    fredkin,
    gen_cnot_1,
    gen_cnot_2,
    random_unitary,
    random_isometry,
    custom,
};

std::string gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(const std::string& name);

/// A named target gate together with the shape it acts on.  `phase`
/// applies to cphase only (default pi/2), `seed` to the random kinds,
/// and `matrix` to custom targets.
struct GateSpec {
    GateKind kind = GateKind::cnot;
    SystemShape shape;
    double phase = 1.5707963267948966;  // pi/2
    std::uint64_t seed = 1;
    ComplexMatrix matrix;  // custom only

    std::string display_name() const;
};

/// Validates spec.shape and checks that the kind's natural qubit count
/// matches shape.n_qubits (CNOT/CZ/CPHASE/SWAP need N == 2, TOFFOLI and
/// FREDKIN need N == 3; the generalized and random kinds accept any N).
void validate_gate_spec(const GateSpec& spec);

/// Dense 2^N x 2^N matrix of the gate on the system qubits alone.
/// RANDOM_ISOMETRY yields a Haar unitary here; the isometry character
/// enters through build_isometry / shape.input_qubits.
ComplexMatrix build_gate(const GateSpec& spec);

/// Generalized CNOT, family 1: N-1 controls, one target; flips qubit N
/// when qubits 1..N-1 are all |1>.  N == 2 gives CNOT, N == 3 Toffoli.
ComplexMatrix build_gen_cnot_1(int n_qubits);

/// Generalized CNOT, family 2: the ladder product
/// C^1NOT(1;2) C^2NOT(1,2;3) ... C^{N-1}NOT(1..N-1;N) with the longest
/// ladder applied first.  N == 2 gives CNOT.
ComplexMatrix build_gen_cnot_2(int n_qubits);

/// gate (x) identity_D on the enlarged system-plus-ancilla space.
ComplexMatrix embed_with_ancilla(const ComplexMatrix& gate, int ancilla_dim);

/// Isometry target with the first M qubits free: the remaining qubits
/// are fixed to the given single-qubit states and the ancilla to phi,
///   V = (gate (x) 1_D) (1_{2^M} (x) psi_{M+1} (x) ... (x) psi_N (x) phi),
/// a (2^N D) x 2^M matrix.  psi_fixed.size() must equal N - M and all
/// states must be normalized to 1e-10.
ComplexMatrix build_isometry(const GateSpec& spec,
                             const std::vector<ComplexVector>& psi_fixed,
                             const ComplexVector& phi_ancilla);

/// The input-leg contraction 1_{2^M} (x) psi_{M+1} (x) ... (x) phi on
/// its own: a (2^N D) x 2^M isometry K with K† K = 1.
ComplexMatrix input_contraction(const SystemShape& shape,
                                const std::vector<ComplexVector>& psi_fixed,
                                const ComplexVector& phi_ancilla);

}  // namespace vmpo
