#include "vmpo/gatelib.hpp"

#include <cmath>
#include <stdexcept>

namespace vmpo {

namespace {

// Bit of qubit q (1-based) in basis-state index `idx` for an N-qubit
// register with qubit 1 most significant.
int qubit_bit(Eigen::Index idx, int q, int n_qubits) {
    return static_cast<int>((idx >> (n_qubits - q)) & 1);
}

Eigen::Index flip_qubit(Eigen::Index idx, int q, int n_qubits) {
    return idx ^ (Eigen::Index(1) << (n_qubits - q));
}

ComplexMatrix permutation_gate(int n_qubits,
                               Eigen::Index (*image)(Eigen::Index, int)) {
    const Eigen::Index dim = Eigen::Index(1) << n_qubits;
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        m(image(col, n_qubits), col) = 1.0;
    }
    return m;
}

}  // namespace

void validate_shape(const SystemShape& shape) {
    if (shape.n_qubits < 1 || shape.n_qubits > 16) {
        throw std::invalid_argument("shape: n_qubits must be in 1..16, got " +
                                    std::to_string(shape.n_qubits));
    }
    if (shape.ancilla_dim < 1) {
        throw std::invalid_argument("shape: ancilla_dim must be >= 1, got " +
                                    std::to_string(shape.ancilla_dim));
    }
    if (shape.input_qubits < 1 || shape.input_qubits > shape.n_qubits) {
        throw std::invalid_argument("shape: input_qubits must be in 1..n_qubits, got " +
                                    std::to_string(shape.input_qubits));
    }
}

std::string gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::cnot: return "CNOT";
        case GateKind::cz: return "CZ";
        case GateKind::cphase: return "CPHASE";
        case GateKind::swap_pair: return "SWAP";
        case GateKind::toffoli: return "TOFFOLI";
        case GateKind::fredkin: return "FREDKIN";
        case GateKind::gen_cnot_1: return "GEN_CNOT_1";
        case GateKind::gen_cnot_2: return "GEN_CNOT_2";
        case GateKind::random_unitary: return "RANDOM_UNITARY";
        case GateKind::random_isometry: return "RANDOM_ISOMETRY";
        case GateKind::custom: return "CUSTOM";
    }
    throw std::invalid_argument("gate_kind_name: unknown kind");
}

GateKind gate_kind_from_name(const std::string& name) {
    if (name == "CNOT") return GateKind::cnot;
    if (name == "CZ") return GateKind::cz;
    if (name == "CPHASE") return GateKind::cphase;
    if (name == "SWAP") return GateKind::swap_pair;
    if (name == "TOFFOLI") return GateKind::toffoli;
    if (name == "FREDKIN") return GateKind::fredkin;
    if (name == "GEN_CNOT_1") return GateKind::gen_cnot_1;
    if (name == "GEN_CNOT_2") return GateKind::gen_cnot_2;
    if (name == "RANDOM_UNITARY") return GateKind::random_unitary;
    if (name == "RANDOM_ISOMETRY") return GateKind::random_isometry;
    if (name == "CUSTOM") return GateKind::custom;
    throw std::invalid_argument("unknown gate kind: " + name);
}

std::string GateSpec::display_name() const {
    std::string name = gate_kind_name(kind);
    if (kind == GateKind::gen_cnot_1 || kind == GateKind::gen_cnot_2 ||
        kind == GateKind::random_unitary || kind == GateKind::random_isometry) {
        name += "_N" + std::to_string(shape.n_qubits);
    }
    return name;
}

void validate_gate_spec(const GateSpec& spec) {
    validate_shape(spec.shape);
    const int n = spec.shape.n_qubits;
    auto require_n = [&](int expected) {
        if (n != expected) {
            throw std::invalid_argument(gate_kind_name(spec.kind) + " acts on " +
                                        std::to_string(expected) +
                                        " qubits, but shape has n_qubits=" +
                                        std::to_string(n));
        }
    };
    switch (spec.kind) {
        case GateKind::cnot:
        case GateKind::cz:
        case GateKind::swap_pair:
            require_n(2);
            break;
        case GateKind::cphase:
            require_n(2);
            if (!std::isfinite(spec.phase)) {
                throw std::invalid_argument("CPHASE: phase must be finite");
            }
            break;
        case GateKind::toffoli:
        case GateKind::fredkin:
            require_n(3);
            break;
        case GateKind::gen_cnot_1:
        case GateKind::gen_cnot_2:
            if (n < 2) {
                throw std::invalid_argument(
                    "generalized CNOT families need n_qubits >= 2");
            }
            break;
        case GateKind::random_unitary:
        case GateKind::random_isometry:
            break;
        case GateKind::custom: {
            const Eigen::Index dim = spec.shape.gate_dim();
            if (spec.matrix.rows() != dim || spec.matrix.cols() != dim) {
                throw std::invalid_argument(
                    "CUSTOM: matrix is " + std::to_string(spec.matrix.rows()) + "x" +
                    std::to_string(spec.matrix.cols()) + ", expected " +
                    std::to_string(dim) + "x" + std::to_string(dim));
            }
            if (!spec.matrix.allFinite()) {
                throw std::invalid_argument("CUSTOM: matrix has non-finite entries");
            }
            break;
        }
    }
}

ComplexMatrix build_gen_cnot_1(int n_qubits) {
    if (n_qubits < 2) {
        throw std::invalid_argument("build_gen_cnot_1: n_qubits must be >= 2");
    }
    return permutation_gate(n_qubits, [](Eigen::Index idx, int n) {
        bool all_ones = true;
        for (int q = 1; q < n; ++q) {
            if (qubit_bit(idx, q, n) == 0) {
                all_ones = false;
                break;
            }
        }
        return all_ones ? flip_qubit(idx, n, n) : idx;
    });
}

ComplexMatrix build_gen_cnot_2(int n_qubits) {
    if (n_qubits < 2) {
        throw std::invalid_argument("build_gen_cnot_2: n_qubits must be >= 2");
    }
    // Ladder of C^k NOT(1..k; k+1).  Applied to a basis state with the
    // longest ladder first, each step reads controls that later steps
    // never modify, so the whole product is the permutation
    //   b_j -> b_j xor (b_1 and ... and b_{j-1})   for j = 2..N.
    return permutation_gate(n_qubits, [](Eigen::Index idx, int n) {
        Eigen::Index out = idx;
        bool prefix_ones = true;
        for (int q = 1; q < n; ++q) {
            prefix_ones = prefix_ones && (qubit_bit(idx, q, n) == 1);
            if (prefix_ones) out = flip_qubit(out, q + 1, n);
        }
        return out;
    });
}

ComplexMatrix build_gate(const GateSpec& spec) {
    validate_gate_spec(spec);
    const int n = spec.shape.n_qubits;
    const Eigen::Index dim = spec.shape.gate_dim();

    switch (spec.kind) {
        case GateKind::cnot:
            return build_gen_cnot_1(2);
        case GateKind::cz: {
            ComplexMatrix m = ComplexMatrix::Identity(4, 4);
            m(3, 3) = -1.0;
            return m;
        }
        case GateKind::cphase: {
            ComplexMatrix m = ComplexMatrix::Identity(4, 4);
            m(3, 3) = std::exp(std::complex<double>(0.0, spec.phase));
            return m;
        }
        case GateKind::swap_pair: {
            ComplexMatrix m = ComplexMatrix::Zero(4, 4);
            m(0, 0) = 1.0;
            m(1, 2) = 1.0;
            m(2, 1) = 1.0;
            m(3, 3) = 1.0;
            return m;
        }
        case GateKind::toffoli:
            return build_gen_cnot_1(3);
        case GateKind::fredkin:
            // Controlled SWAP of qubits 2 and 3 on control qubit 1.
            return permutation_gate(3, [](Eigen::Index idx, int nq) {
                if (qubit_bit(idx, 1, nq) == 0) return idx;
                const int b2 = qubit_bit(idx, 2, nq);
                const int b3 = qubit_bit(idx, 3, nq);
                if (b2 == b3) return idx;
                return flip_qubit(flip_qubit(idx, 2, nq), 3, nq);
            });
        case GateKind::gen_cnot_1:
            return build_gen_cnot_1(n);
        case GateKind::gen_cnot_2:
            return build_gen_cnot_2(n);
        case GateKind::random_unitary:
        case GateKind::random_isometry:
            return haar_random_unitary(dim, spec.seed);
        case GateKind::custom:
            return spec.matrix;
    }
    throw std::invalid_argument("build_gate: unknown kind");
}

ComplexMatrix embed_with_ancilla(const ComplexMatrix& gate, int ancilla_dim) {
    if (gate.rows() != gate.cols() || gate.rows() == 0) {
        throw std::invalid_argument("embed_with_ancilla: gate must be square");
    }
    if (ancilla_dim < 1) {
        throw std::invalid_argument("embed_with_ancilla: ancilla_dim must be >= 1");
    }
    const Eigen::Index g = gate.rows();
    const Eigen::Index d = ancilla_dim;
    ComplexMatrix out = ComplexMatrix::Zero(g * d, g * d);
    for (Eigen::Index r = 0; r < g; ++r) {
        for (Eigen::Index c = 0; c < g; ++c) {
            if (gate(r, c) != std::complex<double>(0.0, 0.0)) {
                out.block(r * d, c * d, d, d) =
                    gate(r, c) * ComplexMatrix::Identity(d, d);
            }
        }
    }
    return out;
}

ComplexMatrix input_contraction(const SystemShape& shape,
                                const std::vector<ComplexVector>& psi_fixed,
                                const ComplexVector& phi_ancilla) {
    validate_shape(shape);
    const int n_fixed = shape.n_qubits - shape.input_qubits;
    if (static_cast<int>(psi_fixed.size()) != n_fixed) {
        throw std::invalid_argument("input_contraction: expected " +
                                    std::to_string(n_fixed) +
                                    " fixed qubit states, got " +
                                    std::to_string(psi_fixed.size()));
    }
    auto check_state = [](const ComplexVector& v, Eigen::Index dim, const char* what) {
        if (v.size() != dim) {
            throw std::invalid_argument(std::string("input_contraction: ") + what +
                                        " has dimension " + std::to_string(v.size()) +
                                        ", expected " + std::to_string(dim));
        }
        if (std::abs(v.norm() - 1.0) > 1e-10) {
            throw std::invalid_argument(std::string("input_contraction: ") + what +
                                        " is not normalized");
        }
    };
    for (const auto& psi : psi_fixed) check_state(psi, 2, "fixed qubit state");
    check_state(phi_ancilla, shape.ancilla_dim, "ancilla state");

    // Column vector psi_{M+1} (x) ... (x) psi_N (x) phi of the fixed tail.
    ComplexVector tail = phi_ancilla;
    for (auto it = psi_fixed.rbegin(); it != psi_fixed.rend(); ++it) {
        ComplexVector next((*it).size() * tail.size());
        for (Eigen::Index a = 0; a < it->size(); ++a) {
            next.segment(a * tail.size(), tail.size()) = (*it)(a)*tail;
        }
        tail = next;
    }

    const Eigen::Index m_dim = shape.input_dim();
    ComplexMatrix k = ComplexMatrix::Zero(shape.full_dim(), m_dim);
    for (Eigen::Index q = 0; q < m_dim; ++q) {
        k.block(q * tail.size(), q, tail.size(), 1) = tail;
    }
    return k;
}

ComplexMatrix build_isometry(const GateSpec& spec,
                             const std::vector<ComplexVector>& psi_fixed,
                             const ComplexVector& phi_ancilla) {
    validate_gate_spec(spec);
    const ComplexMatrix gate = build_gate(spec);
    const ComplexMatrix k = input_contraction(spec.shape, psi_fixed, phi_ancilla);
    return embed_with_ancilla(gate, spec.shape.ancilla_dim) * k;
}

}  // namespace vmpo
