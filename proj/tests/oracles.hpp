#pragma once

// Brute-force reference implementations used only by the tests.  These
// deliberately avoid the library's own contraction and embedding code
// paths so that agreement is meaningful: everything here is built from
// raw index arithmetic on dense matrices.

#include <cstdint>
#include <vector>

#include "vmpo/gatelib.hpp"
#include "vmpo/seqmpo.hpp"

namespace oracles {

using vmpo::ComplexMatrix;
using vmpo::ComplexVector;

// Bit q_k (1-based k, qubit 1 most significant) of an N-qubit index.
inline int bit_of(Eigen::Index config, int k, int n_qubits) {
    return static_cast<int>((config >> (n_qubits - k)) & 1);
}

// Entrywise Kronecker product, written independently of any library
// helper.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Site k's bipartite matrix embedded in the full 2^N * D space by
// direct index arithmetic: entry ((q,a),(q',b)) is site(q_k*D+a,
// q'_k*D+b) when all other qubit bits agree and zero otherwise.
inline ComplexMatrix embed_site_bruteforce(const ComplexMatrix& site, int k,
                                           int n_qubits, int ancilla_dim) {
    const Eigen::Index gate_dim = Eigen::Index(1) << n_qubits;
    const Eigen::Index dim = gate_dim * ancilla_dim;
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const Eigen::Index a = r % ancilla_dim;
        const Eigen::Index q = r / ancilla_dim;
        for (Eigen::Index c = 0; c < dim; ++c) {
            const Eigen::Index b = c % ancilla_dim;
            const Eigen::Index qp = c / ancilla_dim;
            bool others_match = true;
            for (int j = 1; j <= n_qubits; ++j) {
                if (j == k) continue;
                if (bit_of(q, j, n_qubits) != bit_of(qp, j, n_qubits)) {
                    others_match = false;
                    break;
                }
            }
            if (!others_match) continue;
            out(r, c) = site(bit_of(q, k, n_qubits) * ancilla_dim + a,
                             bit_of(qp, k, n_qubits) * ancilla_dim + b);
        }
    }
    return out;
}

// Dense chain by multiplying brute-force embeddings: site 1 acts
// first, so the assembled matrix is E_N * ... * E_1.
inline ComplexMatrix dense_chain_bruteforce(const vmpo::SequentialMPO& mpo) {
    const int n = mpo.shape.n_qubits;
    const int d = mpo.shape.ancilla_dim;
    ComplexMatrix acc = ComplexMatrix::Identity(mpo.shape.full_dim(), mpo.shape.full_dim());
    for (int k = 1; k <= n; ++k) {
        acc = embed_site_bruteforce(mpo.sites[static_cast<std::size_t>(k - 1)].matrix, k,
                                    n, d) *
              acc;
    }
    return acc;
}

// Permutation action of the first generalized-CNOT family: flip bit N
// when bits 1..N-1 are all set.
inline Eigen::Index gen_cnot_1_image(Eigen::Index config, int n_qubits) {
    bool all_ones = true;
    for (int j = 1; j < n_qubits; ++j) {
        if (bit_of(config, j, n_qubits) == 0) {
            all_ones = false;
            break;
        }
    }
    return all_ones ? (config ^ 1) : config;
}

// Permutation action of the second family: c_j = b_j XOR
// AND(b_1..b_{j-1}) for every j (the j = 1 prefix AND is empty, so
// bit 1 is untouched).
inline Eigen::Index gen_cnot_2_image(Eigen::Index config, int n_qubits) {
    Eigen::Index out = 0;
    int prefix_and = 1;
    for (int j = 1; j <= n_qubits; ++j) {
        const int bj = bit_of(config, j, n_qubits);
        const int cj = (j == 1) ? bj : (bj ^ prefix_and);
        out |= static_cast<Eigen::Index>(cj) << (n_qubits - j);
        prefix_and = prefix_and & bj;
    }
    return out;
}

// Dense permutation matrix from an index map.
template <typename ImageFn>
inline ComplexMatrix permutation_matrix(int n_qubits, ImageFn image) {
    const Eigen::Index dim = Eigen::Index(1) << n_qubits;
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) out(image(c, n_qubits), c) = 1.0;
    return out;
}

}  // namespace oracles
