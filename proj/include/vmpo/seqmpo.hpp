#pragma once

// The sequential matrix-product-operator form of a one-way ancilla
// sweep: one bipartite (qubit (x) ancilla) unitary per site, with the
// ancilla line threading the chain as the MPO bond.
//
// Time ordering: site 1 interacts with the ancilla first, so on the
// enlarged space the assembled operator is the product
//     U_seq = E_N E_{N-1} ... E_1,
// where E_k acts on qubit k and the ancilla.  Equivalently, the
// ancilla-space block of U_seq between qubit configurations (q, q') is
//     B_N^{q_N q'_N} ... B_1^{q_1 q'_1},
// with B_k^{a b} the D x D ancilla block of site k's 2D x 2D matrix.
// This orientation is what lets the final sites disentangle the
// ancilla in the isometry setting; the reversed order provably cannot.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "vmpo/gatelib.hpp"
#include "vmpo/numerics.hpp"

namespace vmpo {

/// One site of the chain: a 2D x 2D unitary on (qubit k (x) ancilla),
/// indexed row = qubit_bit * D + ancilla.  `h_coeffs`, when present,
/// stores the Hermitian-generator coefficients (length 4 D^2, layout
/// l * D^2 + l' over the Pauli (x) generalized Gell-Mann product
/// basis) from which `matrix` was exponentiated.
struct BipartiteUnitary {
    int site_index = 1;  // 1-based position in the chain
    ComplexMatrix matrix;
    std::optional<std::vector<double>> h_coeffs;

    Eigen::Index ancilla_dim() const { return matrix.rows() / 2; }

    /// D x D ancilla block between qubit bra-bit `row_bit` and ket-bit
    /// `col_bit`.
    ComplexMatrix ancilla_block(int row_bit, int col_bit) const;
};

/// The full chain.  sites[k-1] holds site k; sites.size() == n_qubits.
struct SequentialMPO {
    SystemShape shape;
    std::vector<BipartiteUnitary> sites;
};

/// Chain of identity sites.
SequentialMPO identity_mpo(const SystemShape& shape);

/// Chain of independent Haar-random sites, deterministic in `seed`.
SequentialMPO random_mpo(const SystemShape& shape, std::uint64_t seed);

/// Throws std::invalid_argument unless the chain is structurally sound
/// and every site is unitary to `unitarity_tol`.
void validate_mpo(const SequentialMPO& mpo, double unitarity_tol = 1e-8);

/// Embeds site k's 2D x 2D matrix into the full (2^N D)-dimensional
/// space (identity on all other qubits).
ComplexMatrix embed_site(const BipartiteUnitary& site, const SystemShape& shape);

/// Dense (2^N D) x (2^N D) matrix of the assembled chain E_N ... E_1.
/// Intended for small N; cost grows as 4^N.
ComplexMatrix contract_to_dense(const SequentialMPO& mpo);

/// Precomputed sparse block decomposition of an overlap target.  For a
/// square target T on the enlarged space the overlap with the chain is
///     <T, U_seq> = sum_{q,q'} Tr[ T(q,q')† B_N ... B_1 ],
/// where T(q,q') is the D x D sub-block of T at (q D, q' D); blocks
/// that vanish identically are dropped, which reduces structured
/// targets (permutations, controlled phases) from 4^N to ~2^N terms.
///
/// The same network evaluated with one site left out yields that
/// site's environment (the cost gradient up to constants).
class OverlapNetwork {
  public:
    /// Network for a unitary target: T = gate (x) 1_D, or any square
    /// matrix of dimension 2^N D.
    static OverlapNetwork for_unitary(const ComplexMatrix& target,
                                      const SystemShape& shape);

    /// Network for an isometry target V (dimension 2^N D x 2^M) with
    /// input contraction K: uses the square effective target G = V K†,
    /// for which <G, U_seq> equals the isometry overlap Tr[V† U_seq K].
    static OverlapNetwork for_isometry(const ComplexMatrix& target_isometry,
                                       const ComplexMatrix& input_contraction,
                                       const SystemShape& shape);

    std::complex<double> overlap(const SequentialMPO& mpo) const;

    /// Environment of site k (1-based): the 2D x 2D matrix E with
    /// <T, U_seq> = Tr[E† W_k] as a function of site k's matrix W_k.
    ComplexMatrix environment(const SequentialMPO& mpo, int site_k) const;

    const SystemShape& shape() const { return shape_; }
    std::size_t block_count() const { return entries_.size(); }

  private:
    struct Entry {
        std::uint32_t row_config;  // q  (bra qubit configuration)
        std::uint32_t col_config;  // q' (ket qubit configuration)
        ComplexMatrix block;       // conjugated target block T(q,q')†
    };

    SystemShape shape_;
    std::vector<Entry> entries_;
};

/// Overlap <target, contract(mpo)> for a square target on the enlarged
/// space.  Convenience wrapper over OverlapNetwork::for_unitary.
std::complex<double> overlap_with_target(const SequentialMPO& mpo,
                                         const ComplexMatrix& target);

/// Environment of site k against a square target; wrapper over
/// OverlapNetwork::environment.
ComplexMatrix environment(const SequentialMPO& mpo, const ComplexMatrix& target,
                          int site_k);

/// Isometry-mode overlap Tr[V† U_seq K] with V the target isometry and
/// K the input contraction for (shape, psi_fixed, phi_ancilla).
std::complex<double> overlap_isometry(const SequentialMPO& mpo,
                                      const ComplexMatrix& target_isometry,
                                      const std::vector<ComplexVector>& psi_fixed,
                                      const ComplexVector& phi_ancilla);

/// JSON serialization (format "seqmpo", version 1): shape header plus
/// per-site matrices as row-major [re, im] pairs; h_coeffs included
/// when present.  load_mpo validates shape and unitarity on read.
void save_mpo(const SequentialMPO& mpo, const std::filesystem::path& path);
SequentialMPO load_mpo(const std::filesystem::path& path);
std::string mpo_to_json_string(const SequentialMPO& mpo);
SequentialMPO mpo_from_json_string(const std::string& text);

}  // namespace vmpo
