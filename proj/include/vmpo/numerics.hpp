#pragma once

// Dense complex linear algebra used throughout the library: SVD-backed
// norms, Hermitian-generator exponentials, the generalized Gell-Mann
// operator basis, and deterministic Haar-distributed random unitaries.
//
// All matrices are column-major Eigen double-complex matrices.  Every
// routine validates its inputs and throws std::invalid_argument on a
// contract violation and std::runtime_error when a numerical kernel
// fails to converge.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace vmpo {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Result of a thin singular value decomposition m = u * diag(s) * v†.
/// Singular values are sorted in descending order.
struct SvdResult {
    ComplexMatrix u;
    Eigen::VectorXd s;
    ComplexMatrix v;
};

/// Thin SVD of an arbitrary rectangular matrix.  Throws
/// std::runtime_error if the decomposition does not converge and
/// std::invalid_argument for empty or non-finite input.
SvdResult svd(const ComplexMatrix& m);

/// Largest singular value of m (the operator 2-norm).
double spectral_norm(const ComplexMatrix& m);

/// Squared Frobenius norm, sum_ij |m_ij|^2.
double frobenius_norm_sq(const ComplexMatrix& m);

/// Orthogonal basis of Hermitian matrices spanning dim x dim operators:
/// element 0 is the identity, elements 1..dim^2-1 are the traceless
/// generalized Gell-Mann generators (symmetric, antisymmetric and
/// diagonal families), each normalized so Tr[g_a g_b] = 2 delta_ab for
/// a, b >= 1.  For dim == 2 the generators are the Pauli matrices.
struct GeneratorBasis {
    Eigen::Index dim = 0;
    std::vector<ComplexMatrix> elements;

    Eigen::Index size() const { return static_cast<Eigen::Index>(elements.size()); }
};

/// Builds the generator basis for a dim-dimensional factor (dim >= 2).
GeneratorBasis generalized_gell_mann(Eigen::Index dim);

/// exp(-i H) where H = sum_{l,l'} h[l * nb + l'] a[l] (x) b[l'] for the
/// two factor bases a, b (na = a.size(), nb = b.size()).  `h` must be
/// real with length na * nb.  Evaluated by exact diagonalization of H.
ComplexMatrix matrix_exp_hermitian_generator(const std::vector<double>& h,
                                             const GeneratorBasis& basis_a,
                                             const GeneratorBasis& basis_b);

/// Inverse of matrix_exp_hermitian_generator up to a 2*pi branch: finds
/// real coefficients h with w = exp(-i sum h_{l,l'} a_l (x) b_l') for a
/// unitary w of dimension basis_a.dim * basis_b.dim.  The Hermitian
/// logarithm uses the principal branch with eigenphases in [-pi, pi).
std::vector<double> generator_coefficients(const ComplexMatrix& w,
                                           const GeneratorBasis& basis_a,
                                           const GeneratorBasis& basis_b);

/// Haar-distributed random dim x dim unitary, deterministic in `seed`
/// (internal Gaussian sampling, independent of platform RNG quirks).
/// The QR phase convention makes the distribution exactly Haar.
ComplexMatrix haar_random_unitary(Eigen::Index dim, std::uint64_t seed);

/// Deterministic normalized random complex vector of dimension dim.
ComplexVector random_state(Eigen::Index dim, std::uint64_t seed);

/// Closest unitary to m in Frobenius distance: u * v† from the SVD of
/// m.  This is the global maximizer of Re Tr[m† w] over unitaries w.
ComplexMatrix polar_unitary(const ComplexMatrix& m);

/// True when every entry is finite.
bool is_finite(const ComplexMatrix& m);

/// max_ij |a_ij - b_ij|; matrices must share dimensions.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Deterministic 64-bit mixing (splitmix64 step); used to derive
/// independent sub-seeds from a base seed without correlation.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace vmpo
