#include "vmpo/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace vmpo {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_nonempty_finite(const ComplexMatrix& m, const char* what) {
    if (m.rows() == 0 || m.cols() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix is empty");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
    }
}

// splitmix64: tiny, stateless-friendly, identical output on every
// platform.  Used both as the sub-seed mixer and as the core of the
// Gaussian sampler below so random matrices are fully reproducible.
std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    // 53 random bits -> double in (0, 1]; never returns 0 so log() is safe.
    const std::uint64_t bits = splitmix64_next(state) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

// One standard complex Gaussian (real and imaginary parts N(0, 1/2))
// via Box-Muller, so column vectors of them are isotropic.
std::complex<double> standard_complex_gaussian(std::uint64_t& state) {
    const double u1 = uniform01(state);
    const double u2 = uniform01(state);
    const double r = std::sqrt(-std::log(u1));
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t state = base ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
    return splitmix64_next(state);
}

bool is_finite(const ComplexMatrix& m) { return m.allFinite(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    }
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

SvdResult svd(const ComplexMatrix& m) {
    require_nonempty_finite(m, "svd");
    Eigen::JacobiSVD<ComplexMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw std::runtime_error("svd: decomposition failed to converge");
    }
    return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double spectral_norm(const ComplexMatrix& m) {
    require_nonempty_finite(m, "spectral_norm");
    // sqrt of the top eigenvalue of the smaller Gram matrix; the
    // Hermitian eigensolver is several times faster than a full SVD
    // and this norm sits in the p-norm optimizer's innermost loop.
    const ComplexMatrix gram = (m.rows() <= m.cols())
                                   ? ComplexMatrix(m * m.adjoint())
                                   : ComplexMatrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> dec;
    dec.compute(gram, Eigen::EigenvaluesOnly);
    if (dec.info() != Eigen::Success) {
        throw std::runtime_error("spectral_norm: eigensolver failed to converge");
    }
    const double top = dec.eigenvalues().maxCoeff();
    return std::sqrt(std::max(top, 0.0));
}

double frobenius_norm_sq(const ComplexMatrix& m) {
    require_nonempty_finite(m, "frobenius_norm_sq");
    return m.squaredNorm();
}

ComplexMatrix polar_unitary(const ComplexMatrix& m) {
    require_nonempty_finite(m, "polar_unitary");
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("polar_unitary: matrix must be square");
    }
    Eigen::JacobiSVD<ComplexMatrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (dec.info() != Eigen::Success) {
        throw std::runtime_error("polar_unitary: SVD failed to converge");
    }
    return dec.matrixU() * dec.matrixV().adjoint();
}

GeneratorBasis generalized_gell_mann(Eigen::Index dim) {
    if (dim < 2) {
        throw std::invalid_argument("generalized_gell_mann: dim must be >= 2");
    }
    GeneratorBasis basis;
    basis.dim = dim;
    basis.elements.reserve(static_cast<std::size_t>(dim * dim));

    basis.elements.push_back(ComplexMatrix::Identity(dim, dim));

    const std::complex<double> i_unit(0.0, 1.0);
    // Symmetric and antisymmetric off-diagonal generators.
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index k = j + 1; k < dim; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(dim, dim);
            sym(j, k) = 1.0;
            sym(k, j) = 1.0;
            basis.elements.push_back(sym);

            ComplexMatrix asym = ComplexMatrix::Zero(dim, dim);
            asym(j, k) = -i_unit;
            asym(k, j) = i_unit;
            basis.elements.push_back(asym);
        }
    }
    // Diagonal generators, normalized to Tr[g^2] = 2.
    for (Eigen::Index l = 1; l < dim; ++l) {
        ComplexMatrix diag = ComplexMatrix::Zero(dim, dim);
        const double norm = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1.0)));
        for (Eigen::Index j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -norm * static_cast<double>(l);
        basis.elements.push_back(diag);
    }

    return basis;
}

ComplexMatrix matrix_exp_hermitian_generator(const std::vector<double>& h,
                                             const GeneratorBasis& basis_a,
                                             const GeneratorBasis& basis_b) {
    const Eigen::Index na = basis_a.size();
    const Eigen::Index nb = basis_b.size();
    if (static_cast<Eigen::Index>(h.size()) != na * nb) {
        throw std::invalid_argument(
            "matrix_exp_hermitian_generator: coefficient vector has length " +
            std::to_string(h.size()) + ", expected " + std::to_string(na * nb));
    }
    for (double c : h) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument(
                "matrix_exp_hermitian_generator: non-finite coefficient");
        }
    }

    const Eigen::Index da = basis_a.dim;
    const Eigen::Index db = basis_b.dim;
    const Eigen::Index dim = da * db;

    ComplexMatrix generator = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index l = 0; l < na; ++l) {
        // Accumulate the b-factor for this a-element first, then take one
        // Kronecker product per l.
        ComplexMatrix b_sum = ComplexMatrix::Zero(db, db);
        bool any = false;
        for (Eigen::Index lp = 0; lp < nb; ++lp) {
            const double c = h[static_cast<std::size_t>(l * nb + lp)];
            if (c != 0.0) {
                b_sum += c * basis_b.elements[static_cast<std::size_t>(lp)];
                any = true;
            }
        }
        if (!any) continue;
        const ComplexMatrix& a_el = basis_a.elements[static_cast<std::size_t>(l)];
        for (Eigen::Index r = 0; r < da; ++r) {
            for (Eigen::Index c = 0; c < da; ++c) {
                if (a_el(r, c) != std::complex<double>(0.0, 0.0)) {
                    generator.block(r * db, c * db, db, db) += a_el(r, c) * b_sum;
                }
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(generator);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error(
            "matrix_exp_hermitian_generator: eigendecomposition failed");
    }
    const std::complex<double> minus_i(0.0, -1.0);
    ComplexVector phases = (minus_i * eig.eigenvalues().cast<std::complex<double>>())
                               .array()
                               .exp();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

std::vector<double> generator_coefficients(const ComplexMatrix& w,
                                           const GeneratorBasis& basis_a,
                                           const GeneratorBasis& basis_b) {
    require_nonempty_finite(w, "generator_coefficients");
    const Eigen::Index dim = basis_a.dim * basis_b.dim;
    if (w.rows() != dim || w.cols() != dim) {
        throw std::invalid_argument("generator_coefficients: matrix is " +
                                    std::to_string(w.rows()) + "x" +
                                    std::to_string(w.cols()) + ", expected " +
                                    std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (max_abs_diff(w * w.adjoint(), ComplexMatrix::Identity(dim, dim)) > 1e-8) {
        throw std::invalid_argument("generator_coefficients: matrix is not unitary");
    }

    // A unitary is normal, so its Schur form is diagonal; the Hermitian
    // logarithm follows from the eigenphases on the principal branch.
    Eigen::ComplexSchur<ComplexMatrix> schur(w);
    if (schur.info() != Eigen::Success) {
        throw std::runtime_error("generator_coefficients: Schur decomposition failed");
    }
    ComplexVector thetas(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        thetas(j) = -std::arg(schur.matrixT()(j, j));
    }
    const ComplexMatrix z = schur.matrixU();
    ComplexMatrix generator = z * thetas.asDiagonal() * z.adjoint();

    const Eigen::Index na = basis_a.size();
    const Eigen::Index nb = basis_b.size();
    const Eigen::Index da = basis_a.dim;
    const Eigen::Index db = basis_b.dim;

    std::vector<double> h(static_cast<std::size_t>(na * nb), 0.0);
    for (Eigen::Index l = 0; l < na; ++l) {
        const ComplexMatrix& a_el = basis_a.elements[static_cast<std::size_t>(l)];
        const double a_norm_sq = a_el.squaredNorm();
        for (Eigen::Index lp = 0; lp < nb; ++lp) {
            const ComplexMatrix& b_el = basis_b.elements[static_cast<std::size_t>(lp)];
            const double b_norm_sq = b_el.squaredNorm();
            // Tr[G (a (x) b)] without forming the Kronecker product.
            std::complex<double> trace(0.0, 0.0);
            for (Eigen::Index r = 0; r < da; ++r) {
                for (Eigen::Index c = 0; c < da; ++c) {
                    if (a_el(r, c) == std::complex<double>(0.0, 0.0)) continue;
                    trace += a_el(r, c) *
                             (generator.block(c * db, r * db, db, db) * b_el).trace();
                }
            }
            // Orthogonality Tr[(a_l (x) b_l')(a_m (x) b_m')] =
            // Tr[a_l a_m] Tr[b_l' b_m'] makes the projection exact.
            h[static_cast<std::size_t>(l * nb + lp)] =
                trace.real() / (a_norm_sq * b_norm_sq);
        }
    }
    return h;
}

ComplexMatrix haar_random_unitary(Eigen::Index dim, std::uint64_t seed) {
    if (dim < 1) {
        throw std::invalid_argument("haar_random_unitary: dim must be >= 1");
    }
    std::uint64_t state = mix_seed(seed, 0x5eedULL);
    ComplexMatrix g(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            g(r, c) = standard_complex_gaussian(state);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    ComplexMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    // Fix the phase ambiguity q -> q * diag(phase) so the distribution is
    // exactly Haar rather than QR-convention dependent.
    for (Eigen::Index j = 0; j < dim; ++j) {
        const std::complex<double> d = r(j, j);
        const double mag = std::abs(d);
        const std::complex<double> phase = (mag > 0.0) ? d / mag : 1.0;
        q.col(j) *= phase;
    }
    return q;
}

ComplexVector random_state(Eigen::Index dim, std::uint64_t seed) {
    if (dim < 1) {
        throw std::invalid_argument("random_state: dim must be >= 1");
    }
    std::uint64_t state = mix_seed(seed, 0x57a7eULL);
    ComplexVector v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        v(j) = standard_complex_gaussian(state);
    }
    const double norm = v.norm();
    if (norm == 0.0) {
        throw std::runtime_error("random_state: degenerate sample");
    }
    return v / norm;
}

}  // namespace vmpo
