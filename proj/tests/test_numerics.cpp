#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "vmpo/numerics.hpp"

using namespace vmpo;
using std::complex;

namespace {

ComplexMatrix random_rect(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    // Assembled from Haar columns so entries are generic but the
    // construction is deterministic.
    const Eigen::Index dim = std::max(rows, cols);
    ComplexMatrix u = haar_random_unitary(dim, seed);
    ComplexMatrix v = haar_random_unitary(dim, mix_seed(seed, 77));
    ComplexMatrix m = u * v.adjoint() + 0.5 * u.adjoint() * v;
    return m.topLeftCorner(rows, cols);
}

}  // namespace

TEST_CASE("generalized Gell-Mann basis is orthogonal with Tr[g_a g_b] = 2 delta") {
    for (Eigen::Index dim : {2, 3, 4}) {
        const GeneratorBasis basis = generalized_gell_mann(dim);
        REQUIRE(basis.dim == dim);
        REQUIRE(basis.size() == dim * dim);

        CHECK(max_abs_diff(basis.elements[0], ComplexMatrix::Identity(dim, dim)) == 0.0);
        for (Eigen::Index a = 0; a < basis.size(); ++a) {
            const ComplexMatrix& g = basis.elements[static_cast<std::size_t>(a)];
            REQUIRE(g.rows() == dim);
            REQUIRE(g.cols() == dim);
            CHECK(max_abs_diff(g, g.adjoint()) < 1e-14);  // Hermitian
            if (a >= 1) {
                CHECK(std::abs(g.trace()) < 1e-14);  // traceless
            }
        }
        for (Eigen::Index a = 1; a < basis.size(); ++a) {
            for (Eigen::Index b = 1; b < basis.size(); ++b) {
                const complex<double> hs =
                    (basis.elements[static_cast<std::size_t>(a)] *
                     basis.elements[static_cast<std::size_t>(b)])
                        .trace();
                const double expected = (a == b) ? 2.0 : 0.0;
                CHECK(std::abs(hs - expected) < 1e-13);
            }
        }
    }
}

TEST_CASE("dim 2 generators are the Pauli matrices") {
    const GeneratorBasis basis = generalized_gell_mann(2);
    ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, complex<double>(0, -1), complex<double>(0, 1), 0;
    z << 1, 0, 0, -1;
    // Order within the basis: symmetric, antisymmetric, diagonal.
    CHECK(max_abs_diff(basis.elements[1], x) < 1e-15);
    CHECK(max_abs_diff(basis.elements[2], y) < 1e-15);
    CHECK(max_abs_diff(basis.elements[3], z) < 1e-15);
}

TEST_CASE("svd reconstructs rectangular matrices") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (auto [rows, cols] : {std::pair<int, int>{3, 5}, {5, 3}, {4, 4}}) {
            const ComplexMatrix m = random_rect(rows, cols, seed);
            const SvdResult r = svd(m);
            const Eigen::Index k = std::min(m.rows(), m.cols());
            REQUIRE(r.s.size() == k);
            REQUIRE(r.u.cols() == k);
            REQUIRE(r.v.cols() == k);
            CHECK(max_abs_diff(r.u * r.s.asDiagonal() * r.v.adjoint(), m) < 1e-12);
            CHECK(max_abs_diff(r.u.adjoint() * r.u, ComplexMatrix::Identity(k, k)) <
                  1e-12);
            CHECK(max_abs_diff(r.v.adjoint() * r.v, ComplexMatrix::Identity(k, k)) <
                  1e-12);
            for (Eigen::Index i = 0; i + 1 < k; ++i) CHECK(r.s(i) >= r.s(i + 1));
        }
    }
    CHECK_THROWS_AS(svd(ComplexMatrix()), std::invalid_argument);
}

TEST_CASE("spectral and Frobenius norms") {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = complex<double>(0, 3);  // modulus 3
    d(1, 1) = -2.0;
    d(2, 2) = 1.0;
    CHECK(spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(frobenius_norm_sq(d) == doctest::Approx(14.0).epsilon(1e-13));

    const ComplexMatrix u = haar_random_unitary(6, 9);
    CHECK(spectral_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(frobenius_norm_sq(u) == doctest::Approx(6.0).epsilon(1e-12));

    for (std::uint64_t s = 0; s < 10; ++s) {
        const ComplexMatrix m = random_rect(4, 4, 100 + s);
        CHECK(spectral_norm(m) <= std::sqrt(frobenius_norm_sq(m)) + 1e-12);
    }
}

TEST_CASE("matrix_exp_hermitian_generator matches closed forms") {
    const GeneratorBasis p = generalized_gell_mann(2);

    SUBCASE("zero coefficients give the identity") {
        std::vector<double> h(16, 0.0);
        CHECK(max_abs_diff(matrix_exp_hermitian_generator(h, p, p),
                           ComplexMatrix::Identity(4, 4)) < 1e-14);
    }

    SUBCASE("single X (x) I coefficient gives cos/sin rotation") {
        // H = theta * sigma_x (x) I, so exp(-iH) = cos(theta) I - i sin(theta) X (x) I.
        const double theta = 0.37;
        std::vector<double> h(16, 0.0);
        h[1 * 4 + 0] = theta;  // basis index 1 = sigma_x, paired with identity
        const ComplexMatrix w = matrix_exp_hermitian_generator(h, p, p);
        ComplexMatrix x(2, 2);
        x << 0, 1, 1, 0;
        ComplexMatrix expected = std::cos(theta) * ComplexMatrix::Identity(4, 4);
        ComplexMatrix xi(4, 4);
        xi.setZero();
        xi.block(0, 2, 2, 2) = ComplexMatrix::Identity(2, 2);
        xi.block(2, 0, 2, 2) = ComplexMatrix::Identity(2, 2);
        expected -= complex<double>(0, 1) * std::sin(theta) * xi;
        CHECK(max_abs_diff(w, expected) < 1e-13);
    }

    SUBCASE("result is always unitary") {
        const GeneratorBasis g3 = generalized_gell_mann(3);
        std::vector<double> h(static_cast<std::size_t>(p.size() * g3.size()));
        std::uint64_t s = 5;
        for (double& v : h) {
            s = mix_seed(s, 11);
            v = static_cast<double>(s % 1000) / 1000.0 - 0.5;
        }
        const ComplexMatrix w = matrix_exp_hermitian_generator(h, p, g3);
        REQUIRE(w.rows() == 6);
        CHECK(max_abs_diff(w.adjoint() * w, ComplexMatrix::Identity(6, 6)) < 1e-12);
    }

    SUBCASE("length mismatch throws") {
        std::vector<double> h(15, 0.0);
        CHECK_THROWS_AS(matrix_exp_hermitian_generator(h, p, p), std::invalid_argument);
    }
}

TEST_CASE("generator_coefficients inverts the exponential map") {
    const GeneratorBasis p = generalized_gell_mann(2);
    const GeneratorBasis g = generalized_gell_mann(4);

    SUBCASE("round trip on small coefficients recovers h exactly") {
        // Small h keeps the eigenphases inside the principal branch,
        // so the coefficient vector itself must round-trip.
        std::vector<double> h(static_cast<std::size_t>(p.size() * g.size()));
        std::uint64_t s = 17;
        for (double& v : h) {
            s = mix_seed(s, 3);
            v = 0.05 * (static_cast<double>(s % 2001) / 1000.0 - 1.0);
        }
        const ComplexMatrix w = matrix_exp_hermitian_generator(h, p, g);
        const std::vector<double> back = generator_coefficients(w, p, g);
        REQUIRE(back.size() == h.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            CHECK(std::abs(back[i] - h[i]) < 1e-10);
        }
    }

    SUBCASE("re-exponentiation reproduces arbitrary unitaries") {
        for (std::uint64_t seed : {4u, 5u, 6u}) {
            const ComplexMatrix w = haar_random_unitary(8, seed);
            const std::vector<double> h = generator_coefficients(w, p, g);
            const ComplexMatrix w2 = matrix_exp_hermitian_generator(h, p, g);
            CHECK(max_abs_diff(w2, w) < 1e-10);
        }
    }

    SUBCASE("non-unitary input throws") {
        ComplexMatrix m = ComplexMatrix::Identity(8, 8);
        m(0, 0) = 2.0;
        CHECK_THROWS_AS(generator_coefficients(m, p, g), std::invalid_argument);
    }
}

TEST_CASE("haar_random_unitary is deterministic, unitary and well spread") {
    const ComplexMatrix a = haar_random_unitary(4, 42);
    const ComplexMatrix b = haar_random_unitary(4, 42);
    const ComplexMatrix c = haar_random_unitary(4, 43);
    CHECK(max_abs_diff(a, b) == 0.0);
    CHECK(max_abs_diff(a, c) > 1e-3);
    CHECK(max_abs_diff(a.adjoint() * a, ComplexMatrix::Identity(4, 4)) < 1e-13);

    // For the Haar measure on U(d), E |Tr U|^2 = 1 independent of d.
    double acc = 0.0;
    const int samples = 400;
    for (int i = 0; i < samples; ++i) {
        const ComplexMatrix u = haar_random_unitary(4, 1000 + static_cast<std::uint64_t>(i));
        acc += std::norm(u.trace());
    }
    const double mean = acc / samples;
    CHECK(mean > 0.6);
    CHECK(mean < 1.5);

    CHECK_THROWS_AS(haar_random_unitary(0, 1), std::invalid_argument);
}

TEST_CASE("random_state is normalized and deterministic") {
    const ComplexVector v = random_state(5, 7);
    const ComplexVector w = random_state(5, 7);
    REQUIRE(v.size() == 5);
    CHECK(std::abs(v.norm() - 1.0) < 1e-13);
    CHECK((v - w).cwiseAbs().maxCoeff() == 0.0);
    CHECK((v - random_state(5, 8)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("polar_unitary maximizes the real trace overlap") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        const ComplexMatrix env = random_rect(6, 6, seed);
        const ComplexMatrix w = polar_unitary(env);
        CHECK(max_abs_diff(w.adjoint() * w, ComplexMatrix::Identity(6, 6)) < 1e-12);
        const double best = (env.adjoint() * w).trace().real();
        for (int trial = 0; trial < 2000; ++trial) {
            const ComplexMatrix q =
                haar_random_unitary(6, mix_seed(seed, 5000 + static_cast<std::uint64_t>(trial)));
            CHECK((env.adjoint() * q).trace().real() <= best + 1e-10);
        }
    }

    // The polar factor of a unitary is that unitary.
    const ComplexMatrix u = haar_random_unitary(5, 3);
    CHECK(max_abs_diff(polar_unitary(u), u) < 1e-13);
}

TEST_CASE("mix_seed decorrelates and max_abs_diff validates shape") {
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2) != mix_seed(2, 2));
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));

    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    ComplexMatrix b = ComplexMatrix::Zero(2, 3);
    CHECK_THROWS_AS(max_abs_diff(a, b), std::invalid_argument);

    ComplexMatrix c = ComplexMatrix::Zero(2, 2);
    c(1, 0) = complex<double>(3, 4);
    CHECK(max_abs_diff(a, c) == doctest::Approx(5.0));

    CHECK(is_finite(a));
    c(0, 0) = complex<double>(std::nan(""), 0.0);
    CHECK(!is_finite(c));
}
