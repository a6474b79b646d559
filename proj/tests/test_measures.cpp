#include "mudae/errors.hpp"
#include "mudae/measures.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

using namespace mudae;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

} // namespace

TEST_CASE("matrix_measure closed forms") {
    Eigen::MatrixXd diag = Eigen::Vector2d(-1.0, -3.0).asDiagonal();
    CHECK(matrix_measure(diag, MeasureKind::Two) == doctest::Approx(-1.0).epsilon(1e-12));

    const Eigen::MatrixXd skew = mat2(0, 1, -1, 0);
    CHECK(matrix_measure(skew, MeasureKind::Two) == doctest::Approx(0.0).epsilon(1e-12));

    const Eigen::MatrixXd tri = mat2(-2, 1, 0, -3);
    CHECK(matrix_measure(tri, MeasureKind::One) == doctest::Approx(-2.0));
    CHECK(matrix_measure(tri, MeasureKind::Infinity) == doctest::Approx(-1.0));

    // Measures are not norms.
    CHECK(matrix_measure(-Eigen::MatrixXd::Identity(3, 3), MeasureKind::Two) ==
          doctest::Approx(-1.0));
}

TEST_CASE("matrix_measure rejects bad input") {
    Eigen::MatrixXd nan = mat2(0, 0, 0, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(matrix_measure(nan, MeasureKind::One), InputError);
    CHECK_THROWS_AS(matrix_measure(Eigen::MatrixXd::Zero(2, 3), MeasureKind::Two),
                    InputError);
}

TEST_CASE("lambda_max_symmetric basics and oracle") {
    CHECK(lambda_max_symmetric(Eigen::Vector2d(2.0, -5.0).asDiagonal()) ==
          doctest::Approx(2.0));
    CHECK(lambda_max_symmetric(mat2(0, 1, 1, 0)) == doctest::Approx(1.0));

    oracles::Rng rng(2024);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::MatrixXd g = oracles::random_matrix(rng, 8, 8, 2.0);
        const Eigen::MatrixXd s = 0.5 * (g + g.transpose());
        CHECK(lambda_max_symmetric(s) ==
              doctest::Approx(oracles::jacobi_lambda_max(s)).epsilon(1e-9));
    }
}

TEST_CASE("lambda_max_symmetric rejects asymmetry") {
    CHECK_THROWS_AS(lambda_max_symmetric(mat2(0, 1e-3, 0, 0)), InputError);
}

TEST_CASE("spectrum ordering and determinant-residual oracle") {
    const auto diag = spectrum(Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal());
    REQUIRE(diag.size() == 3);
    CHECK(diag[0] == std::complex<double>(3.0, 0.0));
    CHECK(diag[1] == std::complex<double>(2.0, 0.0));
    CHECK(diag[2] == std::complex<double>(1.0, 0.0));

    const auto rot = spectrum(mat2(0, 1, -1, 0));
    REQUIRE(rot.size() == 2);
    CHECK(rot[0].real() == doctest::Approx(0.0));
    CHECK(rot[0].imag() == doctest::Approx(1.0));
    CHECK(rot[1].imag() == doctest::Approx(-1.0));

    oracles::Rng rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const Eigen::MatrixXd m = oracles::random_matrix(rng, 6, 6);
        const auto eigs = spectrum(m);
        REQUIRE(eigs.size() == 6);
        for (const auto& lambda : eigs)
            CHECK(std::abs(oracles::char_poly_residual(m, lambda)) <= 1e-6 * m.norm());
    }
}

TEST_CASE("is_hurwitz threshold semantics") {
    CHECK(is_hurwitz(Eigen::Vector2d(-1.0, -2.0).asDiagonal(), 0.0));
    CHECK_FALSE(is_hurwitz(mat2(0, 1, -1, 0), 0.0));
    CHECK_FALSE(is_hurwitz(Eigen::Vector2d(-1e-9, -1.0).asDiagonal(), 1e-8));
    CHECK_THROWS_AS(is_hurwitz(mat2(0, 0, 0, 0), -1.0), InputError);
}

TEST_CASE("solve_lyapunov closed forms") {
    const Eigen::MatrixXd p1 =
        solve_lyapunov(-Eigen::MatrixXd::Identity(2, 2),
                       2.0 * Eigen::MatrixXd::Identity(2, 2));
    CHECK((p1 - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);

    const Eigen::MatrixXd p2 = solve_lyapunov(
        Eigen::Vector2d(-1.0, -2.0).asDiagonal(), Eigen::MatrixXd::Identity(2, 2));
    CHECK(p2(0, 0) == doctest::Approx(0.5));
    CHECK(p2(1, 1) == doctest::Approx(0.25));
    CHECK(p2(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("solve_lyapunov residual and definiteness on random Hurwitz systems") {
    oracles::Rng rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::MatrixXd a = oracles::random_hurwitz(rng, 5);
        const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(5, 5);
        const Eigen::MatrixXd p = solve_lyapunov(a, w);
        CHECK((a.transpose() * p + p * a + w).norm() <= 1e-9 * w.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        // The P it returns is itself a Hurwitz certificate for A.
        CHECK(lambda_max_symmetric(a.transpose() * p + p * a) < 0.0);
    }
}

TEST_CASE("solve_lyapunov detects non-Hurwitz A") {
    CHECK_THROWS_AS(solve_lyapunov(Eigen::Vector2d(0.1, -1.0).asDiagonal(),
                                   Eigen::MatrixXd::Identity(2, 2)),
                    ConstructionError);
    // Skew A has eigenvalue sums equal to zero: singular Kronecker system.
    CHECK_THROWS_AS(solve_lyapunov(mat2(0, 1, -1, 0), Eigen::MatrixXd::Identity(2, 2)),
                    ConstructionError);
    CHECK_THROWS_AS(solve_lyapunov(-Eigen::MatrixXd::Identity(2, 2), mat2(0, 1, 0, 0)),
                    InputError);
}

TEST_CASE("measure properties: translation, abscissa bound, mu2 consistency") {
    oracles::Rng rng(31415);
    const MeasureKind kinds[] = {MeasureKind::One, MeasureKind::Two,
                                 MeasureKind::Infinity};
    for (int rep = 0; rep < 200; ++rep) {
        const int n = rng.integer(2, 7);
        const Eigen::MatrixXd m = oracles::random_matrix(rng, n, n, 3.0);
        const double c = rng.uniform(-5.0, 5.0);
        const double abscissa = spectral_abscissa(m);
        for (MeasureKind p : kinds) {
            const double mu = matrix_measure(m, p);
            const double mu_shift =
                matrix_measure(m + c * Eigen::MatrixXd::Identity(n, n), p);
            CHECK(std::abs(mu_shift - (mu + c)) <= 1e-10);
            CHECK(abscissa <= mu + 1e-10);
        }
        const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
        CHECK(std::abs(matrix_measure(s, MeasureKind::Two) - lambda_max_symmetric(s)) <=
              1e-12);
    }
}
