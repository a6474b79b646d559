#include "mudae/errors.hpp"
#include "mudae/measures.hpp"
#include "mudae/spectra.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace mudae;

namespace {

// Matches two eigenvalue multisets greedily; returns the worst pairing error.
double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (const auto& x : a) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        worst = std::max(worst, best);
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(arg));
    }
    return worst;
}

// Central-difference sensitivity in the lifted space, tracking lambda_i.
std::complex<double> fd_sensitivity(const AffineJacobianModel& model,
                                    const Eigen::VectorXd& z, int i, int k,
                                    double h = 1e-6) {
    const auto track = [&](const Eigen::VectorXd& zp, std::complex<double> ref) {
        const auto spec = pencil_finite_spectrum(model, zp).finite;
        std::complex<double> best = spec.front();
        for (const auto& lambda : spec)
            if (std::abs(lambda - ref) < std::abs(best - ref)) best = lambda;
        return best;
    };
    const std::complex<double> ref = pencil_finite_spectrum(model, z).finite[
        static_cast<std::size_t>(i)];
    Eigen::VectorXd hi = z, lo = z;
    hi[k] += h;
    lo[k] -= h;
    return (track(hi, ref) - track(lo, ref)) / (2.0 * h);
}

} // namespace

TEST_CASE("pencil spectrum: block-diagonal and two-bus golden") {
    oracles::Rng rng(101);

    AffineJacobianModel model;
    model.n = 3;
    model.m = 2;
    model.names = {"x0[pu]", "x1[pu]", "x2[pu]", "y0[pu]", "y1[pu]"};
    model.j0 = Eigen::MatrixXd::Zero(5, 5);
    const Eigen::MatrixXd a = oracles::random_matrix(rng, 3, 3);
    model.j0.topLeftCorner(3, 3) = a;
    model.j0.bottomRightCorner(2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    model.base_point = Eigen::VectorXd::Zero(5);
    validate_model(model);

    const auto pencil = pencil_finite_spectrum(model, Eigen::VectorXd(0));
    CHECK(pencil.infinite_count == 2);
    CHECK(multiset_distance(pencil.finite, spectrum(a)) <= 1e-12);

    const auto two_bus = build_two_bus(TwoBusParams{});
    const auto base = pencil_finite_spectrum(
        two_bus, evaluate_lift(two_bus, two_bus.base_point));
    REQUIRE(base.finite.size() == 2);
    CHECK(base.infinite_count == 2);
    // Frozen after the first run.
    CHECK(base.finite[0].real() == doctest::Approx(-3.8016342222090147).epsilon(1e-9));
    CHECK(base.finite[0].imag() == doctest::Approx(0.0).scale(1.0));
    CHECK(base.finite[1].real() == doctest::Approx(-33.934214834394744).epsilon(1e-9));
    CHECK(base.finite[0].real() < 0.0);
    CHECK(base.finite[1].real() < 0.0);
}

TEST_CASE("pencil spectrum matches the determinant-root oracle on a 3+2 instance") {
    oracles::Rng rng(103);
    const auto model = oracles::synthetic_affine_model(rng, 3, 2, 4);
    const Eigen::VectorXd z = 0.3 * oracles::random_matrix(rng, 4, 1);

    const auto pencil = pencil_finite_spectrum(model, z);
    const auto roots = oracles::pencil_roots(jacobian_at(model, z), model.n);
    CHECK(multiset_distance(pencil.finite,
                            {roots.begin(), roots.end()}) <= 1e-6);
}

TEST_CASE("pencil-reduction equivalence on random instances") {
    oracles::Rng rng(107);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = rng.integer(2, 4), m = rng.integer(1, 3);
        const auto model = oracles::synthetic_affine_model(rng, n, m, n);
        const Eigen::VectorXd z = 0.2 * oracles::random_matrix(rng, n, 1);

        // Test-side reduction, independent of the pencil routine's own calls.
        const Eigen::MatrixXd j = jacobian_at(model, z);
        const Eigen::MatrixXd a = j.topLeftCorner(n, n);
        const Eigen::MatrixXd b = j.topRightCorner(n, m);
        const Eigen::MatrixXd c = j.bottomLeftCorner(m, n);
        const Eigen::MatrixXd d = j.bottomRightCorner(m, m);
        const Eigen::MatrixXd j_r = a - b * d.inverse() * c;

        const auto pencil = pencil_finite_spectrum(model, z);
        CHECK(pencil.infinite_count == m);
        CHECK(multiset_distance(pencil.finite, spectrum(j_r)) <= 1e-8);

        // Conjugate closure of real spectra.
        for (const auto& lambda : pencil.finite) {
            if (std::abs(lambda.imag()) < 1e-10) continue;
            double best = 1e300;
            for (const auto& other : pencil.finite)
                best = std::min(best, std::abs(other - std::conj(lambda)));
            CHECK(best <= 1e-10);
        }
    }
}

TEST_CASE("eigen pairs: padding structure and residuals") {
    // Diagonal A with B = C = 0 and D = -I: eigenvectors are basis vectors
    // padded with zeros.
    AffineJacobianModel model;
    model.n = 2;
    model.m = 2;
    model.names = {"x0[pu]", "x1[pu]", "y0[pu]", "y1[pu]"};
    model.j0 = Eigen::MatrixXd::Zero(4, 4);
    model.j0.topLeftCorner(2, 2) = Eigen::Vector2d(-1.0, -2.5).asDiagonal();
    model.j0.bottomRightCorner(2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    model.base_point = Eigen::VectorXd::Zero(4);
    validate_model(model);

    const auto pairs = eigen_pairs(model, Eigen::VectorXd(0));
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].lambda == std::complex<double>(-1.0, 0.0));
    CHECK(std::abs(pairs[0].right_nu[0]) == doctest::Approx(1.0));
    CHECK(std::abs(pairs[0].right_nu[1]) <= 1e-10);
    CHECK(pairs[0].right_nu.tail(2).norm() <= 1e-10);

    // Residual invariants on random instances.
    oracles::Rng rng(109);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = rng.integer(2, 4), m = rng.integer(1, 3);
        const auto rm = oracles::synthetic_affine_model(rng, n, m, n);
        const Eigen::VectorXd z = 0.2 * oracles::random_matrix(rng, n, 1);
        const Eigen::MatrixXd j = jacobian_at(rm, z);
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n + m, n + m);
        e.topLeftCorner(n, n).setIdentity();

        std::vector<EigenPair> pairs_r;
        try {
            pairs_r = eigen_pairs(rm, z);
        } catch (const NumericError&) {
            continue; // clustered random spectrum; regenerate next rep
        }
        for (const auto& pair : pairs_r) {
            const Eigen::MatrixXcd pencil =
                j.cast<std::complex<double>>() - pair.lambda * e.cast<std::complex<double>>();
            CHECK((pencil * pair.right_nu).norm() <= 1e-8 * j.norm());
            CHECK((pair.left_upsilon.transpose() * pencil).norm() <= 1e-8 * j.norm());
            const std::complex<double> norm_factor =
                pair.left_upsilon.head(n).transpose() * pair.right_nu.head(n);
            CHECK(std::abs(norm_factor) > 1e-12);
        }
    }
}

TEST_CASE("eigen pairs refuse a defective block") {
    AffineJacobianModel model;
    model.n = 2;
    model.m = 0;
    model.names = {"x0[pu]", "x1[pu]"};
    model.j0.resize(2, 2);
    model.j0 << 1.0, 1.0, 0.0, 1.0; // Jordan block, eigenvalue gap zero
    model.base_point = Eigen::VectorXd::Zero(2);
    validate_model(model);
    CHECK_THROWS_AS(eigen_pairs(model, Eigen::VectorXd(0)), NumericError);
}

TEST_CASE("eigenvalue sensitivity: zero term, FD match, conjugate symmetry") {
    oracles::Rng rng(113);
    auto model = oracles::synthetic_affine_model(rng, 3, 2, 3);
    model.terms[1].second.setZero();

    const Eigen::VectorXd z = 0.1 * oracles::random_matrix(rng, 3, 1);
    CHECK(std::abs(eigenvalue_sensitivity(model, z, 0, 1)) == 0.0);

    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            const std::complex<double> analytic = eigenvalue_sensitivity(model, z, i, k);
            const std::complex<double> fd = fd_sensitivity(model, z, i, k);
            CHECK(std::abs(analytic - fd) <=
                  1e-5 * std::max(1.0, std::abs(fd)));
        }

    // Two-bus: sensitivity of the critical eigenvalue to the sin coordinate.
    const auto two_bus = build_two_bus(TwoBusParams{});
    const Eigen::VectorXd zb = evaluate_lift(two_bus, two_bus.base_point);
    for (int k : {0, 1, 4}) {
        const std::complex<double> analytic = eigenvalue_sensitivity(two_bus, zb, 0, k);
        const std::complex<double> fd = fd_sensitivity(two_bus, zb, 0, k);
        CHECK(std::abs(analytic - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }

    // Light damping gives a complex pair: conjugate eigenvalues have
    // conjugate sensitivities.
    TwoBusParams light;
    light.d_damp = 0.1;
    const auto lm = build_two_bus(light);
    const Eigen::VectorXd zl = evaluate_lift(lm, lm.base_point);
    const auto spec = pencil_finite_spectrum(lm, zl).finite;
    REQUIRE(std::abs(spec[0].imag()) > 1.0);
    for (int k = 0; k < lm.lift_size(); ++k) {
        const auto s0 = eigenvalue_sensitivity(lm, zl, 0, k);
        const auto s1 = eigenvalue_sensitivity(lm, zl, 1, k);
        CHECK(std::abs(s1 - std::conj(s0)) <= 1e-8 * std::max(1.0, std::abs(s0)));
    }
}

TEST_CASE("root locus sweep: zero width, crossing before infeasibility") {
    TwoBusParams light;
    light.d_damp = 0.1;
    const auto model = build_two_bus(light);
    const double base_delta = model.base_point[0];

    const auto single = root_locus_sweep(model, 0, base_delta, base_delta, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].feasible);
    const auto base_spec =
        pencil_finite_spectrum(model, evaluate_lift(model, model.base_point)).finite;
    CHECK(multiset_distance(single[0].eigenvalues, base_spec) <= 1e-12);
    CHECK_FALSE(single[0].crossing);

    const auto sweep = root_locus_sweep(model, 0, base_delta, base_delta + 3.2, 320);
    int first_cross = -1, first_infeasible = -1;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (sweep[i].crossing && first_cross < 0) first_cross = static_cast<int>(i);
        if (!sweep[i].feasible && first_infeasible < 0)
            first_infeasible = static_cast<int>(i);
    }
    CHECK(first_cross > 0);
    REQUIRE(first_infeasible > 0); // the sweep runs past the deliverability limit
    CHECK(first_cross < first_infeasible);
}

TEST_CASE("root locus branches are continuous under the local sensitivity bound") {
    TwoBusParams light;
    light.d_damp = 0.1;
    const auto model = build_two_bus(light);
    const double base_delta = model.base_point[0];
    const int steps = 200;
    const double width = 1.2;
    const auto sweep = root_locus_sweep(model, 0, base_delta, base_delta + width, steps);
    const auto sens = sensitivity_sweep(model, 0, base_delta, base_delta + width,
                                        steps, 0, {});
    const double dstep = width / (steps - 1);
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (!sweep[i].feasible || !sweep[i - 1].feasible) continue;
        if (!sens[i].feasible || !sens[i - 1].feasible) continue;
        const double local = std::max(std::abs(sens[i].dlambda_dvar),
                                      std::abs(sens[i - 1].dlambda_dvar));
        CHECK(sweep[i].pairing_distance <= 10.0 * local * dstep + 1e-6);
    }
}

TEST_CASE("sensitivity sweep: variation and FD revalidation") {
    TwoBusParams light;
    light.d_damp = 0.1;
    const auto model = build_two_bus(light);
    const double base_delta = model.base_point[0];
    const std::vector<int> coords = {0, 1};
    const auto sweep =
        sensitivity_sweep(model, 0, base_delta, base_delta + 1.2, 40, 0, coords);

    double lo = 1e300, hi = 0.0;
    for (const auto& step : sweep) {
        if (!step.feasible) continue;
        const double mag = std::abs(step.dlambda_dvar);
        lo = std::min(lo, mag);
        hi = std::max(hi, mag);
    }
    CHECK(hi > 0.0);
    CHECK((hi - lo) / hi > 0.10); // non-constancy of the sensitivity

    // Re-validate emitted values by finite differences at a few steps.
    int checked = 0;
    for (std::size_t i = 3; i < sweep.size() && checked < 5; i += 8) {
        const auto& step = sweep[i];
        if (!step.feasible) continue;
        Eigen::VectorXd x = model.base_point.head(2);
        x[0] = step.var_value;
        const auto alg = solve_algebraic(model, x, model.base_point.tail(2));
        REQUIRE(alg.converged);
        Eigen::VectorXd point(4);
        point.head(2) = x;
        point.tail(2) = alg.y;
        const Eigen::VectorXd z = evaluate_lift(model, point);

        const auto spec = pencil_finite_spectrum(model, z).finite;
        int idx = 0;
        for (int q = 0; q < 2; ++q)
            if (std::abs(spec[static_cast<std::size_t>(q)] - step.lambda) <
                std::abs(spec[static_cast<std::size_t>(idx)] - step.lambda))
                idx = q;
        for (std::size_t ci = 0; ci < coords.size(); ++ci) {
            const auto fd = fd_sensitivity(model, z, idx, coords[ci]);
            CHECK(std::abs(step.dlambda_dz[ci] - fd) <=
                  1e-4 * std::max(1.0, std::abs(fd)));
        }
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("sweep input validation") {
    const auto model = build_two_bus(TwoBusParams{});
    CHECK_THROWS_AS(root_locus_sweep(model, 2, 0.0, 1.0, 5), InputError);
    CHECK_THROWS_AS(root_locus_sweep(model, 0, 1.0, 0.0, 5), InputError);
    CHECK_THROWS_AS(root_locus_sweep(model, 0, 0.0, 1.0, 0), InputError);

    oracles::Rng rng(127);
    const auto synthetic = oracles::synthetic_affine_model(rng, 2, 2, 2);
    CHECK_THROWS_AS(root_locus_sweep(synthetic, 0, 0.0, 1.0, 5), UnsupportedError);
}
