#include "mudae/certify.hpp"
#include "mudae/errors.hpp"
#include "mudae/measures.hpp"
#include "mudae/model.hpp"
#include "mudae/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mudae;

namespace {

AuxiliaryMatrix identity_aux(int n, int m) {
    AuxiliaryMatrix z;
    z.p = Eigen::MatrixXd::Identity(n, n);
    z.r = Eigen::MatrixXd::Zero(m, n);
    z.q = Eigen::MatrixXd::Identity(m, m);
    return z;
}

AuxiliaryMatrix random_aux(oracles::Rng& rng, int n, int m) {
    AuxiliaryMatrix z;
    z.p = oracles::random_spd(rng, n);
    z.r = oracles::random_matrix(rng, m, n);
    z.q = oracles::random_matrix(rng, m, m);
    return z;
}

// Walks delta upward with algebraic continuation until the reduced Jacobian
// has the requested spectral abscissa sign; returns the physical point.
Eigen::VectorXd continued_point(const AffineJacobianModel& model, double target_delta) {
    Eigen::VectorXd x = model.base_point.head(model.n);
    Eigen::VectorXd y = model.base_point.tail(model.m);
    const double start = x[0];
    const int steps = 60;
    for (int i = 1; i <= steps; ++i) {
        x[0] = start + (target_delta - start) * i / steps;
        const auto alg = solve_algebraic(model, x, y);
        REQUIRE(alg.converged);
        y = alg.y;
    }
    Eigen::VectorXd point(model.order());
    point.head(model.n) = x;
    point.tail(model.m) = y;
    return point;
}

} // namespace

TEST_CASE("generalized unreduced Jacobian: block formula equals Z^T J") {
    oracles::Rng rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        const auto inst = oracles::random_dae(rng);
        const auto z = random_aux(rng, inst.n, inst.m);
        const Eigen::MatrixXd f = build_generalized_unreduced(inst.blocks, z);
        const Eigen::MatrixXd product = z.assemble().transpose() * inst.j();
        CHECK((f - product).norm() <= 1e-12 * std::max(1.0, product.norm()));
    }

    // Z = I reproduces J itself.
    const auto inst = oracles::random_dae(rng, 3, 2);
    const Eigen::MatrixXd f =
        build_generalized_unreduced(inst.blocks, identity_aux(3, 2));
    CHECK((f - inst.j()).norm() == 0.0);
}

TEST_CASE("special R makes F + F^T block-structured") {
    oracles::Rng rng(43);
    for (int rep = 0; rep < 50; ++rep) {
        const auto inst = oracles::random_dae(rng);
        AuxiliaryMatrix z;
        z.p = oracles::random_spd(rng, inst.n);
        const Eigen::MatrixXd d_inv = inst.blocks.d.inverse();
        z.r = -(z.p * inst.blocks.b * d_inv).transpose();
        z.q = oracles::random_matrix(rng, inst.m, inst.m);

        const Eigen::MatrixXd f = build_generalized_unreduced(inst.blocks, z);
        const Eigen::MatrixXd sym = f + f.transpose();
        const double scale = std::max(1.0, sym.norm());

        // Top-right block collapses to C^T Q.
        const Eigen::MatrixXd top_right = sym.topRightCorner(inst.n, inst.m);
        CHECK((top_right - inst.blocks.c.transpose() * z.q).norm() <= 1e-12 * scale);

        // Leading block equals P J_r + J_r^T P.
        const Eigen::MatrixXd j_r = reduced_jacobian(inst.blocks);
        const Eigen::MatrixXd lead = sym.topLeftCorner(inst.n, inst.n);
        CHECK((lead - (z.p * j_r + j_r.transpose() * z.p)).norm() <= 1e-10 * scale);
    }
}

TEST_CASE("generalized reduced Jacobian") {
    oracles::Rng rng(47);
    const auto inst = oracles::random_dae(rng, 4, 2, /*hurwitz_a=*/false);
    const Eigen::MatrixXd j_r = reduced_jacobian(inst.blocks);
    CHECK((build_generalized_reduced(Eigen::MatrixXd::Identity(4, 4), j_r) - j_r)
              .norm() == 0.0);

    // Lyapunov P turns F_r + F_r^T into -I.
    const Eigen::MatrixXd a = oracles::random_hurwitz(rng, 4);
    const Eigen::MatrixXd p = solve_lyapunov(a, Eigen::MatrixXd::Identity(4, 4));
    const Eigen::MatrixXd f_r = build_generalized_reduced(p, a);
    CHECK((f_r + f_r.transpose() + Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-9);

    const Eigen::MatrixXd spd = oracles::random_spd(rng, 4);
    CHECK(std::isfinite(matrix_measure(build_generalized_reduced(spd, j_r),
                                       MeasureKind::Two)));
}

TEST_CASE("bmi_value closed forms and measure consistency") {
    CHECK(bmi_value(-Eigen::MatrixXd::Identity(3, 3), identity_aux(3, 0)) ==
          doctest::Approx(-2.0));

    Eigen::MatrixXd skew(2, 2);
    skew << 0, 1, -1, 0;
    CHECK(bmi_value(skew, identity_aux(2, 0)) == doctest::Approx(0.0).scale(1.0));

    oracles::Rng rng(53);
    for (int rep = 0; rep < 30; ++rep) {
        const auto inst = oracles::random_dae(rng);
        const auto z = random_aux(rng, inst.n, inst.m);
        const Eigen::MatrixXd zt_j = z.assemble().transpose() * inst.j();
        const double via_measure =
            matrix_measure(zt_j + zt_j.transpose(), MeasureKind::Two);
        CHECK(std::abs(bmi_value(inst.j(), z) - via_measure) <= 1e-12);
    }
}

TEST_CASE("construct_z_star certifies the two-bus equilibrium") {
    const auto model = build_two_bus(TwoBusParams{});
    const Eigen::VectorXd z_eq = evaluate_lift(model, model.base_point);
    const Certificate cert = construct_z_star(model, z_eq);

    CHECK(cert.zeta < 0.0);
    CHECK(cert.certified());

    // The full LMI set holds: P > 0 and the BMI value recomputes to zeta.
    CHECK(lambda_max_symmetric(cert.z.p) > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.z.p);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const double recomputed = bmi_value(jacobian_at(model, z_eq), cert.z);
    CHECK(std::abs(recomputed - cert.zeta) <= 1e-10);
}

TEST_CASE("construct_z_star on a decoupled system") {
    // B = 0, C = 0, D = -I with Hurwitz A: eps = 1 certifies immediately and
    // F + F^T = diag(P A + A^T P, -2 I) = diag(-I, -2I), so zeta = -1.
    oracles::Rng rng(59);
    AffineJacobianModel model;
    model.n = 3;
    model.m = 2;
    model.names = {"x0[pu]", "x1[pu]", "x2[pu]", "y0[pu]", "y1[pu]"};
    model.j0 = Eigen::MatrixXd::Zero(5, 5);
    model.j0.topLeftCorner(3, 3) = oracles::random_hurwitz(rng, 3);
    model.j0.bottomRightCorner(2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    model.base_point = Eigen::VectorXd::Zero(5);
    validate_model(model);

    const Certificate cert = construct_z_star(model, Eigen::VectorXd(0));
    CHECK(cert.zeta == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("construct_z_star refuses a non-Hurwitz point") {
    AffineJacobianModel model;
    model.n = 2;
    model.m = 1;
    model.names = {"x0[pu]", "x1[pu]", "y0[pu]"};
    model.j0 = Eigen::MatrixXd::Zero(3, 3);
    model.j0.topLeftCorner(2, 2) << 0.1, 0.0, 0.0, -1.0;
    model.j0(2, 2) = -1.0;
    model.base_point = Eigen::VectorXd::Zero(3);
    validate_model(model);
    CHECK_THROWS_AS(construct_z_star(model, Eigen::VectorXd(0)), ConstructionError);
}

TEST_CASE("certify_point modes") {
    const auto model = build_two_bus(TwoBusParams{});
    const Eigen::VectorXd z_eq = evaluate_lift(model, model.base_point);

    const PointCheck at_point = certify_point(model, z_eq);
    CHECK(at_point.certified);
    CHECK(at_point.mode == CertificateMode::AtPoint);

    const Certificate cert = construct_z_star(model, z_eq);
    const PointCheck fixed = certify_point(model, z_eq, cert.z);
    CHECK(fixed.certified);
    CHECK(fixed.zeta == cert.zeta); // same evaluation path

    // An unstable point is never certified, in either mode.
    const Eigen::VectorXd unstable = continued_point(model, 1.70);
    const Eigen::VectorXd z_bad = evaluate_lift(model, unstable);
    const auto blocks = block_partition(jacobian_at(model, z_bad), 2, 2);
    REQUIRE_FALSE(is_hurwitz(reduced_jacobian(blocks), 0.0));

    const PointCheck bad_fixed = certify_point(model, z_bad, cert.z);
    CHECK_FALSE(bad_fixed.certified);
    CHECK(bad_fixed.zeta >= 0.0);
    const PointCheck bad_at = certify_point(model, z_bad);
    CHECK_FALSE(bad_at.certified);
    CHECK_FALSE(bad_at.reason.empty());
}

TEST_CASE("certify_box: single vertex, certified box, interior sampling") {
    const auto model = build_two_bus(TwoBusParams{});
    const Eigen::VectorXd z_eq = evaluate_lift(model, model.base_point);
    const Certificate cert = construct_z_star(model, z_eq);

    // Zero-width box: one vertex, zeta_star equals the point value.
    const CertifiedBox pointwise = certify_box(model, BoxSpec{}, cert.z);
    CHECK(pointwise.vertex_count == 1);
    CHECK(pointwise.zeta_star == doctest::Approx(cert.zeta).epsilon(1e-12));

    // +-1% box around the base point on (delta, Vx, Vy).
    BoxSpec box;
    for (int i : {0, 2, 3}) {
        const double c = model.base_point[i];
        box[i] = Interval{c - 0.01 * std::abs(c), c + 0.01 * std::abs(c)};
    }
    const CertifiedBox cb = certify_box(model, box, cert.z);
    CHECK(cb.certified());
    CHECK(cb.vertex_count == 256); // 8 free lifted coordinates

    // Vertex maximum dominates the interior.
    for (int i = 0; i < 10000; ++i) {
        Eigen::VectorXd zs(model.lift_size());
        for (int k = 0; k < model.lift_size(); ++k) {
            const auto& iv = cb.lifted_box[static_cast<std::size_t>(k)];
            zs[k] = iv.lo + (iv.hi - iv.lo) * uniform01(7, i, k);
        }
        CHECK(bmi_value(jacobian_at(model, zs), cert.z) <= cb.zeta_star + 1e-9);
    }
}

TEST_CASE("certify_box enforces the vertex budget") {
    AffineJacobianModel model;
    model.n = 22;
    model.m = 0;
    for (int i = 0; i < 22; ++i) model.names.push_back("x" + std::to_string(i) + "[pu]");
    model.j0 = -Eigen::MatrixXd::Identity(22, 22);
    for (int k = 0; k < 22; ++k) {
        LiftedCoord coord;
        coord.factors.push_back({FeatureKind::BaseVar, k});
        model.terms.emplace_back(coord, 0.01 * Eigen::MatrixXd::Identity(22, 22));
    }
    model.base_point = Eigen::VectorXd::Zero(22);
    validate_model(model);

    BoxSpec box;
    for (int i = 0; i < 21; ++i) box[i] = Interval{-0.1, 0.1};
    AuxiliaryMatrix z;
    z.p = Eigen::MatrixXd::Identity(22, 22);
    z.r = Eigen::MatrixXd::Zero(0, 22);
    z.q = Eigen::MatrixXd::Zero(0, 0);
    CHECK_THROWS_AS(certify_box(model, box, z), BudgetError);
}

TEST_CASE("grow_box: cap, bracket, monotonicity") {
    const auto model = build_two_bus(TwoBusParams{});
    const Eigen::VectorXd z_eq = evaluate_lift(model, model.base_point);
    const Certificate cert = construct_z_star(model, z_eq);

    // All-zero weights never leave the center: capped at the doubling limit.
    const GrowResult degenerate =
        grow_box(model, model.base_point, Eigen::VectorXd::Zero(4), cert.z);
    CHECK(degenerate.capped);
    CHECK(degenerate.alpha_max == 10.0);
    CHECK(degenerate.box.zeta_star == doctest::Approx(cert.zeta));

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(4);
    weights[0] = 1.0;
    weights[2] = 1.0;
    weights[3] = 1.0;
    const GrowResult grown = grow_box(model, model.base_point, weights, cert.z, 1e-3);
    CHECK_FALSE(grown.capped);
    CHECK(grown.alpha_max > 0.3); // frozen after the first run: about 0.3625
    CHECK(grown.alpha_max < 0.45);
    CHECK(grown.box.certified());

    // Bisection bracket: certified at alpha_max, uncertified just above.
    const CertifiedBox above = certify_box(
        model, scaled_box(model, model.base_point, weights, grown.alpha_max * 1.002),
        cert.z);
    CHECK_FALSE(above.certified());

    // Monotone in alpha below alpha_max.
    for (double f : {0.1, 0.4, 0.9}) {
        const CertifiedBox inner = certify_box(
            model, scaled_box(model, model.base_point, weights, f * grown.alpha_max),
            cert.z);
        CHECK(inner.certified());
        CHECK(inner.zeta_star <= grown.box.zeta_star + 1e-9);
    }

    // Uncertified center is refused.
    const Eigen::VectorXd unstable = continued_point(model, 1.70);
    CHECK_THROWS_AS(grow_box(model, unstable, weights, cert.z), ConstructionError);
}

TEST_CASE("measure dominance: mu2(P J_r) <= mu2(F) under the special R") {
    oracles::Rng rng(61);
    for (int rep = 0; rep < 300; ++rep) {
        const auto inst = oracles::random_dae(rng);
        AuxiliaryMatrix z;
        z.p = oracles::random_spd(rng, inst.n);
        z.r = -(z.p * inst.blocks.b * inst.blocks.d.inverse()).transpose();
        z.q = oracles::random_matrix(rng, inst.m, inst.m);

        const Eigen::MatrixXd f = build_generalized_unreduced(inst.blocks, z);
        const Eigen::MatrixXd f_r =
            build_generalized_reduced(z.p, reduced_jacobian(inst.blocks));

        CHECK(matrix_measure(f_r, MeasureKind::Two) <=
              matrix_measure(f, MeasureKind::Two) + 1e-10);
        CHECK(lambda_max_symmetric(f_r + f_r.transpose()) <=
              lambda_max_symmetric(f + f.transpose()) + 1e-10);
    }
}

TEST_CASE("certificate soundness: negative BMI value implies Hurwitz J_r") {
    oracles::Rng rng(67);
    int certified = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const auto inst = oracles::random_dae(rng, 0, 0, /*hurwitz_a=*/rep % 2 == 0);
        AuxiliaryMatrix z;
        if (rep % 3 == 0) {
            z = random_aux(rng, inst.n, inst.m);
        } else {
            // Perturbed analytic construction: much likelier to certify.
            const Eigen::MatrixXd j_r = reduced_jacobian(inst.blocks);
            if (!is_hurwitz(j_r, 0.0)) continue;
            z.p = solve_lyapunov(j_r, Eigen::MatrixXd::Identity(inst.n, inst.n));
            const Eigen::MatrixXd d_inv = inst.blocks.d.inverse();
            z.r = -(z.p * inst.blocks.b * d_inv).transpose();
            z.q = -0.125 * d_inv.transpose();
            z.p += 0.05 * oracles::random_spd(rng, inst.n, 0.0);
            z.r += 0.05 * oracles::random_matrix(rng, inst.m, inst.n);
            z.q += 0.05 * oracles::random_matrix(rng, inst.m, inst.m);
        }
        if (bmi_value(inst.j(), z) < 0.0) {
            ++certified;
            CHECK(is_hurwitz(reduced_jacobian(inst.blocks), 0.0));
        }
    }
    // The blend must actually exercise the certified branch.
    CHECK(certified > 200);
}

TEST_CASE("vertex enumeration is exact for random affine families") {
    oracles::Rng rng(71);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + rep % 2, m = 2;
        const auto model = oracles::synthetic_affine_model(rng, n, m, n + m);
        const auto z_aux = random_aux(rng, n, m);

        BoxSpec box;
        for (int i = 0; i < n + m; ++i)
            box[i] = Interval{-0.5 + 0.1 * rng.uniform(0.0, 1.0),
                              0.4 + 0.3 * rng.uniform(0.0, 1.0)};
        const CertifiedBox cb = certify_box(model, box, z_aux);

        for (int i = 0; i < 1000; ++i) {
            Eigen::VectorXd zs(model.lift_size());
            for (int k = 0; k < model.lift_size(); ++k) {
                const auto& iv = cb.lifted_box[static_cast<std::size_t>(k)];
                zs[k] = iv.lo + (iv.hi - iv.lo) *
                                    uniform01(1000 + static_cast<std::uint64_t>(rep), i,
                                              static_cast<std::uint64_t>(k));
            }
            CHECK(bmi_value(jacobian_at(model, zs), z_aux) <= cb.zeta_star + 1e-9);
        }
    }
}
