#include "two_bus_detail.hpp"

#include "mudae/errors.hpp"

#include <cmath>
#include <complex>

namespace mudae {

namespace {

struct Admittances {
    double g, b;   // generator branch, 1/(j x'd)
    double gl, bl; // line, 1/(r + j x)
};

Admittances admittances(const TwoBusParams& p) {
    const std::complex<double> yg = 1.0 / std::complex<double>(0.0, p.x_dp);
    const std::complex<double> yl = 1.0 / std::complex<double>(p.r_line, p.x_line);
    return {yg.real(), yg.imag(), yl.real(), yl.imag()};
}

} // namespace

namespace detail {

Residuals two_bus_residuals(const TwoBusParams& p, const Eigen::VectorXd& physical) {
    const double delta = physical[0], omega = physical[1];
    const double vx = physical[2], vy = physical[3];
    const double s = std::sin(delta), c = std::cos(delta);
    const double e = p.e_emf;
    const auto [g, b, gl, bl] = admittances(p);

    // Electrical power at the machine.
    const double pe = g * e * e - g * e * (c * vx + s * vy) - b * e * (s * vx - c * vy);

    Residuals r;
    r.f.resize(2);
    r.f[0] = omega;
    r.f[1] = (p.p_m - p.d_damp * omega - pe) / p.m_inertia;

    // Complex power balance at bus 2, expanded to two real equations:
    // generator branch injection + line injection from the infinite bus
    // minus the constant-power load.
    const double vsq = vx * vx + vy * vy;
    r.g.resize(2);
    r.g[0] = e * (g * (c * vx + s * vy) + b * (c * vy - s * vx)) - g * vsq +
             gl * (vx - vsq) + bl * vy - p.p_load;
    r.g[1] = e * (g * (c * vy - s * vx) - b * (c * vx + s * vy)) + b * vsq +
             gl * vy - bl * (vx - vsq) - p.q_load;
    return r;
}

} // namespace detail

AffineJacobianModel build_two_bus(const TwoBusParams& params) {
    if (!(params.m_inertia > 0.0))
        throw InputError("two_bus: M_inertia must be positive");
    if (!(params.d_damp > 0.0))
        throw InputError("two_bus: D_damp must be positive");
    if (!(params.x_dp > 0.0))
        throw InputError("two_bus: x_dp must be positive");

    AffineJacobianModel model;
    model.n = 2;
    model.m = 2;
    model.names = {"delta[rad]", "omega[pu]", "Vx2[pu]", "Vy2[pu]"};
    model.two_bus = params;

    const double e = params.e_emf;
    const double inv_m = 1.0 / params.m_inertia;
    const auto [g, b, gl, bl] = admittances(params);

    const int order = 4;
    auto zero = [&] { return Eigen::MatrixXd::Zero(order, order); };

    // Constant part of the Jacobian.
    Eigen::MatrixXd j0 = zero();
    j0(0, 1) = 1.0;                    // delta_dot = omega
    j0(1, 1) = -params.d_damp * inv_m; // damping
    j0(2, 2) = gl;
    j0(2, 3) = bl;
    j0(3, 2) = -bl;
    j0(3, 3) = gl;

    // One coefficient matrix per lifted coordinate, fixed order
    // {s, c, Vx, Vy, s*Vx, s*Vy, c*Vx, c*Vy}.
    Eigen::MatrixXd js = zero(), jc = zero(), jvx = zero(), jvy = zero();
    Eigen::MatrixXd jsvx = zero(), jsvy = zero(), jcvx = zero(), jcvy = zero();

    // Rotor acceleration row: voltage partials carry sin/cos factors, the
    // delta partial carries the product coordinates.
    js(1, 2) = e * b * inv_m;
    js(1, 3) = e * g * inv_m;
    jc(1, 2) = e * g * inv_m;
    jc(1, 3) = -e * b * inv_m;
    jsvx(1, 0) = -e * g * inv_m;
    jsvy(1, 0) = e * b * inv_m;
    jcvx(1, 0) = e * b * inv_m;
    jcvy(1, 0) = e * g * inv_m;

    // Active power balance row.
    js(2, 2) = -e * b;
    js(2, 3) = e * g;
    jc(2, 2) = e * g;
    jc(2, 3) = e * b;
    jvx(2, 2) = -2.0 * (g + gl);
    jvy(2, 3) = -2.0 * (g + gl);
    jsvx(2, 0) = -e * g;
    jsvy(2, 0) = -e * b;
    jcvx(2, 0) = -e * b;
    jcvy(2, 0) = e * g;

    // Reactive power balance row.
    js(3, 2) = -e * g;
    js(3, 3) = -e * b;
    jc(3, 2) = -e * b;
    jc(3, 3) = e * g;
    jvx(3, 2) = 2.0 * (b + bl);
    jvy(3, 3) = 2.0 * (b + bl);
    jsvx(3, 0) = e * b;
    jsvy(3, 0) = -e * g;
    jcvx(3, 0) = -e * g;
    jcvy(3, 0) = -e * b;

    const Feature fd_sin{FeatureKind::Sin, 0};
    const Feature fd_cos{FeatureKind::Cos, 0};
    const Feature f_vx{FeatureKind::BaseVar, 2};
    const Feature f_vy{FeatureKind::BaseVar, 3};

    model.terms = {
        {LiftedCoord{{fd_sin}}, js},
        {LiftedCoord{{fd_cos}}, jc},
        {LiftedCoord{{f_vx}}, jvx},
        {LiftedCoord{{f_vy}}, jvy},
        {LiftedCoord{{fd_sin, f_vx}}, jsvx},
        {LiftedCoord{{fd_sin, f_vy}}, jsvy},
        {LiftedCoord{{fd_cos, f_vx}}, jcvx},
        {LiftedCoord{{fd_cos, f_vy}}, jcvy},
    };
    model.j0 = j0;

    // Standard guess; the solved equilibrium becomes the frozen base point.
    Eigen::VectorXd guess(4);
    guess << 0.3, 0.0, 1.0, 0.0;
    model.base_point = guess;
    try {
        model.base_point = solve_equilibrium(model, guess);
    } catch (const Error&) {
        // No equilibrium for these parameters; keep the guess so the model
        // stays usable for point-wise certification.
    }

    validate_model(model);
    return model;
}

} // namespace mudae
