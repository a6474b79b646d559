#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mudae {

// A scalar function of one physical variable used as a lift factor.
// Sin/Cos may only be applied to angle-typed variables (unit tag "[rad]").
enum class FeatureKind { BaseVar, Sin, Cos };

struct Feature {
    FeatureKind kind = FeatureKind::BaseVar;
    int var = 0;

    friend bool operator==(const Feature&, const Feature&) = default;
};

// A lifted coordinate z_k: the product of one or two features. The Jacobian
// of the supported model class is affine in these coordinates.
struct LiftedCoord {
    std::vector<Feature> factors; // size 1 or 2

    friend bool operator==(const LiftedCoord&, const LiftedCoord&) = default;
};

// Parameters of the built-in 2-bus system: a classical machine (constant EMF
// behind transient reactance) at bus 2, an infinite bus at bus 1, a series
// line between them, and a constant-power load at bus 2. All per-unit.
struct TwoBusParams {
    double e_emf = 1.05;     // internal EMF magnitude
    double x_dp = 0.2;       // generator transient reactance
    double r_line = 0.01;    // line resistance bus1-bus2
    double x_line = 0.1;     // line reactance bus1-bus2
    double p_load = 0.5;     // active load at bus 2
    double q_load = 0.2;     // reactive load at bus 2
    double p_m = 0.6;        // mechanical power
    double m_inertia = 0.0265; // inertia coefficient, 2H/omega_s
    double d_damp = 1.0;     // damping coefficient
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool degenerate() const { return lo == hi; }
    bool contains(double v) const { return lo <= v && v <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

// Physical-variable box: index -> interval; unlisted variables are pinned to
// the model base point.
using BoxSpec = std::map<int, Interval>;

// A DAE model whose block Jacobian is affine in the lifted coordinates:
// J(z) = J0 + sum_k z_k * J_k. The descriptor matrix E is implied by (n, m):
// diagonal, ones on the first n entries.
struct AffineJacobianModel {
    int n = 0; // dynamic states
    int m = 0; // algebraic variables
    Eigen::MatrixXd j0;
    std::vector<std::pair<LiftedCoord, Eigen::MatrixXd>> terms;
    std::vector<std::string> names; // "name[unit]"; angles tagged [rad]
    Eigen::VectorXd base_point;     // physical vector, length n + m
    std::optional<TwoBusParams> two_bus; // residual definition when present

    int order() const { return n + m; }
    int lift_size() const { return static_cast<int>(terms.size()); }
    bool has_residuals() const { return two_bus.has_value(); }

    // Display name of lifted coordinate k, e.g. "sin(delta)*Vx2".
    std::string coord_name(int k) const;
    // Variable name with the unit tag stripped.
    std::string var_name(int i) const;
    bool is_angle(int var) const;
};

// Validates invariants (orders match, no duplicate coordinates, trig only on
// angles, D block invertible at the base point). Throws InputError.
void validate_model(const AffineJacobianModel& model);

struct BlockPartition {
    Eigen::MatrixXd a, b, c, d;
};

struct Residuals {
    Eigen::VectorXd f; // length n
    Eigen::VectorXd g; // length m
    double inf_norm() const;
};

struct AlgebraicSolve {
    bool converged = false;
    Eigen::VectorXd y;
    double residual_inf = 0.0;
    int iterations = 0;
};

/// Builds the 2-bus model: physical variables (delta, omega | Vx2, Vy2),
/// n = 2, m = 2, and lift coordinates
/// {sin d, cos d, Vx, Vy, sin d*Vx, sin d*Vy, cos d*Vx, cos d*Vy}.
/// The base point is the solved equilibrium when Newton converges from the
/// standard guess, otherwise the guess itself.
AffineJacobianModel build_two_bus(const TwoBusParams& params);

/// Maps a physical point to the lifted coordinate vector, ordered as
/// model.terms.
Eigen::VectorXd evaluate_lift(const AffineJacobianModel& model,
                              const Eigen::VectorXd& physical);

/// J(z) = J0 + sum_k z_k J_k.
Eigen::MatrixXd jacobian_at(const AffineJacobianModel& model,
                            const Eigen::VectorXd& z);

/// Splits an (n+m) x (n+m) Jacobian into its A, B, C, D blocks.
BlockPartition block_partition(const Eigen::MatrixXd& j, int n, int m);

/// Reduced Jacobian J_r = A - B D^{-1} C. Throws ReductionError when the
/// D block condition number reaches 1e8.
Eigen::MatrixXd reduced_jacobian(const BlockPartition& blocks);

/// Condition number estimate (2-norm, via SVD) of the D block.
double d_block_condition(const BlockPartition& blocks);

/// Closed-form DAE right-hand sides (f, g) at a physical point. Requires a
/// model with residuals (UnsupportedError otherwise).
Residuals residuals(const AffineJacobianModel& model,
                    const Eigen::VectorXd& physical);

/// Newton solve of (f, g) = 0 over all physical variables, tolerance 1e-10
/// on the max-norm, at most 50 iterations. Throws ConvergenceError on
/// failure (distinct from instability).
Eigen::VectorXd solve_equilibrium(const AffineJacobianModel& model,
                                  const Eigen::VectorXd& guess);

/// Newton solve of g(x, y) = 0 over the algebraic variables only, holding
/// the dynamic part fixed. Non-convergence is reported in the result, not
/// thrown: sweeps treat it as an infeasibility marker.
AlgebraicSolve solve_algebraic(const AffineJacobianModel& model,
                               const Eigen::VectorXd& x_part,
                               const Eigen::VectorXd& y_guess);

/// Propagates a physical box to the lifted space: exact sin/cos interval
/// images by quadrant analysis and exact interval products. The result
/// encloses evaluate_lift of every point of the physical box.
std::vector<Interval> propagate_box(const AffineJacobianModel& model,
                                    const BoxSpec& box);

/// The physical box as a full per-variable interval list (unlisted variables
/// pinned to the base point).
std::vector<Interval> physical_intervals(const AffineJacobianModel& model,
                                         const BoxSpec& box);

} // namespace mudae
