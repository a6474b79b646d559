#pragma once

#include "mudae/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace mudae {

// The block certificate parameter Z = [[P, 0], [R, Q]] with P symmetric
// positive definite. P is n x n, R is m x n, Q is m x m.
struct AuxiliaryMatrix {
    Eigen::MatrixXd p;
    Eigen::MatrixXd r;
    Eigen::MatrixXd q;

    int n() const { return static_cast<int>(p.rows()); }
    int m() const { return static_cast<int>(q.rows()); }

    // Assembled (n+m) x (n+m) block matrix.
    Eigen::MatrixXd assemble() const;
};

enum class CertificateMode { AtPoint, FixedZ };

// A point stability certificate: zeta is the computed value of
// lambda_max(Z^T J + J^T Z); the point is certified when zeta < 0.
struct Certificate {
    AuxiliaryMatrix z;
    double zeta = 0.0;
    Eigen::VectorXd point; // lifted coordinates
    CertificateMode mode = CertificateMode::AtPoint;

    bool certified() const { return zeta < 0.0; }
};

// certify_point result. Construction failures map to certified == false with
// a reason, never to a false certificate.
struct PointCheck {
    bool certified = false;
    double zeta = std::numeric_limits<double>::quiet_NaN();
    std::optional<AuxiliaryMatrix> z;
    CertificateMode mode = CertificateMode::AtPoint;
    Eigen::VectorXd point;
    std::string reason; // empty when certified
};

// A robust box certificate: zeta_star is the exact maximum of the BMI value
// over the lifted box (attained at a vertex by convexity).
struct CertifiedBox {
    BoxSpec physical_box;
    std::vector<Interval> lifted_box;
    AuxiliaryMatrix z;
    double zeta_star = 0.0;
    std::int64_t vertex_count = 0;

    bool certified() const { return zeta_star < 0.0; }
};

struct GrowResult {
    double alpha_max = 0.0;
    CertifiedBox box;
    bool capped = false; // alpha hit the doubling cap while still certified
};

/// Generalized unreduced Jacobian
///   F = [[P A + R^T C, P B + R^T D], [Q^T C, Q^T D]]  ( = Z^T J ).
Eigen::MatrixXd build_generalized_unreduced(const BlockPartition& blocks,
                                            const AuxiliaryMatrix& z);

/// Generalized reduced Jacobian F_r = P J_r.
Eigen::MatrixXd build_generalized_reduced(const Eigen::MatrixXd& p,
                                          const Eigen::MatrixXd& j_r);

/// lambda_max(Z^T J + J^T Z). The point satisfies the matrix inequality with
/// some zeta < 0 iff this value is negative.
double bmi_value(const Eigen::MatrixXd& j, const AuxiliaryMatrix& z);

/// Deterministic analytic construction of a feasible certificate parameter
/// at a lifted point with Hurwitz reduced Jacobian:
///   P from the Lyapunov equation J_r^T P + P J_r = -I,
///   R = -(P B D^{-1})^T,
///   Q = -eps D^{-T} with eps halved from 1 until the BMI value is negative.
/// Throws ConstructionError when J_r is not Hurwitz or the search exhausts
/// its 60 halvings.
Certificate construct_z_star(const AffineJacobianModel& model,
                             const Eigen::VectorXd& z_eq);

/// Certifies a single lifted point. With a fixed Z the BMI value is simply
/// evaluated; without one the analytic construction is attempted at the
/// point itself and failures become "uncertified" with a reason.
PointCheck certify_point(const AffineJacobianModel& model,
                         const Eigen::VectorXd& z,
                         const std::optional<AuxiliaryMatrix>& fixed_z = std::nullopt);

/// Robust certification of a physical box under a fixed Z: the lifted box is
/// enclosed by interval propagation and the BMI value is maximized exactly
/// over its vertices (at most 2^20). Vertex evaluations may run in parallel;
/// the reduction is deterministic.
CertifiedBox certify_box(const AffineJacobianModel& model, const BoxSpec& box,
                         const AuxiliaryMatrix& z, int threads = 1);

/// Grows a box around a certified center by bisection on the scale alpha.
/// Half-widths are alpha * weight_i * |center_i| (absolute alpha * weight_i
/// for coordinates whose center is zero). Weights length n + m.
GrowResult grow_box(const AffineJacobianModel& model,
                    const Eigen::VectorXd& center,
                    const Eigen::VectorXd& weights, const AuxiliaryMatrix& z,
                    double tol = 1e-3, int threads = 1);

/// The box(alpha) used by grow_box; exposed so outputs can be reproduced.
BoxSpec scaled_box(const AffineJacobianModel& model,
                   const Eigen::VectorXd& center,
                   const Eigen::VectorXd& weights, double alpha);

} // namespace mudae
