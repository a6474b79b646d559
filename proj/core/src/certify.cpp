#include "mudae/certify.hpp"

#include "mudae/errors.hpp"
#include "mudae/measures.hpp"
#include "mudae/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace mudae {

namespace {

constexpr int kMaxHalvings = 60;
constexpr int kMaxVertexCoords = 20;
constexpr double kGrowCap = 10.0;

void require_consistent(const BlockPartition& blocks, const AuxiliaryMatrix& z) {
    const auto n = blocks.a.rows();
    const auto m = blocks.d.rows();
    if (z.p.rows() != n || z.p.cols() != n || z.r.rows() != m ||
        z.r.cols() != n || z.q.rows() != m || z.q.cols() != m)
        throw InputError("auxiliary matrix blocks do not match the Jacobian partition");
}

} // namespace

Eigen::MatrixXd AuxiliaryMatrix::assemble() const {
    const int nn = n(), mm = m();
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nn + mm, nn + mm);
    z.topLeftCorner(nn, nn) = p;
    z.bottomLeftCorner(mm, nn) = r;
    z.bottomRightCorner(mm, mm) = q;
    return z;
}

Eigen::MatrixXd build_generalized_unreduced(const BlockPartition& blocks,
                                            const AuxiliaryMatrix& z) {
    require_consistent(blocks, z);
    const auto n = blocks.a.rows();
    const auto m = blocks.d.rows();
    Eigen::MatrixXd f(n + m, n + m);
    f.topLeftCorner(n, n) = z.p * blocks.a + z.r.transpose() * blocks.c;
    f.topRightCorner(n, m) = z.p * blocks.b + z.r.transpose() * blocks.d;
    f.bottomLeftCorner(m, n) = z.q.transpose() * blocks.c;
    f.bottomRightCorner(m, m) = z.q.transpose() * blocks.d;
    return f;
}

Eigen::MatrixXd build_generalized_reduced(const Eigen::MatrixXd& p,
                                          const Eigen::MatrixXd& j_r) {
    if (p.rows() != j_r.rows() || p.cols() != j_r.cols())
        throw InputError("build_generalized_reduced: order mismatch");
    return p * j_r;
}

double bmi_value(const Eigen::MatrixXd& j, const AuxiliaryMatrix& z) {
    const Eigen::MatrixXd zt_j = z.assemble().transpose() * j;
    return lambda_max_symmetric(zt_j + zt_j.transpose());
}

Certificate construct_z_star(const AffineJacobianModel& model,
                             const Eigen::VectorXd& z_eq) {
    const Eigen::MatrixXd j = jacobian_at(model, z_eq);
    const auto blocks = block_partition(j, model.n, model.m);
    const Eigen::MatrixXd j_r = reduced_jacobian(blocks); // throws on singular D

    if (!is_hurwitz(j_r, 0.0))
        throw ConstructionError(
            "construct_z_star: reduced Jacobian is not Hurwitz at this point");

    AuxiliaryMatrix z;
    z.p = solve_lyapunov(j_r, Eigen::MatrixXd::Identity(model.n, model.n));
    const Eigen::MatrixXd d_inv =
        blocks.d.partialPivLu().solve(Eigen::MatrixXd::Identity(model.m, model.m));
    z.r = -(z.p * blocks.b * d_inv).transpose();

    double eps = 1.0;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
        z.q = -eps * d_inv.transpose();
        const double zeta = bmi_value(j, z);
        if (zeta < 0.0)
            return Certificate{z, zeta, z_eq, CertificateMode::AtPoint};
        eps *= 0.5;
    }
    std::ostringstream os;
    os << "construct_z_star: scaling search exhausted after " << kMaxHalvings
       << " halvings (final zeta = " << bmi_value(j, z) << ")";
    throw ConstructionError(os.str());
}

PointCheck certify_point(const AffineJacobianModel& model,
                         const Eigen::VectorXd& z,
                         const std::optional<AuxiliaryMatrix>& fixed_z) {
    PointCheck out;
    out.point = z;
    if (fixed_z.has_value()) {
        out.mode = CertificateMode::FixedZ;
        out.z = *fixed_z;
        out.zeta = bmi_value(jacobian_at(model, z), *fixed_z);
        out.certified = out.zeta < 0.0;
        if (!out.certified) out.reason = "BMI value is non-negative under the fixed Z";
        return out;
    }
    out.mode = CertificateMode::AtPoint;
    try {
        const Certificate cert = construct_z_star(model, z);
        out.z = cert.z;
        out.zeta = cert.zeta;
        out.certified = cert.certified();
    } catch (const Error& e) {
        out.certified = false;
        out.reason = e.what();
    }
    return out;
}

CertifiedBox certify_box(const AffineJacobianModel& model, const BoxSpec& box,
                         const AuxiliaryMatrix& z, int threads) {
    CertifiedBox out;
    out.physical_box = box;
    out.lifted_box = propagate_box(model, box);
    out.z = z;

    // Non-degenerate lifted coordinates are enumerated; degenerate ones stay
    // pinned at their single value.
    std::vector<int> free_coords;
    for (int k = 0; k < model.lift_size(); ++k)
        if (!out.lifted_box[static_cast<std::size_t>(k)].degenerate())
            free_coords.push_back(k);
    const int kfree = static_cast<int>(free_coords.size());
    if (kfree > kMaxVertexCoords) {
        std::ostringstream os;
        os << "certify_box: " << kfree << " free lifted coordinates exceed the 2^"
           << kMaxVertexCoords << " vertex budget; pin more variables";
        throw BudgetError(os.str());
    }

    Eigen::VectorXd base(model.lift_size());
    for (int k = 0; k < model.lift_size(); ++k)
        base[k] = out.lifted_box[static_cast<std::size_t>(k)].lo;

    const std::int64_t vertex_count = std::int64_t{1} << kfree;
    out.vertex_count = vertex_count;

    std::vector<double> zeta(static_cast<std::size_t>(vertex_count));
    parallel_for(vertex_count, threads, [&](std::int64_t v) {
        Eigen::VectorXd zv = base;
        for (int bit = 0; bit < kfree; ++bit)
            if ((v >> bit) & 1) {
                const int k = free_coords[static_cast<std::size_t>(bit)];
                zv[k] = out.lifted_box[static_cast<std::size_t>(k)].hi;
            }
        zeta[static_cast<std::size_t>(v)] = bmi_value(jacobian_at(model, zv), z);
    });

    out.zeta_star = *std::max_element(zeta.begin(), zeta.end());
    return out;
}

BoxSpec scaled_box(const AffineJacobianModel& model,
                   const Eigen::VectorXd& center,
                   const Eigen::VectorXd& weights, double alpha) {
    if (center.size() != model.order() || weights.size() != model.order())
        throw InputError("scaled_box: center/weights length mismatch");
    BoxSpec box;
    for (int i = 0; i < model.order(); ++i) {
        const double scale = center[i] == 0.0 ? 1.0 : std::abs(center[i]);
        const double half = alpha * weights[i] * scale;
        if (half > 0.0) box[i] = Interval{center[i] - half, center[i] + half};
        else box[i] = Interval{center[i], center[i]};
    }
    return box;
}

GrowResult grow_box(const AffineJacobianModel& model,
                    const Eigen::VectorXd& center,
                    const Eigen::VectorXd& weights, const AuxiliaryMatrix& z,
                    double tol, int threads) {
    if (!(tol > 0.0)) throw InputError("grow_box: tol must be positive");
    if ((weights.array() < 0.0).any())
        throw InputError("grow_box: weights must be non-negative");

    auto certified_at = [&](double alpha) {
        return certify_box(model, scaled_box(model, center, weights, alpha), z, threads);
    };

    const CertifiedBox at_center = certified_at(0.0);
    if (!at_center.certified())
        throw ConstructionError("grow_box: center point is not certified under this Z");

    // Doubling phase.
    double lo = 0.0;
    double hi = 1.0;
    CertifiedBox best = at_center;
    while (true) {
        const CertifiedBox cb = certified_at(hi);
        if (!cb.certified()) break;
        lo = hi;
        best = cb;
        if (hi >= kGrowCap) return GrowResult{kGrowCap, best, true};
        hi = std::min(kGrowCap, hi * 2.0);
    }

    // Bisection: lo certified, hi uncertified. Exit with hi <= lo*(1+tol) so
    // that lo*(1+2*tol) >= hi is guaranteed uncertified by box inclusion.
    while (lo == 0.0 ? hi > 1e-12 : (hi - lo) > tol * lo) {
        const double mid = 0.5 * (lo + hi);
        const CertifiedBox cb = certified_at(mid);
        if (cb.certified()) {
            lo = mid;
            best = cb;
        } else {
            hi = mid;
        }
    }
    return GrowResult{lo, best, false};
}

} // namespace mudae
