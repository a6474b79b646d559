#include "mudae/model.hpp"

#include "mudae/errors.hpp"
#include "two_bus_detail.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace mudae {

namespace {

constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonMaxIter = 50;
constexpr double kConditionCap = 1e8;

double feature_value(const Feature& f, const Eigen::VectorXd& physical) {
    const double v = physical[f.var];
    switch (f.kind) {
    case FeatureKind::BaseVar: return v;
    case FeatureKind::Sin: return std::sin(v);
    case FeatureKind::Cos: return std::cos(v);
    }
    throw InputError("feature_value: unknown feature kind");
}

std::string feature_name(const Feature& f, const AffineJacobianModel& model) {
    switch (f.kind) {
    case FeatureKind::BaseVar: return model.var_name(f.var);
    case FeatureKind::Sin: return "sin(" + model.var_name(f.var) + ")";
    case FeatureKind::Cos: return "cos(" + model.var_name(f.var) + ")";
    }
    return "?";
}

// Exact interval image of sin over [lo, hi] by locating contained extrema.
Interval sin_interval(double lo, double hi) {
    if (hi - lo >= 2.0 * M_PI) return {-1.0, 1.0};
    double minv = std::min(std::sin(lo), std::sin(hi));
    double maxv = std::max(std::sin(lo), std::sin(hi));
    // Peaks at pi/2 + 2k*pi, troughs at -pi/2 + 2k*pi.
    const double first_peak = M_PI_2 + 2.0 * M_PI * std::ceil((lo - M_PI_2) / (2.0 * M_PI));
    if (first_peak <= hi) maxv = 1.0;
    const double first_trough = -M_PI_2 + 2.0 * M_PI * std::ceil((lo + M_PI_2) / (2.0 * M_PI));
    if (first_trough <= hi) minv = -1.0;
    return {minv, maxv};
}

Interval cos_interval(double lo, double hi) {
    return sin_interval(lo + M_PI_2, hi + M_PI_2);
}

Interval feature_interval(const Feature& f, const Interval& base) {
    switch (f.kind) {
    case FeatureKind::BaseVar: return base;
    case FeatureKind::Sin: return sin_interval(base.lo, base.hi);
    case FeatureKind::Cos: return cos_interval(base.lo, base.hi);
    }
    throw InputError("feature_interval: unknown feature kind");
}

Interval interval_product(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

} // namespace

double Residuals::inf_norm() const {
    double r = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) r = std::max(r, std::abs(f[i]));
    for (Eigen::Index i = 0; i < g.size(); ++i) r = std::max(r, std::abs(g[i]));
    return r;
}

std::string AffineJacobianModel::var_name(int i) const {
    const std::string& raw = names.at(static_cast<std::size_t>(i));
    const auto bracket = raw.find('[');
    return bracket == std::string::npos ? raw : raw.substr(0, bracket);
}

bool AffineJacobianModel::is_angle(int var) const {
    const std::string& raw = names.at(static_cast<std::size_t>(var));
    return raw.find("[rad]") != std::string::npos;
}

std::string AffineJacobianModel::coord_name(int k) const {
    const auto& coord = terms.at(static_cast<std::size_t>(k)).first;
    std::string out;
    for (std::size_t i = 0; i < coord.factors.size(); ++i) {
        if (i > 0) out += "*";
        out += feature_name(coord.factors[i], *this);
    }
    return out;
}

void validate_model(const AffineJacobianModel& model) {
    if (model.n < 1 || model.m < 0)
        throw InputError("model: need n >= 1 dynamic states and m >= 0 algebraic variables");
    const int order = model.order();
    if (model.j0.rows() != order || model.j0.cols() != order)
        throw InputError("model: J0 order does not match n + m");
    if (!model.j0.allFinite())
        throw InputError("model: J0 has non-finite entries");
    if (static_cast<int>(model.names.size()) != order)
        throw InputError("model: names length does not match n + m");
    if (model.base_point.size() != order)
        throw InputError("model: base_point length does not match n + m");

    std::set<std::vector<std::pair<int, int>>> seen;
    for (const auto& [coord, jk] : model.terms) {
        if (coord.factors.empty() || coord.factors.size() > 2)
            throw InputError("model: lifted coordinates must have 1 or 2 factors");
        std::vector<std::pair<int, int>> key;
        for (const auto& f : coord.factors) {
            if (f.var < 0 || f.var >= order)
                throw InputError("model: feature variable index out of range");
            if ((f.kind == FeatureKind::Sin || f.kind == FeatureKind::Cos) &&
                !model.is_angle(f.var))
                throw InputError("model: sin/cos features require an angle-typed ([rad]) variable");
            key.emplace_back(static_cast<int>(f.kind), f.var);
        }
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second)
            throw InputError("model: duplicate lifted coordinate");
        if (jk.rows() != order || jk.cols() != order)
            throw InputError("model: term matrix order does not match n + m");
        if (!jk.allFinite())
            throw InputError("model: term matrix has non-finite entries");
    }

    const Eigen::MatrixXd j = jacobian_at(model, evaluate_lift(model, model.base_point));
    const auto blocks = block_partition(j, model.n, model.m);
    if (model.m > 0 && d_block_condition(blocks) >= kConditionCap)
        throw InputError("model: D block is numerically singular at the base point");
}

Eigen::VectorXd evaluate_lift(const AffineJacobianModel& model,
                              const Eigen::VectorXd& physical) {
    if (physical.size() != model.order())
        throw InputError("evaluate_lift: physical vector length mismatch");
    Eigen::VectorXd z(model.lift_size());
    for (int k = 0; k < model.lift_size(); ++k) {
        double v = 1.0;
        for (const auto& f : model.terms[static_cast<std::size_t>(k)].first.factors)
            v *= feature_value(f, physical);
        z[k] = v;
    }
    return z;
}

Eigen::MatrixXd jacobian_at(const AffineJacobianModel& model,
                            const Eigen::VectorXd& z) {
    if (z.size() != model.lift_size())
        throw InputError("jacobian_at: lifted vector length mismatch");
    Eigen::MatrixXd j = model.j0;
    for (int k = 0; k < model.lift_size(); ++k)
        j += z[k] * model.terms[static_cast<std::size_t>(k)].second;
    return j;
}

BlockPartition block_partition(const Eigen::MatrixXd& j, int n, int m) {
    if (j.rows() != n + m || j.cols() != n + m)
        throw InputError("block_partition: matrix order does not match n + m");
    BlockPartition blocks;
    blocks.a = j.topLeftCorner(n, n);
    blocks.b = j.topRightCorner(n, m);
    blocks.c = j.bottomLeftCorner(m, n);
    blocks.d = j.bottomRightCorner(m, m);
    return blocks;
}

double d_block_condition(const BlockPartition& blocks) {
    if (blocks.d.rows() == 0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(blocks.d);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

Eigen::MatrixXd reduced_jacobian(const BlockPartition& blocks) {
    if (blocks.d.rows() == 0) return blocks.a;
    if (d_block_condition(blocks) >= kConditionCap)
        throw ReductionError(
            "reduced_jacobian: D block is singular (algebraic singularity; the "
            "reduced-system stability criterion is undefined here)");
    return blocks.a - blocks.b * blocks.d.partialPivLu().solve(blocks.c);
}

Residuals residuals(const AffineJacobianModel& model,
                    const Eigen::VectorXd& physical) {
    if (!model.has_residuals())
        throw UnsupportedError("residuals: model carries no residual definition");
    if (physical.size() != model.order())
        throw InputError("residuals: physical vector length mismatch");
    return detail::two_bus_residuals(*model.two_bus, physical);
}

Eigen::VectorXd solve_equilibrium(const AffineJacobianModel& model,
                                  const Eigen::VectorXd& guess) {
    if (!model.has_residuals())
        throw UnsupportedError("solve_equilibrium: model carries no residual definition");
    if (guess.size() != model.order())
        throw InputError("solve_equilibrium: guess length mismatch");

    Eigen::VectorXd point = guess;
    for (int iter = 0; iter <= kNewtonMaxIter; ++iter) {
        const Residuals r = residuals(model, point);
        if (r.inf_norm() <= kNewtonTol) return point;
        if (iter == kNewtonMaxIter) break;

        const Eigen::MatrixXd j = jacobian_at(model, evaluate_lift(model, point));
        Eigen::VectorXd rhs(model.order());
        rhs.head(model.n) = -r.f;
        rhs.tail(model.m) = -r.g;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
        if (!lu.isInvertible())
            throw ConvergenceError("solve_equilibrium: singular Newton step");
        const Eigen::VectorXd step = lu.solve(rhs);
        if (!step.allFinite())
            throw ConvergenceError("solve_equilibrium: non-finite Newton step");
        point += step;
    }
    throw ConvergenceError("solve_equilibrium: no convergence in 50 iterations");
}

AlgebraicSolve solve_algebraic(const AffineJacobianModel& model,
                               const Eigen::VectorXd& x_part,
                               const Eigen::VectorXd& y_guess) {
    if (!model.has_residuals())
        throw UnsupportedError("solve_algebraic: model carries no residual definition");
    if (x_part.size() != model.n || y_guess.size() != model.m)
        throw InputError("solve_algebraic: block length mismatch");

    Eigen::VectorXd physical(model.order());
    physical.head(model.n) = x_part;
    physical.tail(model.m) = y_guess;

    AlgebraicSolve out;
    for (int iter = 0; iter <= kNewtonMaxIter; ++iter) {
        const Residuals r = residuals(model, physical);
        out.residual_inf = r.g.size() == 0 ? 0.0 : r.g.cwiseAbs().maxCoeff();
        out.iterations = iter;
        if (out.residual_inf <= kNewtonTol) {
            out.converged = true;
            out.y = physical.tail(model.m);
            return out;
        }
        if (iter == kNewtonMaxIter) break;

        const Eigen::MatrixXd j = jacobian_at(model, evaluate_lift(model, physical));
        const Eigen::MatrixXd d = j.bottomRightCorner(model.m, model.m);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
        if (!lu.isInvertible()) break;
        const Eigen::VectorXd step = lu.solve(-r.g);
        if (!step.allFinite()) break;
        physical.tail(model.m) += step;
    }
    out.converged = false;
    out.y = physical.tail(model.m);
    return out;
}

std::vector<Interval> physical_intervals(const AffineJacobianModel& model,
                                         const BoxSpec& box) {
    std::vector<Interval> intervals(static_cast<std::size_t>(model.order()));
    for (int i = 0; i < model.order(); ++i) {
        const double pin = model.base_point[i];
        intervals[static_cast<std::size_t>(i)] = {pin, pin};
    }
    for (const auto& [var, iv] : box) {
        if (var < 0 || var >= model.order())
            throw InputError("box: variable index out of range");
        if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)) || iv.lo > iv.hi)
            throw InputError("box: intervals must be finite with lo <= hi");
        intervals[static_cast<std::size_t>(var)] = iv;
    }
    return intervals;
}

std::vector<Interval> propagate_box(const AffineJacobianModel& model,
                                    const BoxSpec& box) {
    const auto phys = physical_intervals(model, box);
    std::vector<Interval> lifted;
    lifted.reserve(model.terms.size());
    for (const auto& [coord, jk] : model.terms) {
        Interval acc{1.0, 1.0};
        bool first = true;
        for (const auto& f : coord.factors) {
            const Interval fi = feature_interval(f, phys[static_cast<std::size_t>(f.var)]);
            acc = first ? fi : interval_product(acc, fi);
            first = false;
        }
        lifted.push_back(acc);
    }
    return lifted;
}

} // namespace mudae
