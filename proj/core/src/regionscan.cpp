#include "mudae/regionscan.hpp"

#include "mudae/errors.hpp"
#include "mudae/measures.hpp"
#include "mudae/parallel.hpp"
#include "mudae/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mudae {

namespace {

constexpr double kConditionCap = 1e8;

void apply_axis(const AffineJacobianModel& model, const Axis& axis, double value,
                Eigen::VectorXd& point) {
    switch (axis.kind) {
    case Axis::Kind::Physical:
        if (axis.var < 0 || axis.var >= model.order())
            throw InputError("scan axis: variable index out of range");
        point[axis.var] = value;
        return;
    case Axis::Kind::VoltageMagnitude: {
        if (axis.var < 0 || axis.var >= model.order() || axis.var2 < 0 ||
            axis.var2 >= model.order() || axis.var == axis.var2)
            throw InputError("scan axis: voltage pair indices out of range");
        const double bx = model.base_point[axis.var];
        const double by = model.base_point[axis.var2];
        const double base_mag = std::hypot(bx, by);
        if (base_mag <= 0.0)
            throw InputError("scan axis: base voltage magnitude is zero");
        point[axis.var] = value * bx / base_mag;
        point[axis.var2] = value * by / base_mag;
        return;
    }
    }
    throw InputError("scan axis: unknown kind");
}

} // namespace

std::string to_string(Classification c) {
    switch (c) {
    case Classification::ExactStable: return "ExactStable";
    case Classification::BmiCertified: return "BmiCertified";
    case Classification::Unstable: return "Unstable";
    case Classification::AlgebraicSingular: return "AlgebraicSingular";
    }
    return "?";
}

std::string ClassifyMode::name() const {
    switch (kind) {
    case Kind::Exact: return "exact";
    case Kind::BmiFixedZ: return "bmi";
    case Kind::BmiAtPoint: return "bmi_at_point";
    }
    return "?";
}

Classification classify_point(const AffineJacobianModel& model,
                              const Eigen::VectorXd& physical,
                              const ClassifyMode& mode) {
    if (physical.size() != model.order())
        throw InputError("classify_point: point length mismatch");
    const Eigen::VectorXd z = evaluate_lift(model, physical);
    const auto blocks = block_partition(jacobian_at(model, z), model.n, model.m);
    if (model.m > 0 && d_block_condition(blocks) >= kConditionCap)
        return Classification::AlgebraicSingular;

    switch (mode.kind) {
    case ClassifyMode::Kind::Exact:
        return is_hurwitz(reduced_jacobian(blocks), 0.0)
                   ? Classification::ExactStable
                   : Classification::Unstable;
    case ClassifyMode::Kind::BmiFixedZ: {
        if (!mode.z.has_value())
            throw InputError("classify_point: BmiFixedZ mode needs an auxiliary matrix");
        const PointCheck check = certify_point(model, z, mode.z);
        return check.certified ? Classification::BmiCertified
                               : Classification::Unstable;
    }
    case ClassifyMode::Kind::BmiAtPoint: {
        const PointCheck check = certify_point(model, z);
        return check.certified ? Classification::BmiCertified
                               : Classification::Unstable;
    }
    }
    throw InputError("classify_point: unknown mode");
}

Eigen::VectorXd axis_point(const AffineJacobianModel& model, const Axis& axis1,
                           const Axis& axis2, int i1, int i2) {
    Eigen::VectorXd point = model.base_point;
    apply_axis(model, axis1, axis1.value_at(i1), point);
    apply_axis(model, axis2, axis2.value_at(i2), point);
    return point;
}

ScanResult scan_grid(const AffineJacobianModel& model, const Axis& axis1,
                     const Axis& axis2, const std::vector<ClassifyMode>& modes,
                     int threads) {
    if (axis1.steps < 1 || axis2.steps < 1)
        throw InputError("scan_grid: axes need at least one step");
    if (modes.empty()) throw InputError("scan_grid: need at least one mode");
    const bool same_physical = axis1.kind == Axis::Kind::Physical &&
                               axis2.kind == Axis::Kind::Physical &&
                               axis1.var == axis2.var;
    if (same_physical)
        throw InputError("scan_grid: axes must use distinct variables");

    ScanResult out;
    out.axis1 = axis1;
    out.axis2 = axis2;
    for (const auto& mode : modes) out.mode_names.push_back(mode.name());

    const std::int64_t cells =
        static_cast<std::int64_t>(axis1.steps) * axis2.steps;
    out.cells.assign(static_cast<std::size_t>(cells), {});

    parallel_for(cells, threads, [&](std::int64_t cell) {
        const int i1 = static_cast<int>(cell / axis2.steps);
        const int i2 = static_cast<int>(cell % axis2.steps);
        const Eigen::VectorXd point = axis_point(model, axis1, axis2, i1, i2);
        std::vector<Classification> verdicts;
        verdicts.reserve(modes.size());
        for (const auto& mode : modes)
            verdicts.push_back(classify_point(model, point, mode));
        out.cells[static_cast<std::size_t>(cell)] = std::move(verdicts);
    });
    return out;
}

AreaEstimate area_measure(const AffineJacobianModel& model, const BoxSpec& box,
                          const ClassifyMode& mode, std::int64_t samples,
                          std::uint64_t seed, int threads) {
    if (samples < 1) throw InputError("area_measure: samples must be >= 1");
    const auto intervals = physical_intervals(model, box);

    AreaEstimate out;
    out.total_count = samples;
    out.seed = seed;

    // Spectral abscissa at the box center.
    Eigen::VectorXd center(model.order());
    for (int i = 0; i < model.order(); ++i)
        center[i] = intervals[static_cast<std::size_t>(i)].mid();
    const auto center_blocks =
        block_partition(jacobian_at(model, evaluate_lift(model, center)), model.n, model.m);
    out.sigma_critical = spectral_abscissa(reduced_jacobian(center_blocks));

    std::vector<unsigned char> stable(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, threads, [&](std::int64_t i) {
        Eigen::VectorXd point(model.order());
        for (int dim = 0; dim < model.order(); ++dim) {
            const Interval& iv = intervals[static_cast<std::size_t>(dim)];
            point[dim] = iv.lo + (iv.hi - iv.lo) *
                                     uniform01(seed, static_cast<std::uint64_t>(i),
                                               static_cast<std::uint64_t>(dim));
        }
        const Classification c = classify_point(model, point, mode);
        stable[static_cast<std::size_t>(i)] =
            (c == Classification::ExactStable || c == Classification::BmiCertified) ? 1 : 0;
    });

    out.stable_count = std::accumulate(stable.begin(), stable.end(), std::int64_t{0});
    out.ratio = static_cast<double>(out.stable_count) / static_cast<double>(out.total_count);
    return out;
}

RegressionFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw InputError("linear_fit: need two equal-length series of at least 2 points");
    const auto [min_x, max_x] = std::minmax_element(xs.begin(), xs.end());
    if (*min_x == *max_x)
        throw InputError("linear_fit: degenerate fit (regressor has zero variance)");
    const double n = static_cast<double>(xs.size());
    const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0)
        throw InputError("linear_fit: degenerate fit (regressor has zero variance)");

    RegressionFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.r_value = syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
    return fit;
}

AreaExperiment area_vs_sigma_experiment(const AffineJacobianModel& model,
                                        const std::vector<Eigen::VectorXd>& centers,
                                        const Eigen::VectorXd& half_widths,
                                        std::int64_t samples, std::uint64_t seed,
                                        int threads) {
    if (half_widths.size() != model.order())
        throw InputError("area_vs_sigma_experiment: half_widths length mismatch");

    AreaExperiment out;
    std::vector<double> xs, ys_exact, ys_bmi;
    int id = 0;
    for (const auto& center : centers) {
        CenterOutcome outcome;
        outcome.id = id++;
        try {
            const Eigen::VectorXd z = evaluate_lift(model, center);
            const Certificate cert = construct_z_star(model, z);

            BoxSpec box;
            for (int i = 0; i < model.order(); ++i)
                if (half_widths[i] > 0.0)
                    box[i] = Interval{center[i] - half_widths[i],
                                      center[i] + half_widths[i]};

            AffineJacobianModel centered = model;
            centered.base_point = center; // pins unlisted variables to the center
            outcome.exact = area_measure(centered, box, ClassifyMode::exact(),
                                         samples, seed, threads);
            outcome.bmi = area_measure(centered, box, ClassifyMode::bmi_fixed(cert.z),
                                       samples, seed, threads);
            outcome.sigma_critical = outcome.exact.sigma_critical;
            outcome.feasible = true;

            xs.push_back(outcome.sigma_critical);
            ys_exact.push_back(outcome.exact.ratio);
            ys_bmi.push_back(outcome.bmi.ratio);
        } catch (const Error&) {
            outcome.feasible = false; // skipped with marker
        }
        out.centers.push_back(std::move(outcome));
    }

    try {
        out.fit_exact = linear_fit(xs, ys_exact);
        out.fit_bmi = linear_fit(xs, ys_bmi);
    } catch (const InputError&) {
        out.fit_exact.degenerate = true;
        out.fit_bmi.degenerate = true;
    }
    return out;
}

} // namespace mudae
