#include "mudae/spectra.hpp"

#include "mudae/errors.hpp"
#include "mudae/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mudae {

namespace {

constexpr double kGapTol = 1e-8;
constexpr double kNormalizationTol = 1e-12;
constexpr int kInverseIterMax = 50;

// Right eigenvector of a real matrix for a computed (possibly complex)
// eigenvalue, by shifted inverse iteration on the complexified matrix.
Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXd& m,
                                   std::complex<double> lambda) {
    const Eigen::Index n = m.rows();
    const double scale = std::max(1.0, m.norm());
    // Small off-axis shift keeps the shifted matrix invertible.
    const std::complex<double> shift =
        lambda + std::complex<double>(1e-10 * scale, 1e-10 * scale);

    Eigen::MatrixXcd shifted = m.cast<std::complex<double>>();
    shifted.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);

    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    v.normalize();
    double prev_growth = 0.0;
    for (int iter = 0; iter < kInverseIterMax; ++iter) {
        Eigen::VectorXcd w = lu.solve(v);
        const double growth = w.norm();
        if (!std::isfinite(growth) || growth == 0.0)
            throw NumericError("inverse iteration produced a non-finite vector");
        v = w / growth;
        const double resid = (m * v - lambda * v).norm();
        if (resid <= 1e-10 * scale) return v;
        if (iter > 3 && std::abs(growth - prev_growth) <= 1e-6 * growth) break;
        prev_growth = growth;
    }
    const double resid = (m * v - lambda * v).norm();
    if (resid > 1e-8 * scale)
        throw NumericError("inverse iteration stagnated before reaching the residual bound");
    return v;
}

void require_simple(const std::vector<std::complex<double>>& eigs) {
    for (std::size_t i = 0; i < eigs.size(); ++i)
        for (std::size_t j = i + 1; j < eigs.size(); ++j)
            if (std::abs(eigs[i] - eigs[j]) <= kGapTol) {
                std::ostringstream os;
                os << "clustered eigenvalues (gap <= " << kGapTol
                   << "); sensitivity is undefined for multiple eigenvalues";
                throw NumericError(os.str());
            }
}

// Greedy nearest-neighbor pairing: returns perm with perm[slot] = index into
// `now` continuing the branch previously held by `slot`. Ties resolve to the
// lexicographically smallest (slot, index) pair.
std::vector<int> pair_branches(const std::vector<std::complex<double>>& prev,
                               const std::vector<std::complex<double>>& now,
                               double* max_distance) {
    const int n = static_cast<int>(prev.size());
    std::vector<int> perm(static_cast<std::size_t>(n), -1);
    std::vector<bool> used_prev(static_cast<std::size_t>(n), false);
    std::vector<bool> used_now(static_cast<std::size_t>(n), false);
    double worst = 0.0;
    for (int pick = 0; pick < n; ++pick) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            if (used_prev[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < n; ++j) {
                if (used_now[static_cast<std::size_t>(j)]) continue;
                const double d = std::abs(prev[static_cast<std::size_t>(i)] -
                                          now[static_cast<std::size_t>(j)]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_prev[static_cast<std::size_t>(bi)] = true;
        used_now[static_cast<std::size_t>(bj)] = true;
        perm[static_cast<std::size_t>(bi)] = bj;
        worst = std::max(worst, best);
    }
    if (max_distance) *max_distance = worst;
    return perm;
}

int argmax_real(const std::vector<std::complex<double>>& eigs) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(eigs.size()); ++i) {
        const auto& a = eigs[static_cast<std::size_t>(i)];
        const auto& b = eigs[static_cast<std::size_t>(best)];
        if (a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag()))
            best = i;
    }
    return best;
}

bool is_complex_mode(std::complex<double> lambda) {
    return std::abs(lambda.imag()) > 1e-9 * std::max(1.0, std::abs(lambda));
}

struct SweepFrame {
    double value = 0.0;
    bool feasible = false;
    Eigen::VectorXd physical;
    std::vector<std::complex<double>> tracked; // slot order
    int critical = -1;
    bool crossing = false;
    double pairing_distance = 0.0;
};

// Shared sweep driver: varies a dynamic variable, re-solves the algebraic
// constraints with warm starts, and tracks eigenvalue branches across steps.
std::vector<SweepFrame> sweep_frames(const AffineJacobianModel& model, int var,
                                     double lo, double hi, int steps) {
    if (!model.has_residuals())
        throw UnsupportedError("sweep: model carries no residual definition");
    if (var < 0 || var >= model.n)
        throw InputError("sweep: swept variable must be a dynamic state index");
    if (steps < 1) throw InputError("sweep: need at least one step");
    if (!(lo <= hi)) throw InputError("sweep: need lo <= hi");

    std::vector<SweepFrame> frames;
    frames.reserve(static_cast<std::size_t>(steps));

    Eigen::VectorXd x = model.base_point.head(model.n);
    Eigen::VectorXd y_warm = model.base_point.tail(model.m);

    bool have_prev = false;
    std::vector<std::complex<double>> prev_tracked;
    int prev_critical = -1;

    for (int step = 0; step < steps; ++step) {
        SweepFrame frame;
        frame.value = steps == 1 ? lo : lo + (hi - lo) * step / (steps - 1);
        x[var] = frame.value;

        const AlgebraicSolve alg = solve_algebraic(model, x, y_warm);
        if (!alg.converged) {
            frame.feasible = false; // infeasibility marker; tracking pauses
            frames.push_back(frame);
            continue;
        }
        y_warm = alg.y;
        frame.physical.resize(model.order());
        frame.physical.head(model.n) = x;
        frame.physical.tail(model.m) = alg.y;
        frame.feasible = true;

        const Eigen::VectorXd z = evaluate_lift(model, frame.physical);
        const auto blocks = block_partition(jacobian_at(model, z), model.n, model.m);
        std::vector<std::complex<double>> eigs;
        try {
            eigs = spectrum(reduced_jacobian(blocks));
        } catch (const ReductionError&) {
            frame.feasible = false;
            frames.push_back(frame);
            continue;
        }

        if (!have_prev) {
            frame.tracked = eigs; // slots start in sorted order
            frame.critical = argmax_real(frame.tracked);
            frame.crossing = false;
        } else {
            const auto perm = pair_branches(prev_tracked, eigs, &frame.pairing_distance);
            frame.tracked.resize(eigs.size());
            for (std::size_t slot = 0; slot < perm.size(); ++slot)
                frame.tracked[slot] = eigs[static_cast<std::size_t>(perm[slot])];
            frame.critical = argmax_real(frame.tracked);
            const bool identity_changed = frame.critical != prev_critical;
            const bool nature_changed =
                is_complex_mode(frame.tracked[static_cast<std::size_t>(frame.critical)]) !=
                is_complex_mode(prev_tracked[static_cast<std::size_t>(prev_critical)]);
            frame.crossing = identity_changed || nature_changed;
        }
        prev_tracked = frame.tracked;
        prev_critical = frame.critical;
        have_prev = true;
        frames.push_back(frame);
    }
    return frames;
}

} // namespace

PencilSpectrum pencil_finite_spectrum(const AffineJacobianModel& model,
                                      const Eigen::VectorXd& z) {
    const auto blocks = block_partition(jacobian_at(model, z), model.n, model.m);
    PencilSpectrum out;
    try {
        out.finite = spectrum(reduced_jacobian(blocks));
    } catch (const ReductionError& e) {
        throw ReductionError(std::string("pencil_finite_spectrum: ") + e.what());
    }
    out.infinite_count = model.m;
    return out;
}

std::vector<EigenPair> eigen_pairs(const AffineJacobianModel& model,
                                   const Eigen::VectorXd& z) {
    const Eigen::MatrixXd j = jacobian_at(model, z);
    const auto blocks = block_partition(j, model.n, model.m);
    const Eigen::MatrixXd j_r = reduced_jacobian(blocks);
    const auto eigs = spectrum(j_r);
    require_simple(eigs);

    const Eigen::PartialPivLU<Eigen::MatrixXd> d_lu(blocks.d);
    const Eigen::PartialPivLU<Eigen::MatrixXd> dt_lu(blocks.d.transpose());

    std::vector<EigenPair> out;
    out.reserve(eigs.size());
    for (const auto& lambda : eigs) {
        const Eigen::VectorXcd v = inverse_iteration(j_r, lambda);
        const Eigen::VectorXcd u = inverse_iteration(j_r.transpose(), lambda);

        EigenPair pair;
        pair.lambda = lambda;
        pair.right_nu.resize(model.order());
        pair.right_nu.head(model.n) = v;
        pair.right_nu.tail(model.m) =
            model.m > 0 ? (-d_lu.solve((blocks.c * v).eval())).eval()
                        : Eigen::VectorXcd(0);
        pair.left_upsilon.resize(model.order());
        pair.left_upsilon.head(model.n) = u;
        pair.left_upsilon.tail(model.m) =
            model.m > 0 ? (-dt_lu.solve((blocks.b.transpose() * u).eval())).eval()
                        : Eigen::VectorXcd(0);

        // E has ones on the first n diagonal entries, zeros elsewhere.
        const std::complex<double> normalization =
            pair.left_upsilon.head(model.n).transpose() * pair.right_nu.head(model.n);
        if (std::abs(normalization) <= kNormalizationTol)
            throw NumericError(
                "eigen_pairs: upsilon^T E nu is numerically zero (degenerate normalization)");
        out.push_back(std::move(pair));
    }
    return out;
}

namespace {

std::complex<double> sensitivity_from_pair(const AffineJacobianModel& model,
                                           const EigenPair& pair, int k) {
    const Eigen::MatrixXcd jk =
        model.terms[static_cast<std::size_t>(k)].second.cast<std::complex<double>>();
    const std::complex<double> numer =
        pair.left_upsilon.transpose() * jk * pair.right_nu;
    const std::complex<double> denom =
        pair.left_upsilon.head(model.n).transpose() * pair.right_nu.head(model.n);
    if (std::abs(denom) <= kNormalizationTol)
        throw NumericError("eigenvalue_sensitivity: degenerate normalization");
    return numer / denom;
}

} // namespace

std::complex<double> eigenvalue_sensitivity(const AffineJacobianModel& model,
                                            const Eigen::VectorXd& z, int i,
                                            int k) {
    if (k < 0 || k >= model.lift_size())
        throw InputError("eigenvalue_sensitivity: coordinate index out of range");
    const auto pairs = eigen_pairs(model, z);
    if (i < 0 || i >= static_cast<int>(pairs.size()))
        throw InputError("eigenvalue_sensitivity: eigenvalue index out of range");
    return sensitivity_from_pair(model, pairs[static_cast<std::size_t>(i)], k);
}

double lift_partial(const AffineJacobianModel& model,
                    const Eigen::VectorXd& physical, int k, int var) {
    const auto& factors = model.terms[static_cast<std::size_t>(k)].first.factors;
    auto value = [&](const Feature& f) {
        const double v = physical[f.var];
        switch (f.kind) {
        case FeatureKind::BaseVar: return v;
        case FeatureKind::Sin: return std::sin(v);
        case FeatureKind::Cos: return std::cos(v);
        }
        return 0.0;
    };
    auto derivative = [&](const Feature& f) {
        if (f.var != var) return 0.0;
        const double v = physical[f.var];
        switch (f.kind) {
        case FeatureKind::BaseVar: return 1.0;
        case FeatureKind::Sin: return std::cos(v);
        case FeatureKind::Cos: return -std::sin(v);
        }
        return 0.0;
    };
    // Product rule over at most two factors.
    double total = 0.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        double term = derivative(factors[i]);
        for (std::size_t j = 0; j < factors.size(); ++j)
            if (j != i) term *= value(factors[j]);
        total += term;
    }
    return total;
}

std::vector<RootLocusStep> root_locus_sweep(const AffineJacobianModel& model,
                                            int var, double lo, double hi,
                                            int steps) {
    const auto frames = sweep_frames(model, var, lo, hi, steps);
    std::vector<RootLocusStep> out;
    out.reserve(frames.size());
    for (const auto& frame : frames) {
        RootLocusStep step;
        step.var_value = frame.value;
        step.feasible = frame.feasible;
        step.eigenvalues = frame.tracked;
        step.critical_index = frame.critical;
        step.crossing = frame.crossing;
        step.pairing_distance = frame.pairing_distance;
        step.physical = frame.physical;
        out.push_back(std::move(step));
    }
    return out;
}

std::vector<SensitivityStep> sensitivity_sweep(const AffineJacobianModel& model,
                                               int var, double lo, double hi,
                                               int steps, int eig_index,
                                               const std::vector<int>& coords) {
    if (eig_index < 0 || eig_index >= model.n)
        throw InputError("sensitivity_sweep: eigenvalue slot out of range");
    const auto frames = sweep_frames(model, var, lo, hi, steps);

    std::vector<SensitivityStep> out;
    out.reserve(frames.size());
    for (const auto& frame : frames) {
        SensitivityStep step;
        step.var_value = frame.value;
        step.feasible = frame.feasible;
        if (!frame.feasible) {
            out.push_back(std::move(step));
            continue;
        }
        step.lambda = frame.tracked[static_cast<std::size_t>(eig_index)];

        const Eigen::VectorXd z = evaluate_lift(model, frame.physical);
        try {
            // Map the tracked slot back to the sorted order used by eigen_pairs.
            const auto pairs = eigen_pairs(model, z);
            int sorted_index = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
                const double d =
                    std::abs(pairs[static_cast<std::size_t>(i)].lambda - step.lambda);
                if (d < best) {
                    best = d;
                    sorted_index = i;
                }
            }
            const EigenPair& pair = pairs[static_cast<std::size_t>(sorted_index)];

            step.dlambda_dz.reserve(coords.size());
            for (int k : coords) {
                if (k < 0 || k >= model.lift_size())
                    throw InputError("sensitivity_sweep: coordinate index out of range");
                step.dlambda_dz.push_back(sensitivity_from_pair(model, pair, k));
            }
            std::complex<double> chain = 0.0;
            for (int k = 0; k < model.lift_size(); ++k)
                chain += sensitivity_from_pair(model, pair, k) *
                         lift_partial(model, frame.physical, k, var);
            step.dlambda_dvar = chain;
        } catch (const NumericError&) {
            step.feasible = false; // clustered eigenvalues mid-sweep
        }
        out.push_back(std::move(step));
    }
    return out;
}

} // namespace mudae
