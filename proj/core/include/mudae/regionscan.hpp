#pragma once

#include "mudae/certify.hpp"
#include "mudae/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mudae {

// Per-point stability verdict. BmiCertified is sound: any point it marks is
// also stable under the exact reduced-Jacobian criterion.
enum class Classification { ExactStable, BmiCertified, Unstable, AlgebraicSingular };

std::string to_string(Classification c);

// How a point is judged: the exact eigenvalue criterion, the BMI value under
// a fixed Z, or a per-point certificate construction.
struct ClassifyMode {
    enum class Kind { Exact, BmiFixedZ, BmiAtPoint };
    Kind kind = Kind::Exact;
    std::optional<AuxiliaryMatrix> z; // required for BmiFixedZ

    static ClassifyMode exact() { return {Kind::Exact, std::nullopt}; }
    static ClassifyMode bmi_fixed(AuxiliaryMatrix z_star) {
        return {Kind::BmiFixedZ, std::move(z_star)};
    }
    static ClassifyMode bmi_at_point() { return {Kind::BmiAtPoint, std::nullopt}; }

    std::string name() const;
};

// A scan axis: either one physical variable, or the magnitude of a voltage
// pair swept along the base-point direction (angle preserved).
struct Axis {
    enum class Kind { Physical, VoltageMagnitude };
    Kind kind = Kind::Physical;
    int var = 0;    // physical index (Kind::Physical), or x-component index
    int var2 = 0;   // y-component index (Kind::VoltageMagnitude)
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    static Axis physical(int var, double lo, double hi, int steps) {
        return {Kind::Physical, var, 0, lo, hi, steps};
    }
    static Axis voltage_magnitude(int ix, int iy, double lo, double hi, int steps) {
        return {Kind::VoltageMagnitude, ix, iy, lo, hi, steps};
    }

    double value_at(int step) const {
        return steps == 1 ? lo : lo + (hi - lo) * step / (steps - 1);
    }
};

struct ScanResult {
    Axis axis1, axis2;
    std::vector<std::string> mode_names;
    // Row-major over (axis1 step, axis2 step); one verdict per mode.
    std::vector<std::vector<Classification>> cells;
};

// Monte-Carlo stable-area estimate over a physical box.
struct AreaEstimate {
    std::int64_t stable_count = 0;
    std::int64_t total_count = 0;
    double ratio = 0.0;
    double sigma_critical = 0.0; // spectral abscissa of J_r at the box center
    std::uint64_t seed = 0;
};

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_value = 0.0;
    bool degenerate = false;
};

struct CenterOutcome {
    int id = 0;
    bool feasible = true; // false: skipped with marker
    double sigma_critical = 0.0;
    AreaEstimate exact;
    AreaEstimate bmi;
};

struct AreaExperiment {
    std::vector<CenterOutcome> centers;
    RegressionFit fit_exact;
    RegressionFit fit_bmi;
};

/// Classifies one arbitrary physical state-space point under the given mode.
/// All failure modes map to classifications: a near-singular D block (2-norm
/// condition >= 1e8) yields AlgebraicSingular, anything uncertified/unstable
/// yields Unstable.
Classification classify_point(const AffineJacobianModel& model,
                              const Eigen::VectorXd& physical,
                              const ClassifyMode& mode);

/// Classifies every cell of a 2-D grid (remaining variables pinned at the
/// base point) under each requested mode. Deterministic row-major emission
/// for any worker count.
ScanResult scan_grid(const AffineJacobianModel& model, const Axis& axis1,
                     const Axis& axis2, const std::vector<ClassifyMode>& modes,
                     int threads = 1);

/// Uniform Monte-Carlo sampling of a physical box with a counter-based
/// generator keyed by (seed, sample index, dimension): identical output for
/// identical inputs regardless of worker count.
AreaEstimate area_measure(const AffineJacobianModel& model, const BoxSpec& box,
                          const ClassifyMode& mode, std::int64_t samples,
                          std::uint64_t seed, int threads = 1);

/// Ordinary least squares of ys on xs; r_value is the Pearson correlation.
/// Throws InputError for degenerate xs (all equal) or mismatched lengths.
RegressionFit linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Stable-area experiment: per center, ratios under the
/// exact criterion and under the BMI with Z* rebuilt at that center, then a
/// linear regression of ratio against the center's spectral abscissa per
/// mode. Centers where Z* construction fails are skipped with markers.
AreaExperiment area_vs_sigma_experiment(const AffineJacobianModel& model,
                                        const std::vector<Eigen::VectorXd>& centers,
                                        const Eigen::VectorXd& half_widths,
                                        std::int64_t samples, std::uint64_t seed,
                                        int threads = 1);

/// Physical point of a grid cell (helper shared by the scan and its CSV).
Eigen::VectorXd axis_point(const AffineJacobianModel& model, const Axis& axis1,
                           const Axis& axis2, int i1, int i2);

} // namespace mudae
