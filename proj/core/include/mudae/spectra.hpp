#pragma once

#include "mudae/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace mudae {

// Finite spectrum of the matrix pencil (J(z), E). E is singular for m > 0,
// so the pencil carries m infinite eigenvalues alongside the n finite ones,
// which coincide with the eigenvalues of the reduced Jacobian.
struct PencilSpectrum {
    std::vector<std::complex<double>> finite; // length n, descending real part
    int infinite_count = 0;                   // = m
};

// A finite pencil eigenvalue with full-dimension right (nu) and left
// (upsilon) eigenvectors: (J - lambda E) nu = 0 and upsilon^T (J - lambda E) = 0.
struct EigenPair {
    std::complex<double> lambda;
    Eigen::VectorXcd right_nu;     // length n + m
    Eigen::VectorXcd left_upsilon; // length n + m
};

// One row of a root-locus sweep. Eigenvalue slots keep a tracked identity
// across steps (greedy nearest-neighbor pairing), so slot i traces one branch.
struct RootLocusStep {
    double var_value = 0.0;
    bool feasible = false;
    std::vector<std::complex<double>> eigenvalues; // tracked slot order
    int critical_index = -1;  // slot with maximal real part
    bool crossing = false;    // critical identity changed since previous step
    double pairing_distance = 0.0; // largest step-to-step pairing distance
    Eigen::VectorXd physical; // algebraically consistent point (when feasible)
};

// One row of a sensitivity sweep for a tracked eigenvalue.
struct SensitivityStep {
    double var_value = 0.0;
    bool feasible = false;
    std::complex<double> lambda;
    std::vector<std::complex<double>> dlambda_dz; // per requested coordinate
    std::complex<double> dlambda_dvar;            // chain rule through the lift
};

/// Finite pencil eigenvalues at a lifted point, via the reduced Jacobian.
PencilSpectrum pencil_finite_spectrum(const AffineJacobianModel& model,
                                      const Eigen::VectorXd& z);

/// Eigen pairs for every finite eigenvalue. Requires simple eigenvalues
/// (pairwise gap > 1e-8); reduced eigenvectors come from shifted inverse
/// iteration and are closed to pencil dimension via
///   nu = (v; -D^{-1} C v), upsilon = (u; -D^{-T} B^T u).
std::vector<EigenPair> eigen_pairs(const AffineJacobianModel& model,
                                   const Eigen::VectorXd& z);

/// Analytic sensitivity of finite eigenvalue i to lifted coordinate k:
///   d lambda_i / d z_k = (upsilon_i^T J_k nu_i) / (upsilon_i^T E nu_i).
std::complex<double> eigenvalue_sensitivity(const AffineJacobianModel& model,
                                            const Eigen::VectorXd& z, int i,
                                            int k);

/// Sweeps a dynamic variable over [lo, hi] in `steps` equally spaced values,
/// re-solving the algebraic constraints per step (warm-started) and tracking
/// eigenvalue branches. The crossing flag fires when the critical branch
/// identity changes, including a complex-pair collision into real roots.
std::vector<RootLocusStep> root_locus_sweep(const AffineJacobianModel& model,
                                            int var, double lo, double hi,
                                            int steps);

/// Sweeps as root_locus_sweep while tracking one eigenvalue (selected by its
/// slot at the first feasible step) and emitting its sensitivities with
/// respect to the requested lifted coordinates plus the swept variable.
std::vector<SensitivityStep> sensitivity_sweep(const AffineJacobianModel& model,
                                               int var, double lo, double hi,
                                               int steps, int eig_index,
                                               const std::vector<int>& coords);

/// d z_k / d(physical var), holding the other physical variables fixed.
double lift_partial(const AffineJacobianModel& model,
                    const Eigen::VectorXd& physical, int k, int var);

} // namespace mudae
