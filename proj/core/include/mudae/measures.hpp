#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace mudae {

// Which induced vector norm the logarithmic norm is taken with respect to.
enum class MeasureKind { One, Two, Infinity };

/// Logarithmic norm (matrix measure) of a square matrix:
///   mu_1(M)   = max_j ( m_jj + sum_{i!=j} |m_ij| )
///   mu_2(M)   = lambda_max( (M + M^T) / 2 )
///   mu_inf(M) = max_i ( m_ii + sum_{j!=i} |m_ij| )
/// Unlike a norm, the result can be negative; it upper-bounds the spectral
/// abscissa of M.
double matrix_measure(const Eigen::MatrixXd& m, MeasureKind p);

/// Largest eigenvalue of a symmetric matrix. The input may deviate from
/// exact symmetry by at most 1e-12 in relative Frobenius asymmetry; it is
/// symmetrized internally as (S + S^T)/2. Larger asymmetry is an InputError.
double lambda_max_symmetric(const Eigen::MatrixXd& s);

/// All eigenvalues of a real square matrix (with multiplicity), computed via
/// a real Schur reduction. Ordering: descending real part, ties broken by
/// descending imaginary part.
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& m);

/// Maximum real part over spectrum(m).
double spectral_abscissa(const Eigen::MatrixXd& m);

/// True iff every eigenvalue satisfies Re(lambda) < -tol.
bool is_hurwitz(const Eigen::MatrixXd& m, double tol = 0.0);

/// Solves the Lyapunov equation A^T P + P A = -W for symmetric positive
/// definite W and Hurwitz A, via the Kronecker-sum linear system (order
/// capped at 64). The returned P is symmetric positive definite with
/// residual ||A^T P + P A + W||_F <= 1e-9 ||W||_F. A non-Hurwitz A surfaces
/// as a ConstructionError (singular system or indefinite P).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w);

} // namespace mudae
