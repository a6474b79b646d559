#include "mudae/measures.hpp"

#include "mudae/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mudae {

namespace {

void require_square_finite(const Eigen::MatrixXd& m, const char* who) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": expected a non-empty square matrix, got "
           << m.rows() << "x" << m.cols();
        throw InputError(os.str());
    }
    if (!m.allFinite()) {
        throw InputError(std::string(who) + ": matrix has non-finite entries");
    }
}

// Eigenvalues of the 1x1 / 2x2 diagonal blocks of a real quasi-triangular
// Schur factor.
std::vector<std::complex<double>> eigenvalues_of_quasi_triangular(const Eigen::MatrixXd& t) {
    const Eigen::Index n = t.rows();
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    Eigen::Index i = 0;
    while (i < n) {
        if (i + 1 == n || t(i + 1, i) == 0.0) {
            out.emplace_back(t(i, i), 0.0);
            ++i;
        } else {
            const double a = t(i, i), b = t(i, i + 1);
            const double c = t(i + 1, i), d = t(i + 1, i + 1);
            const double mean = 0.5 * (a + d);
            const double disc = 0.25 * (a - d) * (a - d) + b * c;
            if (disc < 0.0) {
                const double im = std::sqrt(-disc);
                out.emplace_back(mean, im);
                out.emplace_back(mean, -im);
            } else {
                const double rad = std::sqrt(disc);
                out.emplace_back(mean + rad, 0.0);
                out.emplace_back(mean - rad, 0.0);
            }
            i += 2;
        }
    }
    return out;
}

} // namespace

double matrix_measure(const Eigen::MatrixXd& m, MeasureKind p) {
    require_square_finite(m, "matrix_measure");
    const Eigen::Index n = m.rows();
    switch (p) {
    case MeasureKind::One: {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            double col = m(j, j);
            for (Eigen::Index i = 0; i < n; ++i)
                if (i != j) col += std::abs(m(i, j));
            best = std::max(best, col);
        }
        return best;
    }
    case MeasureKind::Two:
        return lambda_max_symmetric(0.5 * (m + m.transpose()));
    case MeasureKind::Infinity: {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            double row = m(i, i);
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) row += std::abs(m(i, j));
            best = std::max(best, row);
        }
        return best;
    }
    }
    throw InputError("matrix_measure: unknown measure kind");
}

double lambda_max_symmetric(const Eigen::MatrixXd& s) {
    require_square_finite(s, "lambda_max_symmetric");
    const double scale = s.norm();
    const double asym = (s - s.transpose()).norm();
    if (asym > 1e-12 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "lambda_max_symmetric: input asymmetry " << asym
           << " exceeds 1e-12 relative tolerance";
        throw InputError(os.str());
    }
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("lambda_max_symmetric: eigensolver failed to converge");
    return es.eigenvalues().maxCoeff();
}

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& m) {
    require_square_finite(m, "spectrum");
    const Eigen::Index n = m.rows();

    Eigen::RealSchur<Eigen::MatrixXd> schur;
    schur.setMaxIterations(100 * n * n);
    schur.compute(m, /*computeU=*/false);
    if (schur.info() != Eigen::Success)
        throw NumericError("spectrum: Schur iteration failed to converge");

    auto eigs = eigenvalues_of_quasi_triangular(schur.matrixT());
    std::sort(eigs.begin(), eigs.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  if (x.real() != y.real()) return x.real() > y.real();
                  return x.imag() > y.imag();
              });
    return eigs;
}

double spectral_abscissa(const Eigen::MatrixXd& m) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& lambda : spectrum(m)) best = std::max(best, lambda.real());
    return best;
}

bool is_hurwitz(const Eigen::MatrixXd& m, double tol) {
    if (tol < 0.0) throw InputError("is_hurwitz: tol must be >= 0");
    return spectral_abscissa(m) < -tol;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w) {
    require_square_finite(a, "solve_lyapunov");
    require_square_finite(w, "solve_lyapunov");
    const Eigen::Index n = a.rows();
    if (w.rows() != n)
        throw InputError("solve_lyapunov: A and W orders differ");
    if (n > 64)
        throw InputError("solve_lyapunov: order exceeds the dense Kronecker cap of 64");
    if ((w - w.transpose()).norm() > 1e-12 * std::max(w.norm(), 1e-300))
        throw InputError("solve_lyapunov: W must be symmetric");

    // vec(A^T P) + vec(P A) = (I (x) A^T + A^T (x) I) vec(P), column-major vec.
    const Eigen::Index nn = n * n;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
    const Eigen::MatrixXd at = a.transpose();
    for (Eigen::Index j = 0; j < n; ++j)
        k.block(j * n, j * n, n, n) += at;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (at(i, j) != 0.0)
                k.block(i * n, j * n, n, n) +=
                    at(i, j) * Eigen::MatrixXd::Identity(n, n);

    Eigen::VectorXd rhs(nn);
    for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -w.col(j);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    if (!lu.isInvertible())
        throw ConstructionError(
            "solve_lyapunov: Kronecker-sum system is singular (A has eigenvalues "
            "summing to zero; not Hurwitz)");
    const Eigen::VectorXd pv = lu.solve(rhs);

    Eigen::MatrixXd p(n, n);
    for (Eigen::Index j = 0; j < n; ++j) p.col(j) = pv.segment(j * n, n);
    p = 0.5 * (p + p.transpose()).eval();

    const double resid = (a.transpose() * p + p * a + w).norm();
    if (!(resid <= 1e-9 * std::max(w.norm(), 1e-300)))
        throw ConstructionError("solve_lyapunov: residual bound violated; system ill-conditioned");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw ConstructionError("solve_lyapunov: P is not positive definite (A not Hurwitz)");
    return p;
}

} // namespace mudae
