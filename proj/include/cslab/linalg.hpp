#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <vector>

#include "cslab/core.hpp"

namespace cslab {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

/// Minimum-norm least squares solve of A x = b.
inline CVec least_squares(const CMat& A, const CVec& b) {
    return A.colPivHouseholderQr().solve(b);
}

struct LsqFit {
    CVec coeffs;
    double residual = 0.0;  // max abs residual of A x - b
};

inline LsqFit least_squares_fit(const CMat& A, const CVec& b) {
    LsqFit out;
    out.coeffs = least_squares(A, b);
    out.residual = (A * out.coeffs - b).cwiseAbs().maxCoeff();
    return out;
}

/// Real nullspace basis of A (rows = equations), columns of the result
/// span {x : A x = 0}.
inline RMat real_nullspace(const RMat& A, double tol = 1e-9) {
    Eigen::FullPivLU<RMat> lu(A);
    lu.setThreshold(tol);
    return lu.kernel();
}

/// Roots of a complex polynomial c[0] + c[1] z + ... + c[n] z^n via the
/// companion matrix.  Leading coefficients below `strip_tol` relative to
/// the largest coefficient are dropped first.
inline std::vector<cx> poly_roots(std::vector<cx> c, double strip_tol = 1e-10) {
    double big = 0.0;
    for (auto z : c) big = std::max(big, std::abs(z));
    if (big == 0.0) return {};
    while (c.size() > 1 && std::abs(c.back()) <= strip_tol * big) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) return {};
    CMat companion = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        companion(i, n - 1) = -c[i] / c[n];
        if (i + 1 < n) companion(i + 1, i) = 1.0;
    }
    Eigen::ComplexEigenSolver<CMat> es(companion, /*computeEigenvectors=*/false);
    std::vector<cx> roots(es.eigenvalues().data(),
                          es.eigenvalues().data() + n);
    // deterministic order: by real part, then imaginary part
    std::sort(roots.begin(), roots.end(), [](cx a, cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

/// One step of Newton polish for a polynomial root.
inline cx poly_polish(const std::vector<cx>& c, cx z, int iters = 3) {
    for (int k = 0; k < iters; ++k) {
        cx p = 0.0, dp = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) {
            dp = dp * z + p;
            p = p * z + c[i];
        }
        if (std::abs(dp) < kTinyDenominator) break;
        z -= p / dp;
    }
    return z;
}

}  // namespace cslab
