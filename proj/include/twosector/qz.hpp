#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "common.hpp"

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

namespace twosector {

/// Eigenvalues with modulus below this bound count as non-explosive, so
/// price-level rules (rho_r = 1) solve cleanly.
inline constexpr double kUnitRootTol = 1e-6;

namespace detail {
inline lapack_logical select_stable(const double* ar, const double* ai, const double* beta) {
    double amod = std::hypot(*ar, *ai);
    return amod <= (1.0 + kUnitRootTol) * std::abs(*beta) ? 1 : 0;
}
}  // namespace detail

/// Ordered generalized Schur decomposition of the pencil (A - lambda B):
/// A = Q S Z^T, B = Q T Z^T with eigenvalues alpha/beta; the columns of Z
/// corresponding to |lambda| <= 1 + tol come first.
struct OrderedQZ {
    Eigen::MatrixXd S, T, Q, Z;
    std::vector<std::complex<double>> alpha;
    std::vector<double> beta;
    int n_stable = 0;

    std::vector<double> moduli() const {
        std::vector<double> out;
        out.reserve(alpha.size());
        for (size_t i = 0; i < alpha.size(); ++i) {
            double b = std::abs(beta[i]);
            out.push_back(b > 0 ? std::abs(alpha[i]) / b
                                : std::numeric_limits<double>::infinity());
        }
        return out;
    }
};

inline OrderedQZ ordered_qz(Eigen::MatrixXd A, Eigen::MatrixXd B) {
    const int n = static_cast<int>(A.rows());
    OrderedQZ out;
    out.Q.resize(n, n);
    out.Z.resize(n, n);
    std::vector<double> ar(n), ai(n), be(n);
    lapack_int sdim = 0;
    lapack_int info = LAPACKE_dgges(
        LAPACK_COL_MAJOR, 'V', 'V', 'S', detail::select_stable, n, A.data(), n, B.data(), n,
        &sdim, ar.data(), ai.data(), be.data(), out.Q.data(), n, out.Z.data(), n);
    if (info < 0) throw NumericsError("dgges: illegal argument " + std::to_string(-info));
    if (info > 0 && info <= n)
        throw NumericsError("dgges: QZ iteration failed at " + std::to_string(info));
    // info == n+2 (reordering sensitivity) still produces a usable ordering
    out.S = A;
    out.T = B;
    out.n_stable = static_cast<int>(sdim);
    out.alpha.resize(n);
    out.beta.resize(n);
    for (int i = 0; i < n; ++i) {
        out.alpha[i] = {ar[i], ai[i]};
        out.beta[i] = be[i];
    }
    return out;
}

}  // namespace twosector
