#pragma once
#include <Eigen/Dense>
#include <vector>

#include "qz.hpp"
#include "steady.hpp"
#include "system.hpp"

namespace twosector {

enum class Determinacy { Determinate, Indeterminate, Explosive };

inline const char* determinacy_name(Determinacy d) {
    switch (d) {
        case Determinacy::Determinate: return "determinate";
        case Determinacy::Indeterminate: return "indeterminate";
        case Determinacy::Explosive: return "explosive";
    }
    return "?";
}

/// Jacobian blocks of a residual system at its steady state plus the scaling
/// needed to interpret them (log versus level coordinates per variable).
struct LinearizedSystem {
    SystemPtr sys;
    Vec z_ss;
    Derivatives d;          // dual-exact first derivatives (+ Hessians on demand)
    std::vector<int> state_idx;  // variables appearing dated t-1

    int n() const { return sys->n(); }
    int k() const { return static_cast<int>(state_idx.size()); }
};

/// Central finite differences in the transformed (log-level) coordinates;
/// kept as a cross-check against the dual path (Richardson test lives in the
/// suite).
inline Mat fd_jacobian_block(const ResidualSystem& sys, const Vec& z, int block,
                             double rel_step = 1e-5) {
    const int n = sys.n();
    Mat J(sys.m(), n);
    const Vec eps0 = Vec::Zero(sys.ne());
    for (int a = 0; a < n; ++a) {
        double h = rel_step * std::max(1.0, std::abs(z[a]));
        Vec zp = z, zm = z;
        zp[a] += h;
        zm[a] -= h;
        Vec fp, fm;
        if (block == 0) {
            fp = sys.eval(zp, z, z, eps0);
            fm = sys.eval(zm, z, z, eps0);
        } else if (block == 1) {
            fp = sys.eval(z, zp, z, eps0);
            fm = sys.eval(z, zm, z, eps0);
        } else {
            fp = sys.eval(z, z, zp, eps0);
            fm = sys.eval(z, z, zm, eps0);
        }
        if (!fp.allFinite() || !fm.allFinite())
            throw NumericsError("non-finite residual while probing Jacobian");
        J.col(a) = (fp - fm) / (2.0 * h);
    }
    return J;
}

inline LinearizedSystem linearize(SystemPtr sys, const SteadyState& ss,
                                  bool with_hessian = false) {
    LinearizedSystem lin;
    lin.sys = sys;
    lin.z_ss = ss.z;
    lin.d = Derivatives::compute(*sys, ss.z, with_hessian);
    const double tol = 1e-9;
    for (int i = 0; i < sys->n(); ++i)
        if (lin.d.j_prev.col(i).lpNorm<Eigen::Infinity>() > tol) lin.state_idx.push_back(i);
    return lin;
}

/// State-space decision rules y_t = ybar + P x_{t-1} + g_e eps_t where x is
/// the subvector of variables appearing with a lag.
struct FirstOrderSolution {
    Determinacy verdict = Determinacy::Determinate;
    std::vector<int> state_idx;       // k entries
    Mat P;                            // n x k loading on lagged states
    Mat g_e;                          // n x ne innovation loading
    Mat h;                            // k x k state transition
    Mat q;                            // k x ne state innovation loading
    std::vector<double> eig_moduli;   // generalized eigenvalue moduli
    double residual = 0.0;            // plug-back check
    int n_stable = 0;
    int n_pencil = 0;

    bool ok() const { return verdict == Determinacy::Determinate; }
    int n() const { return static_cast<int>(P.rows()); }
    int k() const { return static_cast<int>(P.cols()); }
    int ne() const { return static_cast<int>(g_e.cols()); }

    /// x_t = L y_t
    Vec extract_state(const Vec& y_dev) const {
        Vec x(k());
        for (int j = 0; j < k(); ++j) x[j] = y_dev[state_idx[j]];
        return x;
    }
};

/// Klein-style solver on the pencil built from [prev|now|next] Jacobians.
/// Determinacy by counting: # non-explosive eigenvalues vs # predetermined.
inline FirstOrderSolution solve_first_order(const LinearizedSystem& lin) {
    const int n = lin.n();
    const int k = lin.k();
    const auto& st = lin.state_idx;
    const Mat& Fm = lin.d.j_prev;
    const Mat& F0 = lin.d.j_now;
    const Mat& Fp = lin.d.j_next;

    FirstOrderSolution sol;
    sol.state_idx = st;
    sol.n_pencil = n + k;

    // pencil: A u_{t+1} = B u_t with u_t = [x_{t-1}; y_t]
    Mat A = Mat::Zero(n + k, n + k);
    Mat B = Mat::Zero(n + k, n + k);
    A.block(0, k, n, n) = Fp;
    B.block(0, k, n, n) = -F0;
    for (int j = 0; j < k; ++j) B.block(0, j, n, 1) = -Fm.col(st[j]);
    for (int j = 0; j < k; ++j) {
        A(n + j, j) = 1.0;            // w_t identity
        B(n + j, k + st[j]) = 1.0;    // = y_{state j, t}
    }

    OrderedQZ qz = ordered_qz(B, A);  // eigenvalues are growth rates lambda
    sol.eig_moduli = qz.moduli();
    sol.n_stable = qz.n_stable;

    if (qz.n_stable < k) {
        sol.verdict = Determinacy::Explosive;
        return sol;
    }
    if (qz.n_stable > k) {
        sol.verdict = Determinacy::Indeterminate;
        return sol;
    }

    Mat Z11 = qz.Z.block(0, 0, k, k);
    Mat Z21 = qz.Z.block(k, 0, n, k);
    Eigen::FullPivLU<Mat> lu11(Z11);
    if (!lu11.isInvertible()) {
        sol.verdict = Determinacy::Indeterminate;
        return sol;
    }
    sol.P = Z21 * lu11.inverse();

    // innovation loading from the equation block: J y_dev = -F_eps eps
    Mat PL = Mat::Zero(n, n);
    for (int j = 0; j < k; ++j) PL.col(st[j]) = sol.P.col(j);
    Mat J = F0 + Fp * PL;
    Eigen::PartialPivLU<Mat> luJ(J);
    sol.g_e = -luJ.solve(lin.d.j_eps);

    sol.h.resize(k, k);
    sol.q.resize(k, lin.sys->ne());
    for (int j = 0; j < k; ++j) {
        sol.h.row(j) = sol.P.row(st[j]);
        sol.q.row(j) = sol.g_e.row(st[j]);
    }

    // plug-back residual of the linearized system
    Mat res = Fm(Eigen::all, st) + F0 * sol.P + Fp * sol.P * sol.h;
    sol.residual = res.lpNorm<Eigen::Infinity>();
    if (!(sol.residual < 1e-7)) sol.verdict = Determinacy::Indeterminate;
    return sol;
}

/// Independent determinacy oracle: count explosive eigenvalues with Eigen's
/// unordered generalized eigensolver (no shared code with the QZ path).
inline Determinacy determinacy_by_counting(const LinearizedSystem& lin) {
    const int n = lin.n();
    const int k = lin.k();
    const auto& st = lin.state_idx;
    Mat A = Mat::Zero(n + k, n + k), B = Mat::Zero(n + k, n + k);
    A.block(0, k, n, n) = lin.d.j_next;
    for (int j = 0; j < k; ++j) A(n + j, j) = 1.0;
    B.block(0, k, n, n) = -lin.d.j_now;
    for (int j = 0; j < k; ++j) B.block(0, j, n, 1) = -lin.d.j_prev.col(st[j]);
    for (int j = 0; j < k; ++j) B(n + j, k + st[j]) = 1.0;

    Eigen::GeneralizedEigenSolver<Mat> ges;
    ges.compute(B, A, /*computeEigenvectors=*/false);
    int stable = 0;
    for (int i = 0; i < n + k; ++i) {
        std::complex<double> a = ges.alphas()[i];
        double b = ges.betas()[i];
        double mod = std::abs(b) > 0 ? std::abs(a) / std::abs(b)
                                     : std::numeric_limits<double>::infinity();
        if (mod <= 1.0 + kUnitRootTol) ++stable;
    }
    if (stable == k) return Determinacy::Determinate;
    return stable > k ? Determinacy::Indeterminate : Determinacy::Explosive;
}

}  // namespace twosector
