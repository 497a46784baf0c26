#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "first_order.hpp"

namespace twosector {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

namespace detail {

/// Solves (J + mu * D) x = y for many complex shifts mu, where D has few
/// nonzero rows, via a low-rank update around a single LU of J.
class ShiftedSolver {
public:
    ShiftedSolver(const Mat& J, const Mat& D) : luJ_(J) {
        const int n = static_cast<int>(J.rows());
        for (int i = 0; i < n; ++i)
            if (D.row(i).lpNorm<Eigen::Infinity>() > 0) rows_.push_back(i);
        const int r = static_cast<int>(rows_.size());
        Br_.resize(r, n);
        for (int i = 0; i < r; ++i) Br_.row(i) = D.row(rows_[i]);
        Mat rhs = Mat::Zero(n, r);
        for (int i = 0; i < r; ++i) rhs(rows_[i], i) = 1.0;
        M1_ = luJ_.solve(rhs);
        C0_ = Br_ * M1_;
        Brc_ = Br_.cast<std::complex<double>>();
        M1c_ = M1_.cast<std::complex<double>>();
        C0c_ = C0_.cast<std::complex<double>>();
    }

    CVec solve(std::complex<double> mu, const CVec& y) const {
        CVec t = solve_J(y);
        const int r = static_cast<int>(rows_.size());
        if (r == 0 || mu == std::complex<double>(0.0, 0.0)) return t;
        CVec s = Brc_ * t;
        CMat core = CMat::Identity(r, r) + mu * C0c_;
        CVec w = core.partialPivLu().solve(s);
        return t - mu * (M1c_ * w);
    }

    Vec solve_real(double mu, const Vec& y) const {
        Vec t = luJ_.solve(y);
        const int r = static_cast<int>(rows_.size());
        if (r == 0 || mu == 0.0) return t;
        Vec s = Br_ * t;
        Mat core = Mat::Identity(r, r) + mu * C0_;
        Vec w = core.partialPivLu().solve(s);
        return t - mu * (M1_ * w);
    }

    const Eigen::PartialPivLU<Mat>& luJ() const { return luJ_; }

private:
    CVec solve_J(const CVec& y) const {
        Vec re = luJ_.solve(y.real());
        Vec im = luJ_.solve(y.imag());
        CVec out(y.size());
        out.real() = re;
        out.imag() = im;
        return out;
    }

    Eigen::PartialPivLU<Mat> luJ_;
    std::vector<int> rows_;
    Mat Br_, M1_, C0_;
    CMat Brc_, M1c_, C0c_;
};

}  // namespace detail

/// Quadratic decision rules with pruning bookkeeping:
///   y_t = ybar + P (xf+xs)_{t-1} + g_e u_t
///         + 1/2 Gxx(xf (x) xf) + Gxe(xf (x) u) + 1/2 Gee(u (x) u) + 1/2 g_ss
/// where xf carries the first-order state and xs the second-order correction.
struct SecondOrderSolution {
    FirstOrderSolution fo;
    Mat Gxx;   // n x k^2, columns indexed (p,q) -> p*k+q, symmetric in (p,q)
    Mat Gxe;   // n x k*ne, columns (p,j) -> p*ne+j
    Mat Gee;   // n x ne^2
    Vec g_ss;  // n, uncertainty correction (sigma^2 term, already doubled-in)

    SystemPtr sys;
    Vec z_ss;

    int n() const { return fo.n(); }
    int k() const { return fo.k(); }
    int ne() const { return fo.ne(); }
};

/// Second-order tensors by differentiating the equilibrium conditions twice
/// and solving the resulting linear systems; the state-state block is a
/// generalized Sylvester equation handled in the Schur basis of h.
inline SecondOrderSolution solve_second_order(const LinearizedSystem& lin,
                                              const FirstOrderSolution& fo) {
    if (!fo.ok()) throw NumericsError("second-order solve requires a determinate solution");
    if (lin.d.hess.empty())
        throw NumericsError("linearization lacks second derivatives");
    const int n = lin.n(), k = fo.k(), ne = fo.ne();
    const auto& st = fo.state_idx;

    SecondOrderSolution so;
    so.fo = fo;
    so.sys = lin.sys;
    so.z_ss = lin.z_ss;

    // first-derivative bundles
    Mat PL = Mat::Zero(n, n);
    for (int j = 0; j < k; ++j) PL.col(st[j]) = fo.P.col(j);
    Mat J = lin.d.j_now + lin.d.j_next * PL;
    const Mat& Dp = lin.d.j_next;

    // argument derivative stacks (3n+ne rows)
    const int na = 3 * n + ne;
    Mat dzx = Mat::Zero(na, k), dze = Mat::Zero(na, ne);
    for (int j = 0; j < k; ++j) dzx(st[j], j) = 1.0;           // prev block
    dzx.block(n, 0, n, k) = fo.P;                               // now
    dzx.block(2 * n, 0, n, k) = fo.P * fo.h;                    // next
    dze.block(n, 0, n, ne) = fo.g_e;                            // now
    dze.block(2 * n, 0, n, ne) = fo.P * fo.q;                   // next
    dze.block(3 * n, 0, ne, ne) = Mat::Identity(ne, ne);        // eps

    // Hessian contractions
    Mat Axx = Mat::Zero(n, k * k), Axe = Mat::Zero(n, k * ne), Aee = Mat::Zero(n, ne * ne);
    Vec Ass = Vec::Zero(n);
    for (int i = 0; i < lin.sys->m(); ++i) {
        for (const auto& hent : lin.d.hess[i]) {
            const int a = hent.a, b = hent.b;
            const double v = hent.v;
            auto xa = dzx.row(a), xb = dzx.row(b);
            auto ea = dze.row(a), eb = dze.row(b);
            // xx block
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q) {
                    double t = xa[p] * xb[q];
                    if (a != b) t += xb[p] * xa[q];
                    Axx(i, p * k + q) += v * t;
                }
            // xe block
            for (int p = 0; p < k; ++p)
                for (int j = 0; j < ne; ++j) {
                    double t = xa[p] * eb[j];
                    if (a != b) t += xb[p] * ea[j];
                    Axe(i, p * ne + j) += v * t;
                }
            // ee block
            for (int u = 0; u < ne; ++u)
                for (int w = 0; w < ne; ++w) {
                    double t = ea[u] * eb[w];
                    if (a != b) t += eb[u] * ea[w];
                    Aee(i, u * ne + w) += v * t;
                }
            // sigma-sigma: expectation over next-period innovations
            if (a >= 2 * n && a < 3 * n && b >= 2 * n && b < 3 * n) {
                double om = fo.g_e.row(a - 2 * n).dot(fo.g_e.row(b - 2 * n));
                Ass[i] += (a == b ? 1.0 : 2.0) * v * om;
            }
        }
    }

    detail::ShiftedSolver shifted(J, Dp);

    // ---- Gxx: J X + Dp X (h (x) h) = -Axx, solved in the Schur basis of h
    Eigen::ComplexSchur<Mat> schur(fo.h, /*computeU=*/true);
    CMat U = schur.matrixU(), T = schur.matrixT();

    // Ctil = -Axx (U (x) U), computed as two single-index contractions
    CMat C1 = CMat::Zero(n, k * k);  // contract first index
    for (int p = 0; p < k; ++p)
        for (int i2 = 0; i2 < k; ++i2) {
            std::complex<double> u = U(i2, p);
            if (u == std::complex<double>(0.0, 0.0)) continue;
            for (int j = 0; j < k; ++j)
                C1.col(p * k + j) += u * (-Axx.col(i2 * k + j));
        }
    CMat Ct = CMat::Zero(n, k * k);
    for (int q = 0; q < k; ++q)
        for (int j = 0; j < k; ++j) {
            std::complex<double> u = U(j, q);
            if (u == std::complex<double>(0.0, 0.0)) continue;
            for (int p = 0; p < k; ++p) Ct.col(p * k + q) += u * C1.col(p * k + j);
        }

    CMat Dpc = Dp.cast<std::complex<double>>();
    CMat Xt = CMat::Zero(n, k * k);
    for (int p = 0; p < k; ++p) {
        for (int q = p; q < k; ++q) {
            CVec rhs = Ct.col(p * k + q);
            CVec acc = CVec::Zero(n);
            for (int i2 = 0; i2 <= p; ++i2)
                for (int j = 0; j <= q; ++j) {
                    if (i2 == p && j == q) continue;
                    std::complex<double> w = T(i2, p) * T(j, q);
                    if (w != std::complex<double>(0.0, 0.0)) acc += w * Xt.col(i2 * k + j);
                }
            rhs -= Dpc * acc;
            std::complex<double> muc = T(p, p) * T(q, q);
            Xt.col(p * k + q) = shifted.solve(muc, rhs);
            if (q != p) Xt.col(q * k + p) = Xt.col(p * k + q);
        }
    }
    // back-transform X = Xt (U^H (x) U^H)
    CMat B1 = CMat::Zero(n, k * k);
    for (int i2 = 0; i2 < k; ++i2)
        for (int p = 0; p < k; ++p) {
            std::complex<double> u = std::conj(U(i2, p));
            if (u == std::complex<double>(0.0, 0.0)) continue;
            for (int j = 0; j < k; ++j) B1.col(i2 * k + j) += u * Xt.col(p * k + j);
        }
    so.Gxx = Mat::Zero(n, k * k);
    for (int j2 = 0; j2 < k; ++j2)
        for (int q = 0; q < k; ++q) {
            std::complex<double> u = std::conj(U(j2, q));
            if (u == std::complex<double>(0.0, 0.0)) continue;
            for (int i2 = 0; i2 < k; ++i2) {
                CVec col = u * B1.col(i2 * k + q);
                so.Gxx.col(i2 * k + j2) += col.real();
            }
        }

    // enforce exact (p,q) symmetry lost to roundoff
    for (int p = 0; p < k; ++p)
        for (int q = p + 1; q < k; ++q) {
            Vec avg = 0.5 * (so.Gxx.col(p * k + q) + so.Gxx.col(q * k + p));
            so.Gxx.col(p * k + q) = avg;
            so.Gxx.col(q * k + p) = avg;
        }

    // ---- Gxe: J X = -Axe - Dp Gxx (h (x) q)
    {
        Mat rhs = -Axe;
        Mat contr = Mat::Zero(n, k * ne);
        for (int p = 0; p < k; ++p)
            for (int j = 0; j < ne; ++j) {
                Vec acc = Vec::Zero(n);
                for (int i2 = 0; i2 < k; ++i2) {
                    double hp = fo.h(i2, p);
                    if (hp == 0.0) continue;
                    for (int l = 0; l < k; ++l) {
                        double ql = fo.q(l, j);
                        if (ql == 0.0) continue;
                        acc += hp * ql * so.Gxx.col(i2 * k + l);
                    }
                }
                contr.col(p * ne + j) = acc;
            }
        rhs -= Dp * contr;
        so.Gxe = shifted.luJ().solve(rhs);
    }

    // ---- Gee: J X = -Aee - Dp Gxx (q (x) q)
    {
        Mat rhs = -Aee;
        Mat contr = Mat::Zero(n, ne * ne);
        for (int u = 0; u < ne; ++u)
            for (int w = 0; w < ne; ++w) {
                Vec acc = Vec::Zero(n);
                for (int i2 = 0; i2 < k; ++i2) {
                    double qu = fo.q(i2, u);
                    if (qu == 0.0) continue;
                    for (int l = 0; l < k; ++l) {
                        double qw = fo.q(l, w);
                        if (qw == 0.0) continue;
                        acc += qu * qw * so.Gxx.col(i2 * k + l);
                    }
                }
                contr.col(u * ne + w) = acc;
            }
        rhs -= Dp * contr;
        so.Gee = shifted.luJ().solve(rhs);
    }

    // ---- g_ss: (J + Dp) x = -Ass - Dp * sum_j Gee[:, (j,j)]
    {
        Vec geed = Vec::Zero(n);
        for (int j = 0; j < ne; ++j) geed += so.Gee.col(j * ne + j);
        Vec rhs = -Ass - Dp * geed;
        so.g_ss = shifted.solve_real(1.0, rhs);
    }

    return so;
}

}  // namespace twosector
