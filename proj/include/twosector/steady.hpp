#pragma once
#include <Eigen/Dense>

#include "model.hpp"
#include "system.hpp"

namespace twosector {

/// Deterministic steady state: level vector aligned to the registry.
struct SteadyState {
    Vec z;        // transformed coordinates
    Vec levels;   // same point in levels
    double max_residual = 0.0;
    int iterations = 0;

    double level(const ResidualSystem& sys, const std::string& name) const {
        return levels[sys.registry().index(name)];
    }
};

struct SteadyOptions {
    int max_iter = 60;
    double tol = 1e-12;
};

/// Damped Newton on the time-invariant residuals with dual-exact Jacobians.
/// The guess must be strictly positive for log-scale variables.
inline SteadyState solve_steady_state(const ResidualSystem& sys, const Vec& guess_z,
                                      SteadyOptions opt = {}) {
    if (sys.m() != sys.n()) throw ConfigError("steady-state solve requires a square system");
    const int n = sys.n();
    Vec z = guess_z;
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(z[i])) throw NumericsError("non-finite entry in steady-state guess");

    const Vec eps0 = Vec::Zero(sys.ne());
    Vec f = sys.eval_steady(z);
    double fnorm = f.lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; it < opt.max_iter && fnorm > opt.tol; ++it) {
        Mat J(n, n);
        for (int a = 0; a < n; ++a) {
            J.col(a) = sys.dual_column_at(z, z, z, eps0, ArgId::prev(a, n)) +
                       sys.dual_column_at(z, z, z, eps0, ArgId::now(a, n)) +
                       sys.dual_column_at(z, z, z, eps0, ArgId::next(a, n));
        }
        Eigen::PartialPivLU<Mat> lu(J);
        Vec step = lu.solve(f);
        if (!step.allFinite()) throw NumericsError("singular Jacobian in steady-state solve");
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            Vec zt = z - lambda * step;
            Vec ft = sys.eval_steady(zt);
            if (ft.allFinite() && ft.lpNorm<Eigen::Infinity>() < fnorm) {
                z = zt;
                f = ft;
                fnorm = ft.lpNorm<Eigen::Infinity>();
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;  // stalled; the residual check below decides
    }
    if (fnorm > 1e-10)
        throw NumericsError("steady-state Newton did not converge: residual " +
                            std::to_string(fnorm));
    SteadyState ss;
    ss.z = z;
    ss.levels = sys.to_levels(z);
    ss.max_residual = fnorm;
    ss.iterations = it;
    return ss;
}

/// Solve a freshly built model from its analytic guess.
inline SteadyState solve_steady_state(const Build& b, SteadyOptions opt = {}) {
    return solve_steady_state(*b.sys, b.z_ss, opt);
}

/// Root-find nu so that solved steady-state hours hit target_N. Bisection on
/// log(nu) against the full Newton solve; the builder's closed form must agree
/// with the returned value (asserted in tests).
inline double calibrate_nu(const ModelVariant& variant, ParameterSet params, double target_N,
                           const PolicyRuleSpec& spec = {}, const RuleParams& rp = {}) {
    if (!(target_N > 0.0 && target_N < 1.0))
        throw ConfigError("target steady-state hours must lie in (0,1)");
    BuildOptions opt;
    opt.calibrate_nu = false;
    auto hours_given_nu = [&](double log_nu) {
        ParameterSet q = params;
        q.nu = std::exp(log_nu);
        Build b = build_model(variant, q, spec, rp, opt);
        SteadyState ss = solve_steady_state(b);
        return ss.level(*b.sys, "N");
    };
    double lo = std::log(1e-4), hi = std::log(1e4);
    if ((hours_given_nu(lo) - target_N) * (hours_given_nu(hi) - target_N) > 0)
        throw NumericsError("nu calibration: target hours not bracketed");
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hours_given_nu(mid) > target_N) lo = mid;  // hours decrease in nu
        else hi = mid;
    }
    double nu = std::exp(0.5 * (lo + hi));
    if (std::abs(hours_given_nu(std::log(nu)) - target_N) > 1e-10)
        throw NumericsError("nu calibration did not converge");
    return nu;
}

}  // namespace twosector
