#pragma once
#include <random>
#include <string>
#include <vector>

#include "second_order.hpp"

namespace twosector {

/// Per-variable percent deviations from steady state (log-scale variables;
/// level-scale ones are raw deviations) over a horizon.
struct ImpulseResponse {
    std::string shock;
    int horizon = 0;
    std::vector<std::string> vars;
    Mat data;  // horizon x n

    Vec series(const ResidualSystem& sys, const std::string& var) const {
        return data.col(sys.registry().index(var));
    }
};

inline Vec dev_to_percent(const ResidualSystem& sys, const Vec& dev) {
    Vec out = dev;
    for (int i = 0; i < sys.n(); ++i)
        if (sys.registry().scale(i) == VarScale::Log) out[i] *= 100.0;
    return out;
}

/// First-order impulse response to a `size`-standard-deviation innovation.
inline ImpulseResponse impulse_response_linear(const FirstOrderSolution& fo,
                                               const ResidualSystem& sys, Shock shock,
                                               double size, int horizon) {
    ImpulseResponse irf;
    irf.shock = shock_name(shock);
    irf.horizon = horizon;
    for (const auto& v : sys.registry().all()) irf.vars.push_back(v.name);
    irf.data = Mat::Zero(horizon, fo.n());
    int slot = sys.shock_slot(shock);
    Vec u = Vec::Zero(fo.ne());
    u[slot] = size;
    Vec y = fo.g_e * u;
    Vec x = fo.extract_state(y);
    for (int t = 0; t < horizon; ++t) {
        irf.data.row(t) = dev_to_percent(sys, y).transpose();
        y = fo.P * x;
        x = fo.extract_state(y);
    }
    return irf;
}

/// Pruned second-order simulator. Keeps first- and second-order state
/// carriers separate so simulated paths cannot pick up spurious explosive
/// dynamics.
class PrunedSimulator {
public:
    explicit PrunedSimulator(const SecondOrderSolution& so) : so_(so) {}

    struct State {
        Vec xf, xs;
    };
    State initial() const {
        return {Vec::Zero(so_.k()), Vec::Zero(so_.k())};
    }

    /// Advance one period with innovations u; returns full deviation vector.
    Vec step(State& s, const Vec& u) const {
        const auto& fo = so_.fo;
        const int k = so_.k(), ne = so_.ne();
        Vec quad = 0.5 * so_.g_ss;
        for (int p = 0; p < k; ++p) {
            double xp = s.xf[p];
            if (xp != 0.0) {
                for (int q = 0; q < k; ++q) {
                    double w = 0.5 * xp * s.xf[q];
                    if (w != 0.0) quad += w * so_.Gxx.col(p * k + q);
                }
                for (int j = 0; j < ne; ++j) {
                    double w = xp * u[j];
                    if (w != 0.0) quad += w * so_.Gxe.col(p * ne + j);
                }
            }
        }
        for (int a = 0; a < ne; ++a) {
            double ua = u[a];
            if (ua == 0.0) continue;
            for (int b = 0; b < ne; ++b) {
                double w = 0.5 * ua * u[b];
                if (w != 0.0) quad += w * so_.Gee.col(a * ne + b);
            }
        }
        Vec y = fo.P * (s.xf + s.xs) + fo.g_e * u + quad;
        Vec xf_next = fo.h * s.xf + fo.q * u;
        Vec xs_next = fo.h * s.xs + fo.extract_state(quad);
        s.xf = xf_next;
        s.xs = xs_next;
        return y;
    }

    const SecondOrderSolution& solution() const { return so_; }

private:
    const SecondOrderSolution& so_;
};

inline std::mt19937_64 seeded_rng(uint64_t seed) { return std::mt19937_64(seed); }

/// Simulated standard deviation of one variable's percent deviation.
inline double simulated_std(const SecondOrderSolution& so, const std::string& var,
                            int n_periods, uint64_t seed, int burn = 500) {
    PrunedSimulator sim(so);
    auto st = sim.initial();
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int idx = so.sys->registry().index(var);
    const bool logscale = so.sys->registry().scale(idx) == VarScale::Log;
    double s1 = 0.0, s2 = 0.0;
    Vec u(so.ne());
    for (int t = 0; t < n_periods + burn; ++t) {
        for (int j = 0; j < so.ne(); ++j) u[j] = nd(rng);
        Vec y = sim.step(st, u);
        if (t < burn) continue;
        double v = logscale ? 100.0 * y[idx] : y[idx];
        s1 += v;
        s2 += v * v;
    }
    double m = s1 / n_periods;
    return std::sqrt(std::max(0.0, s2 / n_periods - m * m));
}

/// Raw indicator estimate: fraction of simulated periods with a gross
/// nominal rate below one.
inline double pr_zlb_indicator(const SecondOrderSolution& so, int n_periods,
                               uint64_t seed = 12345, int burn = 500) {
    PrunedSimulator sim(so);
    auto st = sim.initial();
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int iR = so.sys->registry().index("R");
    const double logRbar = so.z_ss[iR];
    long hits = 0;
    Vec u(so.ne());
    for (int t = 0; t < n_periods + burn; ++t) {
        for (int j = 0; j < so.ne(); ++j) u[j] = nd(rng);
        Vec y = sim.step(st, u);
        if (t >= burn && logRbar + y[iR] < 0.0) ++hits;
    }
    return static_cast<double>(hits) / n_periods;
}

/// Per-period probability of hitting the ZLB, Pr(R_t < 1), averaged over a
/// simulated state path. Conditional on last period's pruning state the rate
/// is (to the dominant linear-in-innovations term) Gaussian, so the simulated
/// indicator is replaced by its conditional expectation; this keeps the
/// estimate stable across seeds at the spec's 200k-period scale.
inline double pr_zlb(const SecondOrderSolution& so, int n_periods, uint64_t seed = 12345,
                     int burn = 500) {
    PrunedSimulator sim(so);
    auto st_a = sim.initial();
    auto st_b = sim.initial();
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int iR = so.sys->registry().index("R");
    const double thr = -so.z_ss[iR];  // deviation below which R < 1
    const int k = so.k(), ne = so.ne();
    double gee_shift = 0.0;
    for (int j = 0; j < ne; ++j) gee_shift += 0.5 * so.Gee(iR, j * ne + j);
    auto cond_prob = [&](const PrunedSimulator::State& st) {
        double m = gee_shift + 0.5 * so.g_ss[iR];
        for (int p = 0; p < k; ++p) {
            m += so.fo.P(iR, p) * (st.xf[p] + st.xs[p]);
            for (int q = 0; q < k; ++q) m += 0.5 * st.xf[p] * st.xf[q] * so.Gxx(iR, p * k + q);
        }
        double s2 = 0.0;
        for (int j = 0; j < ne; ++j) {
            double cj = so.fo.g_e(iR, j);
            for (int p = 0; p < k; ++p) cj += so.Gxe(iR, p * ne + j) * st.xf[p];
            s2 += cj * cj;
        }
        double s = std::sqrt(s2);
        double z = s > 0 ? (thr - m) / s : (thr > m ? 40.0 : -40.0);
        return 0.5 * std::erfc(-z / std::sqrt(2.0));
    };
    // antithetic pair of state paths with per-period conditional probabilities
    double acc = 0.0;
    Vec u(so.ne());
    for (int t = 0; t < n_periods + burn; ++t) {
        if (t >= burn) acc += 0.5 * (cond_prob(st_a) + cond_prob(st_b));
        for (int j = 0; j < so.ne(); ++j) u[j] = nd(rng);
        sim.step(st_a, u);
        u = -u;
        sim.step(st_b, u);
    }
    return acc / n_periods;
}

/// Second-order impulse responses at the stochastic baseline: difference of
/// shocked and unshocked pruned paths averaged over seeded draws.
inline ImpulseResponse impulse_response_pruned(const SecondOrderSolution& so, Shock shock,
                                               double size, int horizon, int draws = 200,
                                               uint64_t seed = 12345, int burn = 200) {
    ImpulseResponse irf;
    irf.shock = shock_name(shock);
    irf.horizon = horizon;
    for (const auto& v : so.sys->registry().all()) irf.vars.push_back(v.name);
    irf.data = Mat::Zero(horizon, so.n());
    const int slot = so.sys->shock_slot(shock);
    PrunedSimulator sim(so);
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat acc = Mat::Zero(horizon, so.n());
    for (int d = 0; d < draws; ++d) {
        auto rng = seeded_rng(seed + 1000003ull * d);
        auto s_base = sim.initial();
        Vec u(so.ne());
        for (int t = 0; t < burn; ++t) {
            for (int j = 0; j < so.ne(); ++j) u[j] = nd(rng);
            sim.step(s_base, u);
        }
        auto s_shock = s_base;
        // common random numbers from here on
        std::vector<Vec> innovations(horizon, Vec(so.ne()));
        for (int t = 0; t < horizon; ++t)
            for (int j = 0; j < so.ne(); ++j) innovations[t][j] = nd(rng);
        for (int t = 0; t < horizon; ++t) {
            Vec ub = innovations[t];
            Vec us = innovations[t];
            if (t == 0) us[slot] += size;
            Vec yb = sim.step(s_base, ub);
            Vec ys = sim.step(s_shock, us);
            acc.row(t) += (ys - yb).transpose();
        }
    }
    acc /= draws;
    for (int t = 0; t < horizon; ++t)
        irf.data.row(t) = dev_to_percent(*so.sys, acc.row(t).transpose()).transpose();
    return irf;
}

/// Root cumulated squared difference, 100 * sqrt(sum_{t<=H} (a_t - b_t)^2),
/// reported as a series in the horizon H.
inline Vec irf_distance(const ImpulseResponse& a, const ImpulseResponse& b,
                        const ResidualSystem& sys_a, const ResidualSystem& sys_b,
                        const std::string& var) {
    if (a.horizon != b.horizon) throw ConfigError("impulse responses have different horizons");
    Vec sa = a.series(sys_a, var), sb = b.series(sys_b, var);
    Vec out(a.horizon);
    double acc = 0.0;
    for (int t = 0; t < a.horizon; ++t) {
        // the IRFs are already in percent; the 100x in the formula applies to
        // raw deviations, so undo the percent scaling inside the sum
        double d = (sa[t] - sb[t]) / 100.0;
        acc += d * d;
        out[t] = 100.0 * std::sqrt(acc);
    }
    return out;
}

struct WelfarePair {
    double with_penalty = 0.0;
    double without_penalty = 0.0;
};

/// Conditional welfare at the deterministic steady state from the
/// second-order approximation: steady level plus half the uncertainty
/// correction of the recursion variable.
inline WelfarePair welfare_mean(const SecondOrderSolution& so) {
    const auto& reg = so.sys->registry();
    const int iW = reg.index("Welf");
    const int iWnp = reg.index("WelfNP");
    WelfarePair out;
    out.with_penalty = so.z_ss[iW] + 0.5 * so.g_ss[iW];
    out.without_penalty = so.z_ss[iWnp] + 0.5 * so.g_ss[iWnp];
    return out;
}

/// Unconditional welfare mean: adds the quadratic state term evaluated at the
/// stationary first-order state covariance (doubling iteration).
inline WelfarePair welfare_mean_unconditional(const SecondOrderSolution& so) {
    const int k = so.k();
    // doubling iteration for V = sum_j A^j Q A^j'
    Mat V = so.fo.q * so.fo.q.transpose();
    Mat Ak = so.fo.h;
    for (int it = 0; it < 60; ++it) {
        Mat inc = Ak * V * Ak.transpose();
        double dn = inc.lpNorm<Eigen::Infinity>();
        V += inc;
        Ak = Ak * Ak;
        if (dn < 1e-14) break;
        if (!V.allFinite() || V.lpNorm<Eigen::Infinity>() > 1e12)
            throw NumericsError("state covariance diverges (unit root); "
                                "unconditional welfare undefined");
    }
    const auto& reg = so.sys->registry();
    auto mean_of = [&](int row) {
        double quad = 0.0;
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) quad += so.Gxx(row, p * k + q) * V(p, q);
        return so.z_ss[row] + 0.5 * so.g_ss[row] + 0.5 * quad;
    };
    WelfarePair out;
    out.with_penalty = mean_of(reg.index("Welf"));
    out.without_penalty = mean_of(reg.index("WelfNP"));
    return out;
}

}  // namespace twosector
