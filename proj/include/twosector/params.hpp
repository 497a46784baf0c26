#pragma once
#include <array>
#include <map>
#include <set>
#include <string>

#include "common.hpp"

namespace twosector {

/// Shock identifiers. The stylized variants use B, A, AC, AD (plus R with
/// sigma 0 so the rule residual is well formed); the fully-fledged model
/// swaps the sectoral technology shocks for markup, investment and
/// government-spending disturbances.
enum class Shock { B, A, AC, AD, I, G, C, D, wC, wD, R, Count };

inline constexpr int kNumShock = static_cast<int>(Shock::Count);

inline const char* shock_name(Shock s) {
    static const char* names[] = {"eB", "eA", "eAC", "eAD", "eI", "eG",
                                  "eC", "eD", "ewC", "ewD", "eR"};
    return names[static_cast<int>(s)];
}

struct ShockProcess {
    double rho = 0.0;
    double sigma = 0.0;
    double theta_ma = 0.0;  // MA(1) coefficient, nonzero only for markup shocks
};

/// Every structural, policy and shock parameter of the three model variants.
/// Labor mobility is stored as mu = 1/lambda so perfect mobility is mu = 0
/// exactly. chi_c is recomputed inside the steady-state solve, never set
/// directly.
struct ParameterSet {
    double beta = 0.99;
    double alpha = 0.50;        // sector-D expenditure share
    double phi_frisch = 0.50;   // inverse Frisch elasticity
    double nu = 4.0;            // labor disutility scale (recalibrated to target_N)
    double mu = 1.0;            // 1/lambda; 0 = perfect mobility
    double chi_c = 0.5;         // steady-state labor share of sector C (derived)
    double eps_c = 6.0;
    double eps_d = 6.0;
    double theta_c = 60.0;
    double theta_d = 60.0;
    double delta = 1.0;         // durables depreciation; 1 = nondurable sector D
    double zeta = 0.0;          // habit degree
    double rho_c = 0.0;         // habit persistence
    double phi_iac = 0.0;       // investment adjustment cost curvature
    double eta = 21.0;          // labor substitution elasticity (wage markup)
    double theta_wc = 0.0;
    double theta_wd = 0.0;
    double g_y = 0.0;           // government share of output
    double pi_c_bar = 1.0;      // steady-state gross sectoral inflation
    double pi_d_bar = 1.0;
    double target_N = 0.33;     // steady-state hours target used to calibrate nu

    std::array<ShockProcess, kNumShock> shocks{};

    // measurement constants (percent units, estimation only)
    double gamma_trend = 0.2120;
    double pibar_c_obs = 1.0908;
    double pibar_d_obs = 0.5327;
    double rbar_obs = 1.6241;

    double lambda_mob() const { return mu > 0 ? 1.0 / mu : std::numeric_limits<double>::infinity(); }
    void set_lambda(double lam) { mu = std::isinf(lam) ? 0.0 : 1.0 / lam; }

    ShockProcess& shock(Shock s) { return shocks[static_cast<int>(s)]; }
    const ShockProcess& shock(Shock s) const { return shocks[static_cast<int>(s)]; }

    void validate() const {
        auto in_open = [](double x, double lo, double hi) { return x > lo && x < hi; };
        if (!in_open(beta, 0.0, 1.0)) throw ConfigError("beta must lie in (0,1)");
        if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0,1]");
        if (!in_open(alpha, 0.0, 1.0)) throw ConfigError("alpha must lie in (0,1)");
        if (mu < 0.0) throw ConfigError("mu = 1/lambda must be nonnegative");
        if (theta_c < 0 || theta_d < 0 || theta_wc < 0 || theta_wd < 0)
            throw ConfigError("Rotemberg parameters must be nonnegative");
        if (eps_c <= 1 || eps_d <= 1) throw ConfigError("goods elasticities must exceed 1");
        if (eta <= 1) throw ConfigError("labor elasticity must exceed 1");
        if (!(zeta >= 0 && zeta < 1) || !(rho_c >= 0 && rho_c < 1))
            throw ConfigError("habit parameters must lie in [0,1)");
        if (g_y < 0 || g_y >= 1) throw ConfigError("g_y must lie in [0,1)");
        for (const auto& sp : shocks) {
            if (sp.sigma < 0) throw ConfigError("shock sigma must be nonnegative");
            if (std::abs(sp.rho) >= 1.0) throw ConfigError("|shock rho| must be < 1");
        }
    }
};

enum class VariantKind { StylizedNondurable, StylizedDurable, FullyFledged };

struct ModelVariant {
    VariantKind kind = VariantKind::StylizedNondurable;
    bool flexible_prices_d = false;
    bool flexible_wages_d = false;
    bool drop_habit = false;
    bool drop_iac = false;
    std::set<Shock> excluded_shocks;

    void validate() const {
        if (kind != VariantKind::FullyFledged) {
            if (flexible_wages_d || drop_habit || drop_iac)
                throw ConfigError("wage/habit/IAC flags require the fully-fledged variant");
        }
    }
};

/// Stylized calibration of the illustrative experiments: quarterly, symmetric
/// sectors, both producing nondurables, AR(1) shocks with rho 0.9 and sd 1%.
inline ParameterSet stylized_baseline() {
    ParameterSet p;
    p.beta = 0.99;
    p.alpha = 0.50;
    p.phi_frisch = 0.5;
    p.eps_c = p.eps_d = 6.0;
    p.theta_c = p.theta_d = 60.0;
    p.delta = 1.0;
    p.mu = 1.0;
    p.target_N = 0.33;
    for (Shock s : {Shock::B, Shock::A, Shock::AC, Shock::AD}) {
        p.shock(s).rho = 0.90;
        p.shock(s).sigma = 0.01;
    }
    p.shock(Shock::R).rho = 0.0;
    p.shock(Shock::R).sigma = 0.0;
    return p;
}

/// Fully-fledged calibration: calibrated block plus posterior-mean estimates.
inline ParameterSet fully_fledged_baseline() {
    ParameterSet p;
    p.beta = 0.99;
    p.delta = 0.010;
    p.alpha = 0.20;
    p.eps_c = p.eps_d = 6.0;
    p.eta = 21.0;
    p.g_y = 0.20;
    p.target_N = 0.33;

    p.set_lambda(1.2250);
    p.phi_frisch = 0.2320;
    p.zeta = 0.6919;
    p.rho_c = 0.4384;
    p.theta_c = 20.424;
    p.theta_d = 29.194;
    p.theta_wc = 122.04;
    p.theta_wd = 132.45;
    p.phi_iac = 2.3028;

    p.gamma_trend = 0.2120;
    p.pibar_c_obs = 1.0908;
    p.pibar_d_obs = 0.5327;
    p.rbar_obs = 1.6241;

    auto set = [&](Shock s, double rho, double sig, double ma = 0.0) {
        p.shock(s).rho = rho;
        p.shock(s).sigma = sig;
        p.shock(s).theta_ma = ma;
    };
    set(Shock::A, 0.9713, 0.0047);
    set(Shock::R, 0.1273, 0.0031);
    set(Shock::I, 0.2787, 0.0597);
    set(Shock::B, 0.7133, 0.0124);
    set(Shock::C, 0.9859, 0.0141, 0.3046);
    set(Shock::D, 0.9762, 0.0455, 0.1840);
    set(Shock::wC, 0.9962, 0.0165, 0.2170);
    set(Shock::wD, 0.9746, 0.0444, 0.1909);
    set(Shock::G, 0.9201, 0.0347);
    return p;
}

/// Estimated interest-rate rule of the fully-fledged model (posterior means).
/// The estimation parametrizes long-run feedback coefficients gamma_i with
/// alpha_i = (1 - rho_r) * gamma_i in the rule equation.
struct EstimatedRule {
    static constexpr double rho_r = 0.6334;
    static constexpr double gamma_pi = 1.4761;
    static constexpr double gamma_y = 0.0225;
    static constexpr double gamma_dy = 0.3525;
    static constexpr double alpha_pi = (1.0 - rho_r) * gamma_pi;  // 0.5411
    static constexpr double alpha_y = (1.0 - rho_r) * gamma_y;    // 0.0082
    static constexpr double alpha_dy = (1.0 - rho_r) * gamma_dy;  // 0.1292
    static constexpr double tau = 0.2264;
};

}  // namespace twosector
