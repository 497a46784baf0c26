#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "params.hpp"
#include "registry.hpp"
#include "rules.hpp"
#include "system.hpp"

namespace twosector {

struct BuildOptions {
    bool with_rule = true;
    bool with_flex = true;   // stacked flexible-price counterpart
    bool with_welfare = true;
    bool calibrate_nu = true;  // false: respect params.nu, derive hours instead
    double wr = 0.0;         // ZLB penalty weight inside the welfare recursion
};

/// Closed-form deterministic steady state. Exact when pi_d_bar == pi_c_bar
/// (adjustment costs vanish at steady state); the Newton solver in steady.hpp
/// polishes and verifies. Also resolves nu (hours target) and chi_c (the
/// steady-state sector-C labor share, never a free parameter).
struct SteadyLevels {
    std::map<std::string, double> lv;
    double chi_c = 0.5;
    double nu = 1.0;
    double Rbar = 1.0;
    double Ybar = 1.0;

    double at(const std::string& k) const {
        auto it = lv.find(k);
        if (it == lv.end()) throw ConfigError("steady level missing: " + k);
        return it->second;
    }
};

inline SteadyLevels analytic_steady(const ModelVariant& variant, const ParameterSet& p,
                                    bool calibrate_nu = true) {
    SteadyLevels out;
    const bool ff = variant.kind == VariantKind::FullyFledged;
    const bool durable = variant.kind != VariantKind::StylizedNondurable;
    const double beta = p.beta, alpha = p.alpha, delta = durable ? p.delta : 1.0;
    const double pibar = p.pi_c_bar;

    const double mcc = (p.eps_c - 1.0) / p.eps_c;
    const double mcd = (p.eps_d - 1.0) / p.eps_d;
    const double wc = mcc;        // e^A = e^{A,C} = 1 at steady state
    const double wd = wc;         // wages equalize at the steady state
    const double Q = wd / mcd;
    const double uw = 1.0 - (1.0 - delta) * beta;  // user-cost weight

    const double wage_markup = ff ? p.eta / (p.eta - 1.0) : 1.0;
    const double zeta = (ff && !variant.drop_habit) ? p.zeta : 0.0;
    const double gy = ff ? p.g_y : 0.0;

    // ND = a_nd * C and the labor-market clearing chain are linear in C,
    // so the hours target (or a given nu) pins everything down in closed form:
    //   nu * N^{1+phi} = w (1-alpha) k2 / wage_markup,  C = N / k2.
    const double a_nd = delta * alpha / ((1.0 - alpha) * Q * uw);
    const double k2 = (1.0 / (1.0 - zeta) + gy * Q * a_nd) / (1.0 - gy) + a_nd;
    const double N =
        calibrate_nu
            ? p.target_N
            : std::pow(wc * (1.0 - alpha) * k2 / (wage_markup * p.nu),
                       1.0 / (1.0 + p.phi_frisch));
    const double C = N / k2;
    const double Z = C / (1.0 - zeta);
    const double D = alpha * C / ((1.0 - alpha) * Q * uw);
    const double ID = delta * D;
    const double ND = ID;             // Y^D = N^D = I^D at steady state
    const double YD = ND;
    const double NC = N - ND;
    const double YC = NC;
    const double Y = YC + Q * YD;
    const double nphi = std::pow(N, p.phi_frisch);
    const double nu =
        calibrate_nu ? wc * (1.0 - alpha) / (wage_markup * nphi * C) : p.nu;
    const double X = std::pow(C, 1.0 - alpha) * std::pow(D, alpha);
    const double R = pibar / beta;
    const double util =
        std::log(X) - nu * std::pow(N, 1.0 + p.phi_frisch) / (1.0 + p.phi_frisch);

    auto& lv = out.lv;
    lv["C"] = C;
    lv["D"] = D;
    lv["X"] = X;
    lv["N"] = N;
    lv["NC"] = NC;
    lv["ND"] = ND;
    lv["wC"] = wc;
    lv["wD"] = wd;
    lv["Lam"] = beta;
    lv["R"] = R;
    lv["Rreal"] = 1.0 / beta;
    lv["PiC"] = pibar;
    lv["PiD"] = pibar;
    lv["PiTil"] = pibar;
    lv["Q"] = Q;
    lv["Y"] = Y;
    lv["YC"] = YC;
    lv["YD"] = YD;
    lv["MCC"] = mcc;
    lv["MCD"] = mcd;
    lv["Theta"] = Q * uw;
    lv["Util"] = util;
    lv["Welf"] = util / (1.0 - beta);
    lv["WelfNP"] = util / (1.0 - beta);
    if (durable) lv["ID"] = ID;
    if (ff) {
        lv["Z"] = Z;
        lv["S"] = Z;
        lv["psi"] = 1.0;
        lv["muC"] = wage_markup;
        lv["muD"] = wage_markup;
        lv["PiwC"] = pibar;
        lv["PiwD"] = pibar;
    }
    out.chi_c = NC / N;
    out.nu = nu;
    out.Rbar = R;
    out.Ybar = Y;
    return out;
}

struct Build {
    SystemPtr sys;
    Vec z_ss;              // transformed analytic steady state
    ParameterSet params;   // nu and chi_c resolved
    SteadyLevels steady;
};

namespace detail {

class Assembler {
public:
    Assembler(ModelVariant variant, ParameterSet params)
        : variant_(variant), params_(std::move(params)) {}

    int var(const std::string& name, VarScale scale = VarScale::Log,
            VarRole role = VarRole::Control) {
        return reg_.add(name, role, scale);
    }
    int idx(const std::string& name) const { return reg_.index(name); }

    template <typename F>
    void eq(const std::string& name, F&& f, bool rule_dep = false) {
        Equation e;
        e.name = name;
        e.fd = [f](const Ctx<double>& c) { return f(c); };
        e.fdual = [f](const Ctx<Dual>& c) { return f(c); };
        e.rule_dependent = rule_dep;
        eqs_.push_back(std::move(e));
    }

    int shock_slot(Shock s) {
        for (size_t j = 0; j < shock_order_.size(); ++j)
            if (shock_order_[j] == s) return static_cast<int>(j);
        shock_order_.push_back(s);
        return static_cast<int>(shock_order_.size()) - 1;
    }

    /// AR(1) or ARMA(1,1) exogenous process in logs with standardized
    /// innovations; sigma lives inside the equation so the uncertainty
    /// scale is part of the model.
    int shock_var(Shock s) {
        std::string nm = shock_name(s);
        if (reg_.has(nm)) return reg_.index(nm);
        const auto& sp = params_.shock(s);
        int ie = var(nm, VarScale::Log, VarRole::Exogenous);
        int slot = shock_slot(s);
        double rho = sp.rho, sig = sp.sigma, ma = sp.theta_ma;
        if (ma == 0.0) {
            eq(nm, [=](const auto& c) {
                return log(c.now(ie)) - rho * log(c.prev(ie)) - sig * c.eps(slot);
            });
        } else {
            int im = var(std::string("m_") + nm, VarScale::Level, VarRole::State);
            eq(nm, [=](const auto& c) {
                return log(c.now(ie)) - rho * log(c.prev(ie)) -
                       sig * (c.eps(slot) + ma * c.prev(im));
            });
            eq(std::string("m_") + nm, [=](const auto& c) { return c.now(im) - c.eps(slot); });
        }
        return ie;
    }

    SystemPtr finish(bool require_square = true) {
        return std::make_shared<ResidualSystem>(variant_, params_, std::move(reg_),
                                                std::move(shock_order_), std::move(eqs_),
                                                require_square);
    }

    const ModelVariant& variant() const { return variant_; }
    const ParameterSet& p() const { return params_; }
    const VariableRegistry& registry() const { return reg_; }

private:
    ModelVariant variant_;
    ParameterSet params_;
    VariableRegistry reg_;
    std::vector<Shock> shock_order_;
    std::vector<Equation> eqs_;
};

/// Equations of one economy (sticky or flexible). The flexible block drops
/// nominal variables entirely: without a rule, only relative prices and the
/// real rate are determined.
inline void add_economy(Assembler& A, bool flexible, const SteadyLevels& ss,
                        const PolicyRuleSpec& spec, const RuleParams& rp,
                        const BuildOptions& opt) {
    const ParameterSet& p = A.p();
    const ModelVariant& v = A.variant();
    const bool ff = v.kind == VariantKind::FullyFledged;
    const bool durable = v.kind != VariantKind::StylizedNondurable;
    const std::string sfx = flexible ? "_f" : "";

    const double alpha = p.alpha, beta = p.beta, mu = p.mu, phi = p.phi_frisch;
    const double delta = durable ? p.delta : 1.0;
    const double chi = ss.chi_c, nu = ss.nu;
    const double theta_c = flexible ? 0.0 : p.theta_c;
    const double theta_d = flexible ? 0.0 : (v.flexible_prices_d ? 0.0 : p.theta_d);
    const double theta_wc = flexible ? 0.0 : p.theta_wc;
    const double theta_wd = flexible ? 0.0 : (v.flexible_wages_d ? 0.0 : p.theta_wd);
    const double pibc = p.pi_c_bar, pibd = p.pi_d_bar;
    const double eps_c = p.eps_c, eps_d = p.eps_d, eta = p.eta;
    const double phi_iac = (ff && !v.drop_iac) ? p.phi_iac : 0.0;
    const double zeta = (ff && !v.drop_habit) ? p.zeta : 0.0;
    const double rho_hab = (ff && !v.drop_habit) ? p.rho_c : 0.0;

    auto muted = [&](Shock s) {
        return v.excluded_shocks.count(s) > 0 ||
               (flexible && (s == Shock::C || s == Shock::D || s == Shock::wC || s == Shock::wD));
    };

    // variables
    const int iC = A.var("C" + sfx);
    const int iD = A.var("D" + sfx);
    const int iN = A.var("N" + sfx);
    const int iNC = A.var("NC" + sfx);
    const int iND = A.var("ND" + sfx);
    const int iwC = A.var("wC" + sfx);
    const int iwD = A.var("wD" + sfx);
    const int iQ = A.var("Q" + sfx);
    const int iY = A.var("Y" + sfx);
    const int iYC = A.var("YC" + sfx);
    const int iYD = A.var("YD" + sfx);
    const int iID = durable ? A.var("ID" + sfx) : -1;
    int iX = -1, iLam = -1, iR = -1, iRr = -1, iPiC = -1, iPiD = -1, iPiTil = -1;
    int iMCC = -1, iMCD = -1, iTheta = -1;
    int iZ = -1, iS = -1, ipsi = -1, imuC = -1, imuD = -1, iPiwC = -1, iPiwD = -1;
    if (!flexible) {
        iX = A.var("X");
        iLam = A.var("Lam");
        iR = A.var("R");
        iRr = A.var("Rreal");
        iPiC = A.var("PiC");
        iPiD = A.var("PiD");
        iPiTil = A.var("PiTil");
        iMCC = A.var("MCC");
        iMCD = A.var("MCD");
        iTheta = A.var("Theta");
    } else {
        iRr = A.var("Rreal" + sfx);
    }
    if (ff) {
        iZ = A.var("Z" + sfx);
        iS = A.var("S" + sfx);
        ipsi = A.var("psi" + sfx);
        if (!flexible) {
            imuC = A.var("muC");
            imuD = A.var("muD");
            iPiwC = A.var("PiwC");
            iPiwD = A.var("PiwD");
        }
    }

    // shocks shared across the stacked blocks
    const int ieB = A.shock_var(Shock::B);
    const int ieA = A.shock_var(Shock::A);
    int ieAC = -1, ieAD = -1, ieI = -1, ieG = -1, ieC = -1, ieD = -1, iewC = -1, iewD = -1;
    if (!ff) {
        ieAC = A.shock_var(Shock::AC);
        ieAD = A.shock_var(Shock::AD);
    } else {
        ieI = A.shock_var(Shock::I);
        ieG = A.shock_var(Shock::G);
        ieC = A.shock_var(Shock::C);
        ieD = A.shock_var(Shock::D);
        iewC = A.shock_var(Shock::wC);
        iewD = A.shock_var(Shock::wD);
    }

    const bool mB = muted(Shock::B), mI = ff && muted(Shock::I), mG = ff && muted(Shock::G);
    const bool mC = ff && muted(Shock::C), mD = ff && muted(Shock::D);
    const bool mwC = ff && muted(Shock::wC), mwD = ff && muted(Shock::wD);
    const bool mAC = !ff && muted(Shock::AC), mAD = !ff && muted(Shock::AD);

    // marginal utility of (effective) nondurable consumption and the
    // stochastic discount factor, inlined so expectational products are
    // approximated jointly at second order
    auto UC_now = [=](const auto& c) { return (1.0 - alpha) / c.now(iC); };
    auto sdf = [=](const auto& c) {
        auto eb_ratio = mB ? c.one() : c.next(ieB) / c.now(ieB);
        return beta * (c.now(iC) / c.next(iC)) * eb_ratio;
    };
    auto eA_now = [=](const auto& c) { return c.now(ieA); };
    auto eAC_now = [=](const auto& c) { return (!ff && !mAC) ? c.now(ieAC) : c.one(); };
    auto eAD_now = [=](const auto& c) { return (!ff && !mAD) ? c.now(ieAD) : c.one(); };

    // --- households --------------------------------------------------------
    if (ff) {
        A.eq("habit" + sfx,
             [=](const auto& c) { return c.now(iC) - (c.now(iZ) - zeta * c.prev(iS)); });
        A.eq("habit_stock" + sfx, [=](const auto& c) {
            return c.now(iS) - rho_hab * c.prev(iS) - (1.0 - rho_hab) * c.now(iZ);
        });
    }

    // relative demand / shadow value of durables (collapses to the static
    // relative-demand condition at delta = 1)
    if (ff) {
        A.eq("durable_value" + sfx, [=](const auto& c) {
            auto ud_uc = (alpha / (1.0 - alpha)) * c.now(iC) / c.now(iD);
            return c.now(iQ) * c.now(ipsi) - ud_uc -
                   (1.0 - delta) * sdf(c) * c.next(iQ) * c.next(ipsi);
        });
    } else {
        A.eq("durable_value" + sfx, [=](const auto& c) {
            auto ud_uc = (alpha / (1.0 - alpha)) * c.now(iC) / c.now(iD);
            return c.now(iQ) - ud_uc - (1.0 - delta) * sdf(c) * c.next(iQ);
        });
    }

    if (durable) {
        if (ff) {
            A.eq("durable_lom" + sfx, [=](const auto& c) {
                auto g = c.now(iID) / c.prev(iID);
                auto Sg = 0.5 * phi_iac * (g - 1.0) * (g - 1.0);
                auto ei = mI ? c.one() : c.now(ieI);
                return c.now(iD) - (1.0 - delta) * c.prev(iD) - ei * c.now(iID) * (1.0 - Sg);
            });
            A.eq("investment_foc" + sfx, [=](const auto& c) {
                auto g = c.now(iID) / c.prev(iID);
                auto gn = c.next(iID) / c.now(iID);
                auto Sg = 0.5 * phi_iac * (g - 1.0) * (g - 1.0);
                auto Spg = phi_iac * (g - 1.0);
                auto Spgn = phi_iac * (gn - 1.0);
                auto ei = mI ? c.one() : c.now(ieI);
                auto ein = mI ? c.one() : c.next(ieI);
                return 1.0 - c.now(ipsi) * ei * (1.0 - Sg - Spg * g) -
                       sdf(c) * c.next(ipsi) * (c.next(iQ) / c.now(iQ)) * ein * Spgn * gn * gn;
            });
        } else {
            A.eq("durable_lom" + sfx, [=](const auto& c) {
                return c.now(iD) - (1.0 - delta) * c.prev(iD) - c.now(iID);
            });
        }
    }

    // labor aggregation: CES in mu = 1/lambda form, exact at mu = 0
    A.eq("labor_ces" + sfx, [=](const auto& c) {
        auto bc = std::pow(chi, -mu) * pow(c.now(iNC), 1.0 + mu);
        auto bd = std::pow(1.0 - chi, -mu) * pow(c.now(iND), 1.0 + mu);
        return c.now(iN) - pow(bc + bd, 1.0 / (1.0 + mu));
    });

    // MRS between leisure in sector j and consumption
    auto mrs_c = [=](const auto& c) {
        return nu * std::pow(chi, -mu) * pow(c.now(iNC), mu) * pow(c.now(iN), phi - mu) /
               UC_now(c);
    };
    auto mrs_d = [=](const auto& c) {
        return nu * std::pow(1.0 - chi, -mu) * pow(c.now(iND), mu) * pow(c.now(iN), phi - mu) /
               UC_now(c);
    };

    if (!ff) {
        A.eq("labor_supply_c" + sfx, [=](const auto& c) { return c.now(iwC) - mrs_c(c); });
        A.eq("labor_supply_d" + sfx, [=](const auto& c) { return c.now(iwD) - mrs_d(c); });
    } else if (flexible) {
        const double wmk = eta / (eta - 1.0);
        A.eq("labor_supply_c" + sfx, [=](const auto& c) { return c.now(iwC) - wmk * mrs_c(c); });
        A.eq("labor_supply_d" + sfx, [=](const auto& c) { return c.now(iwD) - wmk * mrs_d(c); });
    } else {
        // Rotemberg wage setting in each sector
        A.eq("wage_markup_c", [=](const auto& c) { return c.now(imuC) - c.now(iwC) / mrs_c(c); });
        A.eq("wage_markup_d", [=](const auto& c) { return c.now(imuD) - c.now(iwD) / mrs_d(c); });
        A.eq("wage_infl_c", [=](const auto& c) {
            return c.now(iPiwC) - (c.now(iwC) / c.prev(iwC)) * c.now(iPiC);
        });
        A.eq("wage_infl_d", [=](const auto& c) {
            return c.now(iPiwD) - (c.now(iwD) / c.prev(iwD)) * c.now(iPiC);
        });
        A.eq("wage_setting_c", [=](const auto& c) {
            auto ew = mwC ? c.one() : c.now(iewC);
            return (1.0 - ew * eta) + ew * eta / c.now(imuC) -
                   theta_wc * (c.now(iPiwC) - pibc) * c.now(iPiwC) +
                   sdf(c) * theta_wc * (c.next(iPiwC) - pibc) * c.next(iPiwC) *
                       (c.next(iwC) * c.next(iNC)) / (c.now(iwC) * c.now(iNC));
        });
        A.eq("wage_setting_d", [=](const auto& c) {
            auto ew = mwD ? c.one() : c.now(iewD);
            return (1.0 - ew * eta) + ew * eta / c.now(imuD) -
                   theta_wd * (c.now(iPiwD) - pibc) * c.now(iPiwD) +
                   sdf(c) * theta_wd * (c.next(iPiwD) - pibc) * c.next(iPiwD) *
                       (c.next(iwD) * c.next(iND)) / (c.now(iwD) * c.now(iND));
        });
    }

    // --- production and pricing ---------------------------------------------
    A.eq("production_c" + sfx,
         [=](const auto& c) { return c.now(iYC) - eA_now(c) * eAC_now(c) * c.now(iNC); });
    A.eq("production_d" + sfx,
         [=](const auto& c) { return c.now(iYD) - eA_now(c) * eAD_now(c) * c.now(iND); });

    if (!flexible) {
        A.eq("price_setting_c", [=](const auto& c) {
            auto ec = (ff && !mC) ? c.now(ieC) : c.one();
            return ec * eps_c * c.now(iMCC) - (ec * eps_c - 1.0) -
                   theta_c * (c.now(iPiC) - pibc) * c.now(iPiC) +
                   sdf(c) * theta_c * (c.next(iYC) / c.now(iYC)) * (c.next(iPiC) - pibc) *
                       c.next(iPiC);
        });
        A.eq("mc_def_c", [=](const auto& c) {
            return c.now(iMCC) - c.now(iwC) / (eA_now(c) * eAC_now(c));
        });
        A.eq("price_setting_d", [=](const auto& c) {
            auto ed = (ff && !mD) ? c.now(ieD) : c.one();
            return ed * eps_d * c.now(iMCD) - (ed * eps_d - 1.0) -
                   theta_d * (c.now(iPiD) - pibd) * c.now(iPiD) +
                   sdf(c) * theta_d * (c.next(iQ) / c.now(iQ)) * (c.next(iYD) / c.now(iYD)) *
                       (c.next(iPiD) - pibd) * c.next(iPiD);
        });
        A.eq("mc_def_d", [=](const auto& c) {
            return c.now(iMCD) - c.now(iwD) / (eA_now(c) * eAD_now(c) * c.now(iQ));
        });
    } else {
        // flexible prices: constant markup over marginal cost
        A.eq("price_flex_c" + sfx, [=](const auto& c) {
            return c.now(iwC) - ((eps_c - 1.0) / eps_c) * eA_now(c) * eAC_now(c);
        });
        A.eq("price_flex_d" + sfx, [=](const auto& c) {
            return c.now(iwD) - ((eps_d - 1.0) / eps_d) * eA_now(c) * eAD_now(c) * c.now(iQ);
        });
    }

    // --- nominal block / policy ----------------------------------------------
    if (!flexible) {
        A.eq("sdf_def", [=](const auto& c) { return c.now(iLam) - sdf(c); });
        A.eq("euler", [=](const auto& c) { return 1.0 - sdf(c) * c.now(iR) / c.next(iPiC); });
        A.eq("relative_inflation", [=](const auto& c) {
            return c.now(iPiD) - c.now(iPiC) * c.now(iQ) / c.prev(iQ);
        });
        A.eq("real_rate", [=](const auto& c) { return c.now(iRr) - c.now(iR) / c.next(iPiC); });
        A.eq("inflation_composite", [=](const auto& c) {
            return c.now(iPiTil) - pow(c.now(iPiC), 1.0 - rp.tau) * pow(c.now(iPiD), rp.tau);
        }, /*rule_dep=*/true);

        const int ieR = A.shock_var(Shock::R);
        if (opt.with_rule) {
            const double Rbar = ss.Rbar, Ybar = ss.Ybar;
            const double pit_bar = std::pow(pibc, 1.0 - rp.tau) * std::pow(pibd, rp.tau);
            const double rho_r = rp.rho_r, a_pi = rp.alpha_pi, a_y = rp.alpha_y;
            const double a_dy = spec.uses_dy() ? rp.alpha_dy : 0.0;
            const double a_w = spec.uses_wage_term() ? rp.alpha_w : 0.0;
            const RuleFamily fam = spec.family;
            const bool has_flex = opt.with_flex && spec.needs_flex_block();
            const int iYf = has_flex ? A.idx("Y_f") : -1;
            A.eq("policy_rule", [=](const auto& c) {
                auto gap_now =
                    has_flex ? log(c.now(iY) / c.now(iYf)) : log(c.now(iY) / Ybar);
                auto resid = log(c.now(iR) / Rbar) - rho_r * log(c.prev(iR) / Rbar) -
                             a_pi * log(c.now(iPiTil) / pit_bar) - a_y * gap_now -
                             log(c.now(ieR));
                if (fam != RuleFamily::Implementable) {
                    auto gap_prev =
                        has_flex ? log(c.prev(iY) / c.prev(iYf)) : log(c.prev(iY) / Ybar);
                    resid = resid - a_dy * (gap_now - gap_prev);
                }
                if (fam == RuleFamily::WageInflation || fam == RuleFamily::RealWageGrowth) {
                    auto wagg_now = pow(pow(c.now(iwC), 1.0 + mu) + pow(c.now(iwD), 1.0 + mu),
                                        1.0 / (1.0 + mu));
                    auto wagg_prev = pow(
                        pow(c.prev(iwC), 1.0 + mu) + pow(c.prev(iwD), 1.0 + mu), 1.0 / (1.0 + mu));
                    if (fam == RuleFamily::WageInflation) {
                        auto piw = (wagg_now / wagg_prev) * c.now(iPiC);
                        resid = resid - a_w * log(piw / pibc);
                    } else {
                        resid = resid - a_w * log(wagg_now / wagg_prev);
                    }
                }
                if (fam == RuleFamily::WageGrowthDifferential) {
                    resid = resid - a_w * (log(c.now(iwD) / c.now(iwC)) -
                                           log(c.prev(iwD) / c.prev(iwC)));
                }
                return resid;
            }, /*rule_dep=*/true);
        } else {
            // peg keeps the system square when no rule is attached (tests)
            const double Rbar = ss.Rbar;
            A.eq("policy_rule",
                 [=](const auto& c) { return log(c.now(iR) / Rbar) - log(c.now(ieR)); });
        }
    } else {
        A.eq("euler" + sfx, [=](const auto& c) { return 1.0 - sdf(c) * c.now(iRr); });
    }

    // --- market clearing -------------------------------------------------------
    auto price_cost_c = [=](const auto& c) {
        return 0.5 * theta_c * (c.now(iPiC) - pibc) * (c.now(iPiC) - pibc);
    };
    auto price_cost_d = [=](const auto& c) {
        return 0.5 * theta_d * (c.now(iPiD) - pibd) * (c.now(iPiD) - pibd);
    };
    const double Gbar = ff ? p.g_y * ss.Ybar : 0.0;  // e^G is unit-mean
    if (!flexible) {
        if (ff) {
            A.eq("market_clearing_c", [=](const auto& c) {
                auto eg = mG ? c.zero() : Gbar * c.now(ieG);
                auto wage_cost = 0.5 * theta_wc * (c.now(iPiwC) - pibc) * (c.now(iPiwC) - pibc) *
                                 c.now(iwC) * c.now(iNC);
                return c.now(iYC) - c.now(iZ) - eg - price_cost_c(c) * c.now(iYC) - wage_cost;
            });
            A.eq("market_clearing_d", [=](const auto& c) {
                auto wage_cost = 0.5 * theta_wd * (c.now(iPiwD) - pibc) * (c.now(iPiwD) - pibc) *
                                 c.now(iwD) * c.now(iND);
                return c.now(iYD) - c.now(iID) - price_cost_d(c) * c.now(iYD) - wage_cost;
            });
        } else {
            A.eq("market_clearing_c", [=](const auto& c) {
                return c.now(iYC) - c.now(iC) - price_cost_c(c) * c.now(iYC);
            });
            const int iabs = durable ? iID : iD;
            A.eq("market_clearing_d", [=](const auto& c) {
                return c.now(iYD) - c.now(iabs) - price_cost_d(c) * c.now(iYD);
            });
        }
    } else {
        if (ff) {
            A.eq("market_clearing_c" + sfx, [=](const auto& c) {
                auto eg = mG ? c.zero() : Gbar * c.now(ieG);
                return c.now(iYC) - c.now(iZ) - eg;
            });
            A.eq("market_clearing_d" + sfx,
                 [=](const auto& c) { return c.now(iYD) - c.now(iID); });
        } else {
            A.eq("market_clearing_c" + sfx,
                 [=](const auto& c) { return c.now(iYC) - c.now(iC); });
            const int iabs = durable ? iID : iD;
            A.eq("market_clearing_d" + sfx,
                 [=](const auto& c) { return c.now(iYD) - c.now(iabs); });
        }
    }
    A.eq("aggregate_output" + sfx, [=](const auto& c) {
        return c.now(iY) - c.now(iYC) - c.now(iQ) * c.now(iYD);
    });

    // --- diagnostics and welfare (sticky block only) ----------------------------
    if (!flexible) {
        if (ff) {
            A.eq("user_cost", [=](const auto& c) {
                return c.now(iTheta) - c.now(iQ) * c.now(ipsi) +
                       (1.0 - delta) * sdf(c) * c.next(iQ) * c.next(ipsi);
            });
        } else {
            A.eq("user_cost", [=](const auto& c) {
                return c.now(iTheta) - c.now(iQ) + (1.0 - delta) * sdf(c) * c.next(iQ);
            });
        }
        A.eq("consumption_basket", [=](const auto& c) {
            return c.now(iX) - pow(c.now(iC), 1.0 - alpha) * pow(c.now(iD), alpha);
        });
        if (opt.with_welfare) {
            const int iU = A.var("Util", VarScale::Level);
            const int iW = A.var("Welf", VarScale::Level);
            const int iWnp = A.var("WelfNP", VarScale::Level);
            const double wr = opt.wr, Rpen = ss.Rbar, phi1 = 1.0 + phi;
            A.eq("period_utility", [=](const auto& c) {
                auto eb = mB ? c.one() : c.now(ieB);
                return c.now(iU) - eb * (log(c.now(iX)) - nu * pow(c.now(iN), phi1) / phi1);
            });
            A.eq("welfare", [=](const auto& c) {
                auto pen = wr * (c.now(iR) - Rpen) * (c.now(iR) - Rpen);
                return c.now(iW) - (c.now(iU) - pen + beta * c.next(iW));
            });
            A.eq("welfare_no_penalty", [=](const auto& c) {
                return c.now(iWnp) - (c.now(iU) + beta * c.next(iWnp));
            });
        }
    }
}

}  // namespace detail

/// Assemble the simulation system for a variant: flexible-price block first
/// (so the rule can reference Y_f), then the sticky economy; shock processes
/// are registered on demand and shared between the blocks.
inline Build build_model(const ModelVariant& variant, ParameterSet params,
                         const PolicyRuleSpec& spec = {}, const RuleParams& rp = {},
                         BuildOptions opt = {}) {
    variant.validate();
    params.validate();
    if (opt.with_rule) spec.validate(rp, params.mu);

    SteadyLevels ss = analytic_steady(variant, params, opt.calibrate_nu);
    params.nu = ss.nu;
    params.chi_c = ss.chi_c;

    const bool flex = opt.with_flex && (!opt.with_rule || spec.needs_flex_block());
    BuildOptions o = opt;
    o.with_flex = flex;

    detail::Assembler A(variant, params);
    if (flex) detail::add_economy(A, /*flexible=*/true, ss, spec, rp, o);
    detail::add_economy(A, /*flexible=*/false, ss, spec, rp, o);

    Build b;
    b.sys = A.finish();
    b.params = params;
    b.steady = ss;

    const auto& reg = b.sys->registry();
    Vec z(reg.size());
    for (int i = 0; i < reg.size(); ++i) {
        const std::string& nm = reg.name(i);
        double level;
        if (nm.rfind("m_", 0) == 0) level = 0.0;
        else if (ss.lv.count(nm)) level = ss.at(nm);
        else if (nm.size() > 2 && nm.substr(nm.size() - 2) == "_f") level = ss.at(nm.substr(0, nm.size() - 2));
        else level = 1.0;  // exogenous shock levels
        z[i] = reg.scale(i) == VarScale::Log ? std::log(level) : level;
    }
    b.z_ss = z;
    return b;
}

/// Stacked sticky + flexible system from the same inputs; Y_f is wired into
/// the policy rule whenever the family uses an output gap.
inline Build flexible_counterpart(const ModelVariant& variant, const ParameterSet& params,
                                  const PolicyRuleSpec& spec, const RuleParams& rp,
                                  BuildOptions opt = {}) {
    opt.with_flex = true;
    return build_model(variant, params, spec, rp, opt);
}

}  // namespace twosector
