#include <random>

#include "doctest.h"
#include "twosector/model.hpp"
#include "twosector/steady.hpp"

using namespace twosector;

namespace {

Build symmetric_build(RuleParams rp = {}) {
    ModelVariant v;
    v.kind = VariantKind::StylizedNondurable;
    PolicyRuleSpec spec;
    rp.rho_r = rp.rho_r == 0 ? 0.8 : rp.rho_r;
    if (rp.alpha_pi == 0) rp.alpha_pi = 1.5;
    if (rp.alpha_y == 0) rp.alpha_y = 0.125;
    return build_model(v, stylized_baseline(), spec, rp);
}

}  // namespace

TEST_CASE("symmetric stylized steady state hits the calibration targets") {
    Build b = symmetric_build();
    SteadyState ss = solve_steady_state(b);
    CHECK(ss.max_residual <= 1e-10);

    // R = 1/beta with unit gross inflation
    CHECK(ss.level(*b.sys, "R") == doctest::Approx(1.0 / 0.99).epsilon(1e-12));
    // markup eps/(eps-1): real marginal cost 5/6 in both sectors
    CHECK(ss.level(*b.sys, "MCC") == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(ss.level(*b.sys, "MCD") == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    // hours target and symmetric sector split
    CHECK(ss.level(*b.sys, "N") == doctest::Approx(0.33).epsilon(1e-12));
    CHECK(ss.level(*b.sys, "NC") == doctest::Approx(0.165).epsilon(1e-12));
    CHECK(ss.level(*b.sys, "ND") == doctest::Approx(0.165).epsilon(1e-12));
    CHECK(b.params.chi_c == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ss.level(*b.sys, "Q") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steady residuals vanish for all shipped variants") {
    for (auto kind : {VariantKind::StylizedNondurable, VariantKind::StylizedDurable,
                      VariantKind::FullyFledged}) {
        ModelVariant v;
        v.kind = kind;
        ParameterSet p =
            kind == VariantKind::FullyFledged ? fully_fledged_baseline() : stylized_baseline();
        if (kind == VariantKind::StylizedDurable) p.delta = 0.010;
        PolicyRuleSpec spec;
        RuleParams rp;
        rp.rho_r = 0.8;
        rp.alpha_pi = 1.5;
        rp.alpha_y = 0.125;
        rp.tau = 0.3;
        Build b = build_model(v, p, spec, rp);
        CAPTURE(static_cast<int>(kind));
        CHECK(b.sys->eval_steady(b.z_ss).lpNorm<Eigen::Infinity>() <= 1e-10);
        SteadyState ss = solve_steady_state(b);
        CHECK(ss.max_residual <= 1e-10);
    }
}

TEST_CASE("durable variant with full depreciation matches the nondurable system") {
    ModelVariant vn, vd;
    vn.kind = VariantKind::StylizedNondurable;
    vd.kind = VariantKind::StylizedDurable;
    ParameterSet p = stylized_baseline();
    p.delta = 1.0;
    PolicyRuleSpec spec;
    RuleParams rp;
    rp.rho_r = 0.8;
    rp.alpha_pi = 1.5;
    rp.alpha_y = 0.125;
    Build bn = build_model(vn, p, spec, rp);
    Build bd = build_model(vd, p, spec, rp);

    // identical steady state on shared variables
    SteadyState sn = solve_steady_state(bn);
    SteadyState sd = solve_steady_state(bd);
    for (const auto& vi : bn.sys->registry().all()) {
        double a = sn.levels[bn.sys->registry().index(vi.name)];
        double b2 = sd.levels[bd.sys->registry().index(vi.name)];
        CAPTURE(vi.name);
        CHECK(std::abs(a - b2) <= 1e-10 * std::max(1.0, std::abs(a)));
    }

    // identical residuals on shared equations at 50 random points
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> du(-0.05, 0.05);
    const auto& regn = bn.sys->registry();
    const auto& regd = bd.sys->registry();
    int nn = bn.sys->n(), nd = bd.sys->n();
    int idD = regd.index("ID"), idDf = regd.index("ID_f");
    for (int trial = 0; trial < 50; ++trial) {
        Vec zp = bn.z_ss, zc = bn.z_ss, zx = bn.z_ss;
        for (int i = 0; i < nn; ++i) {
            zp[i] += du(rng);
            zc[i] += du(rng);
            zx[i] += du(rng);
        }
        Vec eps = Vec::Zero(bn.sys->ne());
        for (int j = 0; j < bn.sys->ne(); ++j) eps[j] = du(rng);

        // map the same point into the durable system; set ID := D values
        Vec wp = bd.z_ss, wc = bd.z_ss, wx = bd.z_ss;
        for (int i = 0; i < nd; ++i) {
            const std::string& nm = regd.name(i);
            std::string src = nm;
            if (nm == "ID") src = "D";
            if (nm == "ID_f") src = "D_f";
            int k = regn.index(src);
            wp[i] = zp[k];
            wc[i] = zc[k];
            wx[i] = zx[k];
        }
        (void)idD;
        (void)idDf;
        Vec fn = bn.sys->eval(zp, zc, zx, eps);
        Vec fd = bd.sys->eval(wp, wc, wx, eps);
        for (int i = 0; i < bn.sys->m(); ++i) {
            int k = bd.sys->eq_index(bn.sys->eq_name(i));
            CAPTURE(bn.sys->eq_name(i));
            CHECK(std::abs(fn[i] - fd[k]) <= 1e-12);
        }
    }
}

TEST_CASE("perfect mobility equalizes wages in the residual sense") {
    ModelVariant v;
    v.kind = VariantKind::StylizedNondurable;
    ParameterSet p = stylized_baseline();
    p.mu = 0.0;
    PolicyRuleSpec spec;
    RuleParams rp;
    rp.rho_r = 0.8;
    rp.alpha_pi = 1.5;
    Build b = build_model(v, p, spec, rp);
    const auto& reg = b.sys->registry();
    // perturb hours asymmetrically; labor-supply residuals force wC = wD
    Vec z = b.z_ss;
    z[reg.index("NC")] += 0.03;
    z[reg.index("ND")] -= 0.02;
    Vec eps = Vec::Zero(b.sys->ne());
    int eq_c = b.sys->eq_index("labor_supply_c");
    int eq_d = b.sys->eq_index("labor_supply_d");
    Vec f = b.sys->eval(z, z, z, eps);
    // with mu = 0 both residuals imply w_j = nu N^phi / U_C independent of Nj:
    // equal residuals iff wC == wD at this point (they are, both at SS value)
    CHECK(f[eq_c] == doctest::Approx(f[eq_d]).epsilon(1e-12));
}

TEST_CASE("nu calibration: bisection oracle agrees with the closed form") {
    ModelVariant v;
    v.kind = VariantKind::StylizedNondurable;
    ParameterSet p = stylized_baseline();
    PolicyRuleSpec spec;
    RuleParams rp;
    rp.rho_r = 0.8;
    rp.alpha_pi = 1.5;

    // closed form at target 0.33
    Build b = build_model(v, p, spec, rp);
    double nu_closed = b.params.nu;
    double nu_root = calibrate_nu(v, p, 0.33, spec, rp);
    CHECK(nu_root == doctest::Approx(nu_closed).epsilon(1e-8));

    // a different target solved by the root finder, steady state re-verified
    double nu25 = calibrate_nu(v, p, 0.25, spec, rp);
    ParameterSet q = p;
    q.nu = nu25;
    BuildOptions opt;
    opt.calibrate_nu = false;
    Build b25 = build_model(v, q, spec, rp, opt);
    SteadyState ss = solve_steady_state(b25);
    CHECK(ss.level(*b25.sys, "N") == doctest::Approx(0.25).epsilon(1e-10));

    CHECK_THROWS_AS(calibrate_nu(v, p, 1.5, spec, rp), ConfigError);
}

TEST_CASE("parameter and variant validation") {
    ParameterSet p = stylized_baseline();
    p.mu = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    ModelVariant v;
    v.kind = VariantKind::StylizedDurable;
    v.drop_iac = true;
    CHECK_THROWS_AS(v.validate(), ConfigError);
    // wage-growth-differential rule disallowed at mu = 0
    PolicyRuleSpec spec;
    spec.family = RuleFamily::WageGrowthDifferential;
    RuleParams rp;
    rp.alpha_pi = 1.5;
    CHECK_THROWS_AS(spec.validate(rp, 0.0), ConfigError);
}

TEST_CASE("system bookkeeping: square, expectational count, shock slots") {
    Build b = symmetric_build();
    CHECK(b.sys->m() == b.sys->n());
    CHECK(b.sys->expectational_count() > 0);
    CHECK(b.sys->shock_order().size() == 5);  // B, A, AC, AD, R
    CHECK_NOTHROW(b.sys->shock_slot(Shock::A));
    CHECK_THROWS(b.sys->shock_slot(Shock::G));
}
