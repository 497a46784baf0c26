#include <random>

#include "doctest.h"
#include "twosector/loglin.hpp"
#include "twosector/model.hpp"
#include "twosector/simulate.hpp"
#include "twosector/steady.hpp"

using namespace twosector;

namespace {

struct PathOracle {
    Build b;
    FirstOrderSolution fo;
    SteadyState ss;

    explicit PathOracle(Build bb) : b(std::move(bb)) {
        ss = solve_steady_state(b);
        LinearizedSystem lin = linearize(b.sys, ss);
        fo = solve_first_order(lin);
        REQUIRE(fo.ok());
    }

    int ix(const std::string& n) const { return b.sys->registry().index(n); }
};

Build stylized_build(bool durable, double mu, double theta_c, double theta_d) {
    ModelVariant v;
    v.kind = durable ? VariantKind::StylizedDurable : VariantKind::StylizedNondurable;
    ParameterSet p = stylized_baseline();
    p.mu = mu;
    p.theta_c = theta_c;
    p.theta_d = theta_d;
    if (durable) p.delta = 0.010;
    PolicyRuleSpec spec;
    RuleParams rp;
    rp.rho_r = 0.8;
    rp.alpha_pi = 1.5;
    rp.alpha_y = 0.125;
    rp.tau = 0.5;
    return build_model(v, p, spec, rp);
}

}  // namespace

TEST_CASE("coefficient arithmetic") {
    // wage gap identities
    CHECK(relative_wage_gap(1.0, 0.02) == doctest::Approx(0.02));
    CHECK(relative_wage_gap(0.0, 0.5) == 0.0);
    CHECK(relative_wage_gap(10.0, 0.01) == doctest::Approx(0.1));

    // derived recursion weights at eps = 6, theta = 60 (kappa = 1/12):
    // varpi1 = kappa/(1+kappa) = 1/13, varpi2 = 12/13
    LoglinCoefficients c = LoglinCoefficients::from(6.0, 60.0, 1.0, 0.99);
    CHECK(c.varpi1 == doctest::Approx(1.0 / 13.0).epsilon(1e-14));
    CHECK(c.varpi2 == doctest::Approx(12.0 / 13.0).epsilon(1e-14));
    CHECK(c.varpi1 == doctest::Approx(c.varpi2 * (6.0 - 1.0) / 60.0).epsilon(1e-14));
    CHECK(c.durability_weight == 0.0);  // delta = 1

    // user-cost weights
    LoglinCoefficients cd = LoglinCoefficients::from(6.0, 60.0, 0.01, 0.99);
    CHECK(cd.usercost_weight == doctest::Approx(0.0199).epsilon(1e-12));
    // all-zero inputs give zero
    CHECK(relative_price_recursion(c, {}) == 0.0);
    // delta = 1: Qhat = Chat - Dhat exactly
    UserCostInputs ui;
    ui.c_minus_d = 0.4;
    ui.expected_q_next_minus_real = 3.0;
    CHECK(usercost_loglin(c, ui) == doctest::Approx(0.4));
    // durability weight rises as delta falls
    CHECK(LoglinCoefficients::from(6, 60, 0.01, 0.99).durability_weight >
          LoglinCoefficients::from(6, 60, 0.10, 0.99).durability_weight);
}

TEST_CASE("wage-gap identity holds exactly along simulated first-order paths") {
    for (double mu : {0.0, 1.0, 10.0}) {
        PathOracle po(stylized_build(false, mu, 60.0, 60.0));
        std::mt19937_64 rng(17);
        std::normal_distribution<double> nd(0.0, 1.0);
        Vec x = Vec::Zero(po.fo.k());
        Vec u(po.fo.ne());
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            for (int j = 0; j < po.fo.ne(); ++j) u[j] = nd(rng);
            Vec y = po.fo.P * x + po.fo.g_e * u;
            x = po.fo.extract_state(y);
            double lhs = y[po.ix("wC")] - y[po.ix("wD")];
            double rhs = relative_wage_gap(mu, y[po.ix("NC")] - y[po.ix("ND")]);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        CAPTURE(mu);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("relative-price recursion matches the solver to 1e-8") {
    for (double mu : {0.0, 1.0, 10.0}) {
        for (bool durable : {false, true}) {
            PathOracle po(stylized_build(durable, mu, 60.0, 60.0));
            const auto& fo = po.fo;
            LoglinCoefficients c = LoglinCoefficients::from(6.0, 60.0, 1.0, 0.99);
            std::mt19937_64 rng(23);
            std::normal_distribution<double> nd(0.0, 1.0);
            Vec x = Vec::Zero(fo.k());
            Vec u(fo.ne());
            double worst = 0.0;
            int iQ = po.ix("Q"), iPiC = po.ix("PiC"), iPiD = po.ix("PiD");
            for (int t = 0; t < 1000; ++t) {
                double q_lag = x.size() ? 0.0 : 0.0;
                // lagged Q from the state vector
                int qpos = -1;
                for (int j = 0; j < fo.k(); ++j)
                    if (fo.state_idx[j] == iQ) qpos = j;
                REQUIRE(qpos >= 0);
                q_lag = x[qpos];
                for (int j = 0; j < fo.ne(); ++j) u[j] = nd(rng);
                Vec y = fo.P * x + fo.g_e * u;
                Vec xt = fo.extract_state(y);
                Vec ey = fo.P * xt;  // model-consistent conditional expectation
                RelativePriceInputs in;
                in.mu = mu;
                in.hours_gap_d_minus_c = y[po.ix("ND")] - y[po.ix("NC")];
                in.prod_gap_d_minus_c = y[po.ix("eAD")] - y[po.ix("eAC")];
                in.expected_infl_gap = ey[iPiD] - ey[iPiC];
                in.lag_q = q_lag;
                in.beta = 0.99;
                double rhs = relative_price_recursion(c, in);
                worst = std::max(worst, std::abs(y[iQ] - rhs));
                x = xt;
            }
            CAPTURE(mu);
            CAPTURE(durable);
            CHECK(worst <= 1e-8);
        }
    }
}

TEST_CASE("user-cost relations match the durable model to 1e-8") {
    PathOracle po(stylized_build(true, 1.0, 60.0, 60.0));
    const auto& fo = po.fo;
    LoglinCoefficients c = LoglinCoefficients::from(6.0, 60.0, 0.010, 0.99);
    std::mt19937_64 rng(29);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec x = Vec::Zero(fo.k());
    Vec u(fo.ne());
    double worst_q = 0.0, worst_theta = 0.0, worst_mrs = 0.0;
    int iQ = po.ix("Q"), iC = po.ix("C"), iD = po.ix("D"), iRr = po.ix("Rreal"),
        iTh = po.ix("Theta"), ieB = po.ix("eB");
    for (int t = 0; t < 1000; ++t) {
        for (int j = 0; j < fo.ne(); ++j) u[j] = nd(rng);
        Vec y = fo.P * x + fo.g_e * u;
        Vec xt = fo.extract_state(y);
        Vec ey = fo.P * xt;
        // the Euler equation ties E[SDF] to the real rate including the
        // preference-shock drift, so the real-rate term nets it out
        double exp_q_next = ey[iQ];
        double rreal = y[iRr];
        UserCostInputs in;
        in.c_minus_d = y[iC] - y[iD];
        in.expected_q_next_minus_real = exp_q_next - rreal;
        worst_q = std::max(worst_q, std::abs(y[iQ] - usercost_loglin(c, in)));
        double th = usercost_theta(c, y[iQ], rreal - exp_q_next);
        worst_theta = std::max(worst_theta, std::abs(y[iTh] - th));
        // marginal-rate identity Dhat = Chat - Thetahat
        worst_mrs = std::max(worst_mrs, std::abs(y[iD] - (y[iC] - y[iTh])));
        x = xt;
        (void)ieB;
    }
    CHECK(worst_q <= 1e-8);
    CHECK(worst_theta <= 1e-8);
    CHECK(worst_mrs <= 1e-8);
}
