#pragma once
#include "common.hpp"

namespace twosector {

/// Closed-form log-linear coefficients of the stylized model's relative-price
/// block. kappa is the Phillips-curve slope (eps-1)/theta; the relative-price
/// recursion weights follow as kappa/(1+kappa) and 1/(1+kappa).
struct LoglinCoefficients {
    double varpi1 = 0.0;
    double varpi2 = 0.0;
    double usercost_weight = 0.0;    // 1 - (1-delta) beta
    double durability_weight = 0.0;  // (1-delta) beta

    static LoglinCoefficients from(double eps, double theta, double delta, double beta) {
        LoglinCoefficients c;
        double kappa = (eps - 1.0) / theta;
        c.varpi1 = kappa / (1.0 + kappa);   // = (eps-1)/(theta+eps-1)
        c.varpi2 = 1.0 / (1.0 + kappa);     // = theta/(theta+eps-1)
        c.durability_weight = (1.0 - delta) * beta;
        c.usercost_weight = 1.0 - c.durability_weight;
        return c;
    }

    double kappa() const { return varpi1 / varpi2; }
};

/// w^C - w^D gap implied by an hours gap under mobility mu = 1/lambda.
inline double relative_wage_gap(double mu, double hours_gap) {
    if (mu < 0.0) throw ConfigError("mu must be nonnegative");
    return mu * hours_gap;
}

struct RelativePriceInputs {
    double mu = 0.0;
    double hours_gap_d_minus_c = 0.0;  // Nhat^D - Nhat^C
    double prod_gap_d_minus_c = 0.0;   // ehat^{A,D} - ehat^{A,C}
    double expected_infl_gap = 0.0;    // E[Pihat^D' - Pihat^C']
    double lag_q = 0.0;                // Qhat_{t-1}
    double beta = 0.99;
};

/// Relative-price recursion (equal sectoral stickiness and elasticity):
/// Qhat = varpi1 mu (Nd-Nc) - varpi1 (eAD-eAC) + varpi2 beta E[dPi'] + varpi2 Qlag.
inline double relative_price_recursion(const LoglinCoefficients& c,
                                       const RelativePriceInputs& in) {
    return c.varpi1 * in.mu * in.hours_gap_d_minus_c - c.varpi1 * in.prod_gap_d_minus_c +
           c.varpi2 * in.beta * in.expected_infl_gap + c.varpi2 * in.lag_q;
}

struct UserCostInputs {
    double c_minus_d = 0.0;              // Chat - Dhat
    double expected_q_next_minus_real = 0.0;  // E[Qhat'] - Rhat_real
};

/// Durables asset-price relation: Qhat loads on the marginal rate of
/// substitution with weight 1-(1-delta)beta and on the expected capital gain
/// net of the real rate with weight (1-delta)beta.
inline double usercost_loglin(const LoglinCoefficients& c, const UserCostInputs& in) {
    return c.usercost_weight * in.c_minus_d +
           c.durability_weight * in.expected_q_next_minus_real;
}

/// User cost Thetahat = (Qhat + (1-delta)beta E[Rhat_real - Qhat'])/(1-(1-delta)beta).
inline double usercost_theta(const LoglinCoefficients& c, double q_hat,
                             double expected_real_minus_q_next) {
    return (q_hat + c.durability_weight * expected_real_minus_q_next) / c.usercost_weight;
}

}  // namespace twosector
