#pragma once
#include <string>
#include <vector>

#include "common.hpp"

namespace twosector {

/// Interest-rate rule families. SmetsWouters is the baseline gap rule;
/// Implementable replaces gaps with steady-state deviations; the remaining
/// three add a wage feedback term.
enum class RuleFamily {
    SmetsWouters,
    Implementable,
    WageInflation,
    RealWageGrowth,
    WageGrowthDifferential,
};

inline const char* rule_family_name(RuleFamily f) {
    switch (f) {
        case RuleFamily::SmetsWouters: return "smets-wouters";
        case RuleFamily::Implementable: return "implementable";
        case RuleFamily::WageInflation: return "wage-inflation";
        case RuleFamily::RealWageGrowth: return "real-wage-growth";
        case RuleFamily::WageGrowthDifferential: return "wage-growth-differential";
    }
    return "?";
}

inline RuleFamily rule_family_from_name(const std::string& s) {
    for (RuleFamily f : {RuleFamily::SmetsWouters, RuleFamily::Implementable,
                         RuleFamily::WageInflation, RuleFamily::RealWageGrowth,
                         RuleFamily::WageGrowthDifferential})
        if (s == rule_family_name(f)) return f;
    throw ConfigError("unknown rule family: " + s);
}

struct RuleParams {
    double rho_r = 0.0;
    double alpha_pi = 0.0;
    double alpha_y = 0.0;
    double alpha_dy = 0.0;
    double alpha_w = 0.0;
    double tau = 0.5;
};

/// A rule family plus the search box for its active parameters.
struct PolicyRuleSpec {
    RuleFamily family = RuleFamily::SmetsWouters;

    bool uses_dy() const { return family != RuleFamily::Implementable; }
    bool uses_wage_term() const {
        return family == RuleFamily::WageInflation || family == RuleFamily::RealWageGrowth ||
               family == RuleFamily::WageGrowthDifferential;
    }
    bool needs_flex_block() const { return family != RuleFamily::Implementable; }

    /// Active parameter names in optimizer order.
    std::vector<std::string> active() const {
        std::vector<std::string> v{"rho_r", "alpha_pi", "alpha_y"};
        if (uses_dy()) v.push_back("alpha_dy");
        if (uses_wage_term()) v.push_back("alpha_w");
        v.push_back("tau");
        return v;
    }
    int dim() const { return static_cast<int>(active().size()); }

    // Supports: rho_r in [0,1], feedback coefficients in [0,5], tau in [0,1].
    void bounds(std::vector<double>& lo, std::vector<double>& hi) const {
        lo.clear();
        hi.clear();
        for (const auto& nm : active()) {
            if (nm == "rho_r" || nm == "tau") {
                lo.push_back(0.0);
                hi.push_back(1.0);
            } else {
                lo.push_back(0.0);
                hi.push_back(5.0);
            }
        }
    }

    std::vector<double> pack(const RuleParams& r) const {
        std::vector<double> x;
        for (const auto& nm : active()) {
            if (nm == "rho_r") x.push_back(r.rho_r);
            else if (nm == "alpha_pi") x.push_back(r.alpha_pi);
            else if (nm == "alpha_y") x.push_back(r.alpha_y);
            else if (nm == "alpha_dy") x.push_back(r.alpha_dy);
            else if (nm == "alpha_w") x.push_back(r.alpha_w);
            else x.push_back(r.tau);
        }
        return x;
    }
    RuleParams unpack(const std::vector<double>& x) const {
        RuleParams r;
        auto names = active();
        for (size_t k = 0; k < names.size(); ++k) {
            if (names[k] == "rho_r") r.rho_r = x[k];
            else if (names[k] == "alpha_pi") r.alpha_pi = x[k];
            else if (names[k] == "alpha_y") r.alpha_y = x[k];
            else if (names[k] == "alpha_dy") r.alpha_dy = x[k];
            else if (names[k] == "alpha_w") r.alpha_w = x[k];
            else r.tau = x[k];
        }
        return r;
    }

    void validate(const RuleParams& r, double mu) const {
        if (family == RuleFamily::WageGrowthDifferential && mu == 0.0)
            throw ConfigError(
                "wage-growth-differential rule is degenerate under perfect mobility (mu = 0)");
        if (r.rho_r < 0 || r.rho_r > 1 || r.tau < 0 || r.tau > 1 || r.alpha_pi < 0 ||
            r.alpha_pi > 5 || r.alpha_y < 0 || r.alpha_y > 5 || r.alpha_dy < 0 ||
            r.alpha_dy > 5 || r.alpha_w < 0 || r.alpha_w > 5)
            throw ConfigError("rule parameters outside the admissible box");
    }
};

}  // namespace twosector
