#pragma once
#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "params.hpp"
#include "registry.hpp"

namespace twosector {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Evaluation window passed to equations. Accessors return variable LEVELS;
/// the solver works in transformed coordinates (logs for positive variables)
/// and the transform is applied before equations run.
template <typename T>
struct Ctx {
    const T* prev_p;
    const T* now_p;
    const T* next_p;
    const T* eps_p;

    T prev(int i) const { return prev_p[i]; }
    T now(int i) const { return now_p[i]; }
    T next(int i) const { return next_p[i]; }
    T eps(int j) const { return eps_p[j]; }
    T one() const { return T(1.0); }
    T zero() const { return T(0.0); }
};

struct Equation {
    std::string name;
    std::function<double(const Ctx<double>&)> fd;
    std::function<Dual(const Ctx<Dual>&)> fdual;
    bool rule_dependent = false;  // captures policy-rule parameters
};

/// Argument indexing for derivatives: a in [0, 3n+ne) with blocks
/// [prev | now | next | eps].
struct ArgId {
    static int prev(int i, int /*n*/) { return i; }
    static int now(int i, int n) { return n + i; }
    static int next(int i, int n) { return 2 * n + i; }
    static int eps(int j, int n) { return 3 * n + j; }
};

/// Sparse per-equation Hessian entry over the stacked argument vector (a <= b).
struct HessEntry {
    int a, b;
    double v;
};

class ResidualSystem;
using SystemPtr = std::shared_ptr<const ResidualSystem>;

/// The model as a vector function f(y_prev, y_now, y_next, innovations) = 0.
/// Immutable after construction; evaluators are pure, so instances are safe
/// to share across threads. Simulation systems are square; the Ramsey
/// constraint set has one equation fewer than variables.
class ResidualSystem {
public:
    ResidualSystem(ModelVariant variant, ParameterSet params, VariableRegistry registry,
                   std::vector<Shock> shock_order, std::vector<Equation> equations,
                   bool require_square = true)
        : variant_(variant),
          params_(std::move(params)),
          registry_(std::move(registry)),
          shock_order_(std::move(shock_order)),
          equations_(std::move(equations)) {
        if (require_square && m() != n())
            throw ConfigError("equation count (" + std::to_string(m()) +
                              ") does not match variable count (" + std::to_string(n()) + ")");
    }

    int n() const { return registry_.size(); }
    int m() const { return static_cast<int>(equations_.size()); }
    int ne() const { return static_cast<int>(shock_order_.size()); }
    int n_args() const { return 3 * n() + ne(); }
    const ModelVariant& variant() const { return variant_; }
    const ParameterSet& params() const { return params_; }
    const VariableRegistry& registry() const { return registry_; }
    const std::vector<Shock>& shock_order() const { return shock_order_; }
    const std::vector<Equation>& equations() const { return equations_; }
    const std::string& eq_name(int i) const { return equations_[i].name; }

    int eq_index(const std::string& name) const {
        for (int i = 0; i < m(); ++i)
            if (equations_[i].name == name) return i;
        throw ConfigError("unknown equation: " + name);
    }

    int shock_slot(Shock s) const {
        for (int j = 0; j < ne(); ++j)
            if (shock_order_[j] == s) return j;
        throw ConfigError(std::string("unknown shock: ") + shock_name(s));
    }

    /// Count of equations referencing next-dated variables.
    int expectational_count() const {
        ensure_deps();
        int n_ = n(), cnt = 0;
        for (const auto& deps : deps_) {
            bool fwd = false;
            for (int a : deps)
                if (a >= 2 * n_ && a < 3 * n_) fwd = true;
            cnt += fwd ? 1 : 0;
        }
        return cnt;
    }

    // --- evaluation ------------------------------------------------------

    /// Residuals at LEVEL points (test convenience).
    Vec eval_levels(const Vec& prev, const Vec& now, const Vec& next, const Vec& eps) const {
        Ctx<double> c{prev.data(), now.data(), next.data(), eps.data()};
        Vec out(m());
        for (int i = 0; i < m(); ++i) out[i] = equations_[i].fd(c);
        return out;
    }

    /// Residuals in transformed coordinates (logs for Log-scale variables).
    Vec eval(const Vec& zprev, const Vec& znow, const Vec& znext, const Vec& eps) const {
        Vec lp = to_levels(zprev), ln = to_levels(znow), lx = to_levels(znext);
        return eval_levels(lp, ln, lx, eps);
    }

    /// Steady-state residual: all three windows at z, zero innovations.
    Vec eval_steady(const Vec& z) const {
        Vec lv = to_levels(z);
        Vec eps = Vec::Zero(ne());
        return eval_levels(lv, lv, lv, eps);
    }

    Vec to_levels(const Vec& z) const {
        Vec out(n());
        for (int i = 0; i < n(); ++i)
            out[i] = registry_.scale(i) == VarScale::Log ? std::exp(z[i]) : z[i];
        return out;
    }
    Vec to_transformed(const Vec& levels) const {
        Vec out(n());
        for (int i = 0; i < n(); ++i)
            out[i] = registry_.scale(i) == VarScale::Log ? std::log(levels[i]) : levels[i];
        return out;
    }

    /// Derivative of the residual vector w.r.t. one stacked argument, all
    /// three windows at the same transformed point z.
    Vec dual_column(const Vec& z, int arg) const { return dual_column_at(z, z, z, zero_eps(), arg); }

    /// Same at distinct prev/now/next transformed points (used by the Ramsey
    /// machinery which differentiates constraints away from steady state).
    Vec dual_column_at(const Vec& zp, const Vec& zn, const Vec& zx, const Vec& eps,
                       int arg) const {
        std::vector<Dual> lp, ln, lx, ep;
        prepare(zp, zn, zx, eps, arg, lp, ln, lx, ep);
        Ctx<Dual> c{lp.data(), ln.data(), lx.data(), ep.data()};
        Vec out(m());
        for (int i = 0; i < m(); ++i) out[i] = equations_[i].fdual(c).d;
        return out;
    }

    double eval_one(int eq, const Vec& zp, const Vec& zn, const Vec& zx, const Vec& eps) const {
        Vec lp = to_levels(zp), ln = to_levels(zn), lx = to_levels(zx);
        Ctx<double> c{lp.data(), ln.data(), lx.data(), eps.data()};
        return equations_[eq].fd(c);
    }

    double dual_one_at(int eq, const Vec& zp, const Vec& zn, const Vec& zx, const Vec& eps,
                       int arg) const {
        std::vector<Dual> lp, ln, lx, ep;
        prepare(zp, zn, zx, eps, arg, lp, ln, lx, ep);
        Ctx<Dual> c{lp.data(), ln.data(), lx.data(), ep.data()};
        return equations_[eq].fdual(c).d;
    }

    /// Structural dependency sets via NaN probing (exact for branch-free
    /// arithmetic, which all equations here are).
    const std::vector<std::vector<int>>& dependencies() const {
        ensure_deps();
        return deps_;
    }
    /// Reuse dependency sets from a structurally identical system.
    void set_dependency_hint(std::vector<std::vector<int>> deps) const { deps_ = std::move(deps); }

private:
    Vec zero_eps() const { return Vec::Zero(ne()); }

    void prepare(const Vec& zp, const Vec& zn, const Vec& zx, const Vec& eps, int arg,
                 std::vector<Dual>& lp, std::vector<Dual>& ln, std::vector<Dual>& lx,
                 std::vector<Dual>& ep) const {
        int n_ = n();
        lp.resize(n_);
        ln.resize(n_);
        lx.resize(n_);
        ep.resize(ne());
        fill_block(zp, 0, arg, lp);
        fill_block(zn, 1, arg, ln);
        fill_block(zx, 2, arg, lx);
        for (int j = 0; j < ne(); ++j)
            ep[j] = Dual(eps[j], arg == ArgId::eps(j, n_) ? 1.0 : 0.0);
    }

    void fill_block(const Vec& z, int block, int arg, std::vector<Dual>& out) const {
        int n_ = n();
        for (int i = 0; i < n_; ++i) {
            Dual zi(z[i], arg == block * n_ + i ? 1.0 : 0.0);
            out[i] = registry_.scale(i) == VarScale::Log ? exp(zi) : zi;
        }
    }

    void ensure_deps() const {
        if (!deps_.empty()) return;
        int n_ = n(), na = n_args();
        deps_.assign(m(), {});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        Vec base = Vec::Constant(n_, 0.7);  // benign positive levels
        for (int i = 0; i < n_; ++i)
            if (registry_.scale(i) == VarScale::Level) base[i] = 0.3;
        Vec epsz = Vec::Zero(ne());
        for (int a = 0; a < na; ++a) {
            Vec p = base, c = base, x = base, e = epsz;
            if (a < n_) p[a] = nan;
            else if (a < 2 * n_) c[a - n_] = nan;
            else if (a < 3 * n_) x[a - 2 * n_] = nan;
            else e[a - 3 * n_] = nan;
            Ctx<double> ctx{p.data(), c.data(), x.data(), e.data()};
            for (int i = 0; i < m(); ++i)
                if (std::isnan(equations_[i].fd(ctx))) deps_[i].push_back(a);
        }
    }

    ModelVariant variant_;
    ParameterSet params_;
    VariableRegistry registry_;
    std::vector<Shock> shock_order_;
    std::vector<Equation> equations_;
    mutable std::vector<std::vector<int>> deps_;
};

/// First and second derivatives of a residual system at a steady state,
/// stacked-argument layout [prev | now | next | eps].
struct Derivatives {
    Mat j_prev, j_now, j_next, j_eps;
    std::vector<std::vector<HessEntry>> hess;  // per equation, a <= b

    static Derivatives compute(const ResidualSystem& sys, const Vec& z_ss,
                               bool with_hessian = true) {
        Derivatives d;
        int n = sys.n(), m = sys.m(), ne = sys.ne();
        d.j_prev = Mat::Zero(m, n);
        d.j_now = Mat::Zero(m, n);
        d.j_next = Mat::Zero(m, n);
        d.j_eps = Mat::Zero(m, ne);
        // sweep only args some equation depends on
        std::vector<char> used(sys.n_args(), 0);
        for (const auto& deps : sys.dependencies())
            for (int a : deps) used[a] = 1;
        for (int a = 0; a < sys.n_args(); ++a) {
            if (!used[a]) continue;
            Vec col = sys.dual_column(z_ss, a);
            if (a < n) d.j_prev.col(a) = col;
            else if (a < 2 * n) d.j_now.col(a - n) = col;
            else if (a < 3 * n) d.j_next.col(a - 2 * n) = col;
            else d.j_eps.col(a - 3 * n) = col;
        }
        if (with_hessian) d.compute_hessian(sys, z_ss);
        return d;
    }

    /// Recompute the rows belonging to rule-dependent equations only
    /// (everything else is invariant to policy-rule coefficients).
    void refresh_rule_rows(const ResidualSystem& sys, const Vec& z_ss) {
        int n = sys.n();
        std::vector<int> rows;
        for (int i = 0; i < sys.m(); ++i)
            if (sys.equations()[i].rule_dependent) rows.push_back(i);
        if (rows.empty()) return;
        std::vector<char> arg_used(sys.n_args(), 0);
        for (int i : rows)
            for (int a : sys.dependencies()[i]) arg_used[a] = 1;
        for (int a = 0; a < sys.n_args(); ++a) {
            if (!arg_used[a]) continue;
            Vec col = sys.dual_column(z_ss, a);
            for (int i : rows) {
                if (a < n) j_prev(i, a) = col[i];
                else if (a < 2 * n) j_now(i, a - n) = col[i];
                else if (a < 3 * n) j_next(i, a - 2 * n) = col[i];
                else j_eps(i, a - 3 * n) = col[i];
            }
        }
        hessian_rows(sys, z_ss, rows);
    }

    void compute_hessian(const ResidualSystem& sys, const Vec& z_ss) {
        hess.assign(sys.m(), {});
        std::vector<int> all(sys.m());
        for (int i = 0; i < sys.m(); ++i) all[i] = i;
        hessian_rows(sys, z_ss, all);
    }

private:
    /// H[i](a,b) by central differences of dual gradients: exact first
    /// derivatives differenced once, so noise stays near machine precision.
    void hessian_rows(const ResidualSystem& sys, const Vec& z_ss, const std::vector<int>& rows) {
        int n = sys.n(), ne = sys.ne();
        const auto& deps = sys.dependencies();
        std::vector<char> arg_used(sys.n_args(), 0);
        std::vector<char> in_rows(sys.m(), 0);
        for (int i : rows) {
            in_rows[i] = 1;
            hess[i].clear();
            for (int a : deps[i]) arg_used[a] = 1;
        }
        const double h = 1e-5;
        for (int b = 0; b < sys.n_args(); ++b) {
            if (!arg_used[b]) continue;
            auto shifted = [&](double s) {
                Vec zp = z_ss, zn = z_ss, zx = z_ss;
                Vec ep = Vec::Zero(ne);
                if (b < n) zp[b] += s;
                else if (b < 2 * n) zn[b - n] += s;
                else if (b < 3 * n) zx[b - 2 * n] += s;
                else ep[b - 3 * n] += s;
                return std::make_tuple(zp, zn, zx, ep);
            };
            auto [zp_p, zn_p, zx_p, ep_p] = shifted(h);
            auto [zp_m, zn_m, zx_m, ep_m] = shifted(-h);
            for (int i : rows) {
                bool b_in = false;
                for (int a : deps[i])
                    if (a == b) b_in = true;
                if (!b_in) continue;
                for (int a : deps[i]) {
                    if (a > b) continue;
                    double gp = sys.dual_one_at(i, zp_p, zn_p, zx_p, ep_p, a);
                    double gm = sys.dual_one_at(i, zp_m, zn_m, zx_m, ep_m, a);
                    double v = (gp - gm) / (2.0 * h);
                    if (std::abs(v) > 1e-11) hess[i].push_back({a, b, v});
                }
            }
        }
    }
};

}  // namespace twosector
