#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace twosector {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Forward-mode dual number carrying one directional derivative.
/// Equations are written as generic lambdas; evaluating them with Dual
/// seeded at one argument yields the exact partial derivative.
struct Dual {
    double v = 0.0;  // value
    double d = 0.0;  // derivative along the seeded direction

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
    double inv = 1.0 / b.v;
    double q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
}
inline Dual operator+(double a, Dual b) { return Dual(a) + b; }
inline Dual operator+(Dual a, double b) { return a + Dual(b); }
inline Dual operator-(double a, Dual b) { return Dual(a) - b; }
inline Dual operator-(Dual a, double b) { return a - Dual(b); }
inline Dual operator*(double a, Dual b) { return Dual(a) * b; }
inline Dual operator*(Dual a, double b) { return a * Dual(b); }
inline Dual operator/(double a, Dual b) { return Dual(a) / b; }
inline Dual operator/(Dual a, double b) { return a / Dual(b); }

inline Dual exp(Dual a) { double e = std::exp(a.v); return {e, e * a.d}; }
inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(Dual a) { double s = std::sqrt(a.v); return {s, 0.5 * a.d / s}; }
inline Dual pow(Dual a, double p) {
    double f = std::pow(a.v, p);
    return {f, p * std::pow(a.v, p - 1.0) * a.d};
}
inline Dual pow(Dual a, Dual b) {
    // general a^b with a > 0
    double f = std::pow(a.v, b.v);
    return {f, f * (b.d * std::log(a.v) + b.v * a.d / a.v)};
}
inline Dual pow(double a, Dual b) { return pow(Dual(a), b); }
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

/// Second-order dual carrying two directions and the mixed derivative;
/// evaluating a function with seeds on arguments a and b yields exact
/// f, df/da, df/db and d2f/dadb in one pass.
struct HyperDual {
    double v = 0.0, da = 0.0, db = 0.0, dab = 0.0;
    HyperDual() = default;
    HyperDual(double value) : v(value) {}
    HyperDual(double value, double a, double b, double ab) : v(value), da(a), db(b), dab(ab) {}
};

inline HyperDual operator+(HyperDual x, HyperDual y) {
    return {x.v + y.v, x.da + y.da, x.db + y.db, x.dab + y.dab};
}
inline HyperDual operator-(HyperDual x, HyperDual y) {
    return {x.v - y.v, x.da - y.da, x.db - y.db, x.dab - y.dab};
}
inline HyperDual operator-(HyperDual x) { return {-x.v, -x.da, -x.db, -x.dab}; }
inline HyperDual operator*(HyperDual x, HyperDual y) {
    return {x.v * y.v, x.da * y.v + x.v * y.da, x.db * y.v + x.v * y.db,
            x.dab * y.v + x.da * y.db + x.db * y.da + x.v * y.dab};
}
inline HyperDual inv(HyperDual x) {
    double i = 1.0 / x.v, i2 = i * i, i3 = i2 * i;
    return {i, -x.da * i2, -x.db * i2, -x.dab * i2 + 2.0 * x.da * x.db * i3};
}
inline HyperDual operator/(HyperDual x, HyperDual y) { return x * inv(y); }
inline HyperDual operator+(double a, HyperDual x) { return HyperDual(a) + x; }
inline HyperDual operator+(HyperDual x, double a) { return x + HyperDual(a); }
inline HyperDual operator-(double a, HyperDual x) { return HyperDual(a) - x; }
inline HyperDual operator-(HyperDual x, double a) { return x - HyperDual(a); }
inline HyperDual operator*(double a, HyperDual x) { return HyperDual(a) * x; }
inline HyperDual operator*(HyperDual x, double a) { return x * HyperDual(a); }
inline HyperDual operator/(double a, HyperDual x) { return HyperDual(a) / x; }
inline HyperDual operator/(HyperDual x, double a) { return x / HyperDual(a); }

/// chain rule for f(x): (f', f'') applied to the carried directions
inline HyperDual apply_chain(HyperDual x, double f, double f1, double f2) {
    return {f, f1 * x.da, f1 * x.db, f1 * x.dab + f2 * x.da * x.db};
}
inline HyperDual exp(HyperDual x) {
    double e = std::exp(x.v);
    return apply_chain(x, e, e, e);
}
inline HyperDual log(HyperDual x) {
    return apply_chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
inline HyperDual sqrt(HyperDual x) {
    double s = std::sqrt(x.v);
    return apply_chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline HyperDual pow(HyperDual x, double p) {
    double f = std::pow(x.v, p);
    return apply_chain(x, f, p * std::pow(x.v, p - 1.0), p * (p - 1.0) * std::pow(x.v, p - 2.0));
}
inline HyperDual pow(HyperDual x, HyperDual y) {
    // x^y = exp(y log x), x > 0
    return exp(y * log(x));
}
inline HyperDual pow(double a, HyperDual y) { return pow(HyperDual(a), y); }
inline double value_of(HyperDual x) { return x.v; }

// expose std overloads so generic lambdas compile for plain doubles
using std::exp;
using std::log;
using std::pow;
using std::sqrt;

struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double sq(double x) { return x * x; }

}  // namespace twosector
