#pragma once

#include <cmath>

namespace p53dde {

namespace detail {
// x^k for integer k >= 0 with the convention 0^0 = 1, so the closed forms
// below stay finite at x = 0 whenever their coefficient is nonzero.
inline double powi(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}
} // namespace detail

// Activation nonlinearity f(x) = x^n / (a^n + x^n) on x >= 0 and its first
// three derivatives in closed form. Each derivative is assembled term by
// term with zero coefficients skipped, so the expressions are valid down to
// x = 0 for every n >= 1 (negative powers only ever appear multiplied by a
// vanishing integer coefficient).
inline double hill_value(double x, double a, int n) {
    if (x <= 0.0) return 0.0;
    const double s = detail::powi(x, n);
    const double an = detail::powi(a, n);
    return s / (an + s);
}

inline double hill_d1(double x, double a, int n) {
    const double an = detail::powi(a, n);
    if (x < 0.0) x = 0.0;
    if (x == 0.0 && n > 1) return 0.0;
    const double s = detail::powi(x, n);
    const double D = an + s;
    return n * an * detail::powi(x, n - 1) / (D * D);
}

inline double hill_d2(double x, double a, int n) {
    const double an = detail::powi(a, n);
    if (x < 0.0) x = 0.0;
    if (x == 0.0 && n > 2) return 0.0;
    const double s = detail::powi(x, n);
    const double D = an + s;
    double num = 0.0;
    if (n != 1) num += (n - 1.0) * an * detail::powi(x, n - 2);
    num -= (n + 1.0) * detail::powi(x, 2 * n - 2);
    return n * an * num / (D * D * D);
}

inline double hill_d3(double x, double a, int n) {
    const double an = detail::powi(a, n);
    if (x < 0.0) x = 0.0;
    if (x == 0.0 && n > 3) return 0.0;
    const double s = detail::powi(x, n);
    const double D = an + s;
    double num = 0.0;
    if (n != 1 && n != 2) num += (n - 1.0) * (n - 2.0) * an * an * detail::powi(x, n - 3);
    if (n != 1) num -= 4.0 * (n * n - 1.0) * an * detail::powi(x, 2 * n - 3);
    num += (n + 1.0) * (n + 2.0) * detail::powi(x, 3 * n - 3);
    return n * an * num / (D * D * D * D);
}

// Local Taylor data of f about a point: f(y + u) = value + rho*u
// + rho2*u^2 + rho3*u^3 + O(u^4). rho2 and rho3 are the series
// coefficients (derivatives divided by 2! and 3!).
struct HillTaylor {
    double value;
    double rho;
    double rho2;
    double rho3;
};

inline HillTaylor hill_taylor(double x, double a, int n) {
    return {hill_value(x, a, n), hill_d1(x, a, n), hill_d2(x, a, n) / 2.0,
            hill_d3(x, a, n) / 6.0};
}

} // namespace p53dde
