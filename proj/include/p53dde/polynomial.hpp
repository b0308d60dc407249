#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "p53dde/errors.hpp"

namespace p53dde {

using cplx = std::complex<double>;

// Dense real polynomial, coefficients ascending: c[0] + c[1] x + ...
using Poly = std::vector<double>;

inline double poly_eval(const Poly& c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

inline cplx poly_eval(const Poly& c, cplx x) {
    cplx r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

inline Poly poly_derivative(const Poly& c) {
    Poly d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
    return d;
}

// All complex roots by the Durand-Kerner simultaneous iteration.
// Intended for the low-degree characteristic polynomials here (degree <= 8);
// inputs are expected to have a well-scaled nonzero leading coefficient.
inline std::vector<cplx> all_roots(const Poly& coeffs) {
    Poly c = coeffs;
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    const std::size_t n = c.size() - 1;
    if (n == 0) return {};
    std::vector<cplx> monic(n);
    for (std::size_t i = 0; i < n; ++i) monic[i] = c[i] / c[n];

    auto peval = [&](cplx x) {
        cplx r = 1.0;
        for (std::size_t i = n; i-- > 0;) r = r * x + monic[i];
        return r;
    };
    // Backward-error scale of the evaluation at x. A residual at or below
    // eps times this is indistinguishable from an exact root; multiple-root
    // clusters stall at that floor without the steps ever reaching 1e-15.
    auto pscale = [&](cplx x) {
        const double ax = std::abs(x);
        double s = 1.0;
        for (std::size_t i = n; i-- > 0;) s = s * ax + std::abs(monic[i]);
        return s;
    };
    const double floor_tol =
        4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();

    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(monic[i]));
    bound += 1.0;

    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<cplx> z(n);
        const double theta0 = 0.43 + attempt;
        for (std::size_t k = 0; k < n; ++k) {
            const double th = theta0 + 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
            z[k] = bound * cplx(std::cos(th), std::sin(th));
        }
        bool converged = false;
        for (int it = 0; it < 2000 && !converged; ++it) {
            double moved = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                cplx denom = 1.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != k) denom *= z[k] - z[j];
                if (denom == cplx(0.0)) { denom = 1e-300; }
                const cplx step = peval(z[k]) / denom;
                z[k] -= step;
                moved = std::max(moved, std::abs(step) / (1.0 + std::abs(z[k])));
            }
            converged = moved < 1e-15;
            if (!converged) {
                converged = true;
                for (std::size_t k = 0; k < n && converged; ++k)
                    converged = std::abs(peval(z[k])) <= floor_tol * pscale(z[k]);
            }
        }
        if (converged) return z;
    }
    throw InconsistencyError("polynomial root iteration did not converge");
}

struct RealRoot {
    double x;
    bool simple; // false when the derivative also vanishes (multiple root)
};

namespace detail {

inline double bisect_root(const Poly& c, double lo, double hi, double flo) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = poly_eval(c, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Recursive isolation: between consecutive stationary points the polynomial
// is monotone, so every real root is found by sign change (or lands exactly
// on a stationary point, the multiple-root case).
inline void real_roots_rec(const Poly& c, double lo, double hi, std::vector<double>& out) {
    Poly t = c;
    while (t.size() > 1 && t.back() == 0.0) t.pop_back();
    const std::size_t deg = t.size() - 1;
    if (deg == 0) return;
    if (deg == 1) {
        const double x = -t[0] / t[1];
        if (x >= lo && x <= hi) out.push_back(x);
        return;
    }
    std::vector<double> crit;
    real_roots_rec(poly_derivative(t), lo, hi, crit);
    std::sort(crit.begin(), crit.end());
    std::vector<double> nodes;
    nodes.push_back(lo);
    for (double x : crit)
        if (x > nodes.back()) nodes.push_back(x);
    if (hi > nodes.back()) nodes.push_back(hi);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double u = nodes[i], v = nodes[i + 1];
        const double fu = poly_eval(t, u), fv = poly_eval(t, v);
        if (fu == 0.0) out.push_back(u);
        if ((fu < 0.0 && fv > 0.0) || (fu > 0.0 && fv < 0.0))
            out.push_back(bisect_root(t, u, v, fu));
    }
    const double fend = poly_eval(t, nodes.back());
    if (fend == 0.0) out.push_back(nodes.back());
}

} // namespace detail

namespace detail {
// Magnitude bound sum |c_i| |x|^i, the natural scale for "p(x) is zero up to
// cancellation" tests.
inline double eval_scale(const Poly& c, double x) {
    double s = 0.0, p = 1.0;
    for (double v : c) {
        s += std::abs(v) * p;
        p *= std::abs(x);
    }
    return s;
}
} // namespace detail

// Real roots in [lo, hi], deduplicated, ascending, flagged for simplicity.
// Sign-change isolation alone misses even-multiplicity (tangent) roots, so
// stationary points where p nearly vanishes are reported too, as non-simple.
inline std::vector<RealRoot> real_roots_in(const Poly& c, double lo, double hi) {
    std::vector<double> raw;
    detail::real_roots_rec(c, lo, hi, raw);
    const Poly d = poly_derivative(c);
    std::vector<double> crit;
    detail::real_roots_rec(d, lo, hi, crit);
    std::vector<RealRoot> merged;
    for (double x : raw) {
        const bool simple =
            std::abs(poly_eval(d, x)) > 1e-8 * (1.0 + detail::eval_scale(d, x));
        merged.push_back({x, simple});
    }
    for (double x : crit)
        if (std::abs(poly_eval(c, x)) <= 1e-9 * (1.0 + detail::eval_scale(c, x)))
            merged.push_back({x, false});
    std::sort(merged.begin(), merged.end(),
              [](const RealRoot& a, const RealRoot& b) { return a.x < b.x; });
    std::vector<RealRoot> out;
    for (const RealRoot& r : merged) {
        if (!out.empty() && std::abs(r.x - out.back().x) < 1e-10 * (1.0 + std::abs(r.x))) {
            out.back().simple = out.back().simple && r.simple;
            continue;
        }
        out.push_back(r);
    }
    return out;
}

// Cauchy bound on root magnitudes (monic normalization).
inline double root_bound(const Poly& c) {
    const double lead = c.back();
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, std::abs(c[i] / lead));
    return 1.0 + m;
}

} // namespace p53dde
