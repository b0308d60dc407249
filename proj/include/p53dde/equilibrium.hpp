#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "p53dde/errors.hpp"
#include "p53dde/hill.hpp"
#include "p53dde/params.hpp"

namespace p53dde {

struct State4 {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
};

// Steady-state residuals of the four model equations. Delayed arguments
// reduce to the state itself at a constant solution, so no kernel is needed.
inline void equilibrium_residual(const Params& p, const State4& s, double out[4]) {
    out[0] = p.a1 - p.a2 * s.x1;
    out[1] = p.b1 * s.x1 - p.b2 * s.y1 - p.b12 * s.y1 * s.y2;
    out[2] = hill_value(s.y1, p.a, p.n) - p.c2 * s.x2;
    out[3] = s.x2 - p.d2 * s.y2;
}

inline double equilibrium_residual_max(const Params& p, const State4& s) {
    double r[4];
    equilibrium_residual(p, s, r);
    return std::max(std::max(std::abs(r[0]), std::abs(r[1])),
                    std::max(std::abs(r[2]), std::abs(r[3])));
}

struct EquilibriumSet {
    std::vector<State4> roots; // ascending y1
    std::size_t principal = 0; // smallest y1
};

// All componentwise-positive equilibria.
//
// Reduction: x1* = a1/a2; x2* = f(y1*)/c2 and y2* = x2*/d2 follow from the
// last two equations, leaving the scalar condition
//     H(y) = b1*x1* - b2*y - (b12/(c2*d2)) * y * f(y) = 0
// on (0, a1*b1/(a2*b2)]: H(0+) = b1*x1* > 0 and H is strictly decreasing, so
// the interval brackets every admissible root. A 1024-subinterval
// sign-change scan locates candidates, bisection brackets each, and a
// Newton polish finishes to machine precision. All roots are returned
// (smallest first, designated principal) rather than assuming uniqueness.
inline EquilibriumSet solve_equilibria(const Params& p) {
    p.validate();
    const double x1 = p.a1 / p.a2;
    const double ymax = p.a1 * p.b1 / (p.a2 * p.b2);
    if (!(ymax > 0.0))
        throw NoEquilibriumError(
            "no positive equilibrium: a1 = 0 forces x1 -> 0 and leaves no "
            "positive y1 root");

    auto H = [&](double y) {
        return p.b1 * x1 - p.b2 * y -
               p.b12 / (p.c2 * p.d2) * y * hill_value(y, p.a, p.n);
    };
    auto dH = [&](double y) {
        return -p.b2 - p.b12 / (p.c2 * p.d2) *
                           (hill_value(y, p.a, p.n) + y * hill_d1(y, p.a, p.n));
    };
    const double hscale = p.b1 * x1;

    auto polish = [&](double y, double lo, double hi) {
        for (int i = 0; i < 60; ++i) {
            const double step = H(y) / dH(y);
            const double ynew = y - step;
            if (!(ynew >= lo && ynew <= hi)) break;
            y = ynew;
            if (std::abs(step) < 1e-17 * std::max(y, 1e-300)) break;
        }
        return y;
    };

    const int kScanSubintervals = 1024;
    std::vector<double> ys;
    double yprev = 0.0, hprev = hscale; // H(0+) limit
    for (int k = 1; k <= kScanSubintervals; ++k) {
        const double y = ymax * k / kScanSubintervals;
        const double h = H(y);
        if (std::abs(h) <= 4e-15 * hscale) {
            ys.push_back(polish(y, yprev, std::min(ymax, y + ymax / kScanSubintervals)));
        } else if (hprev > 0.0 && h < 0.0) {
            double lo = yprev, hi = y;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (H(mid) > 0.0 ? lo : hi) = mid;
            }
            ys.push_back(polish(0.5 * (lo + hi), lo, hi));
        }
        yprev = y;
        hprev = h;
    }

    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(),
                         [&](double a, double b) { return b - a < 1e-9 * ymax; }),
             ys.end());

    EquilibriumSet set;
    for (double y : ys) {
        if (!(y > 0.0)) continue;
        State4 s;
        s.x1 = x1;
        s.y1 = y;
        s.x2 = hill_value(y, p.a, p.n) / p.c2;
        s.y2 = s.x2 / p.d2;
        if (!(s.x2 > 0.0 && s.y2 > 0.0)) continue;
        const double res = equilibrium_residual_max(p, s);
        if (!(res < 1e-9 * (1.0 + hscale)))
            throw InconsistencyError("equilibrium residual " + std::to_string(res) +
                                     " exceeds budget");
        set.roots.push_back(s);
    }
    if (set.roots.empty())
        throw NoEquilibriumError("no positive equilibrium for these parameters");
    set.principal = 0;
    return set;
}

inline State4 solve_equilibrium(const Params& p, std::size_t root_index = 0) {
    const EquilibriumSet set = solve_equilibria(p);
    if (root_index >= set.roots.size())
        throw ConfigError("root-index " + std::to_string(root_index) +
                          " out of range: " + std::to_string(set.roots.size()) +
                          " equilibrium root(s) exist");
    return set.roots[root_index];
}

} // namespace p53dde
