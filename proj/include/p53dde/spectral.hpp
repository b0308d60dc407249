#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "p53dde/errors.hpp"
#include "p53dde/kernel.hpp"
#include "p53dde/linearization.hpp"
#include "p53dde/polynomial.hpp"

namespace p53dde {

// The characteristic function of the linearization factors as
// (lambda + a2) * Delta1(lambda); the x1 factor is stable and constant, so
// all stability questions reduce to the zeros of Delta1:
//   discrete: Delta1 = P(lambda) + r e^{-lambda*tau},       tau = tau1+tau2
//   weak:     Delta1 = (lambda+q2) P(lambda) + r q2 e^{-lambda*tau1}
// with P(lambda) = lambda^3 + p2 lambda^2 + p1 lambda + p0.

inline cplx cubic_P(const LinearizationCoeffs& c, cplx lam) {
    return ((lam + c.p2) * lam + c.p1) * lam + c.p0;
}

inline cplx cubic_P_d1(const LinearizationCoeffs& c, cplx lam) {
    return (3.0 * lam + 2.0 * c.p2) * lam + c.p1;
}

inline cplx char_delta1(const LinearizationCoeffs& c, const KernelSpec& k, cplx lam) {
    if (k.kind == KernelKind::Discrete)
        return cubic_P(c, lam) + c.r * std::exp(-lam * k.effective_delay());
    return (lam + k.q2) * cubic_P(c, lam) + c.r * k.q2 * std::exp(-lam * k.tau1);
}

inline cplx char_delta1_dlambda(const LinearizationCoeffs& c, const KernelSpec& k, cplx lam) {
    if (k.kind == KernelKind::Discrete) {
        const double tau = k.effective_delay();
        return cubic_P_d1(c, lam) - c.r * tau * std::exp(-lam * tau);
    }
    return cubic_P(c, lam) + (lam + k.q2) * cubic_P_d1(c, lam) -
           c.r * k.q2 * k.tau1 * std::exp(-lam * k.tau1);
}

// Magnitude scale of Delta1's terms at lambda, for relative residual tests.
inline double char_delta1_scale(const LinearizationCoeffs& c, const KernelSpec& k, cplx lam) {
    const double m = std::abs(lam);
    const double P = ((m + std::abs(c.p2)) * m + std::abs(c.p1)) * m + std::abs(c.p0);
    const double e = std::exp(-lam.real() * (k.kind == KernelKind::Discrete
                                                 ? k.effective_delay()
                                                 : k.tau1));
    if (k.kind == KernelKind::Discrete) return P + c.r * e;
    return (m + k.q2) * P + c.r * k.q2 * e;
}

// d lambda / d tau by implicit differentiation of Delta1(lambda(tau), tau)=0,
// valid at any root (tau is the effective delay for discrete kernels, tau1
// for the weak kernel).
inline cplx dlambda_dtau(const LinearizationCoeffs& c, const KernelSpec& k, cplx lam) {
    if (k.kind == KernelKind::Discrete) {
        const double tau = k.effective_delay();
        const cplx e = std::exp(-lam * tau);
        return c.r * lam * e / (cubic_P_d1(c, lam) - c.r * tau * e);
    }
    const cplx e = std::exp(-lam * k.tau1);
    return c.r * k.q2 * lam * e /
           (cubic_P(c, lam) + (lam + k.q2) * cubic_P_d1(c, lam) - c.r * k.q2 * k.tau1 * e);
}

// ---------------------------------------------------------------------------
// Zero-delay stability (Routh-Hurwitz)

struct ZeroDelayStability {
    bool stable;
    // Discrete: {p1*p2 - (p0+r)}. Weak: {D2, D3} for the quartic
    // lambda^4 + (p2+q2) lambda^3 + (p1+q2 p2) lambda^2 + (p0+q2 p1) lambda
    // + q2 (p0+r). Positive coefficients are guaranteed by positive
    // parameters, so these margins alone decide stability.
    std::vector<double> margins;
    double max_re_root; // explicit cross-check from the polynomial roots
};

inline Poly zero_delay_poly(const LinearizationCoeffs& c, const KernelSpec& k) {
    if (k.kind == KernelKind::Discrete) return {c.p0 + c.r, c.p1, c.p2, 1.0};
    const double q2 = k.q2;
    return {q2 * (c.p0 + c.r), c.p0 + q2 * c.p1, c.p1 + q2 * c.p2, c.p2 + q2, 1.0};
}

inline ZeroDelayStability zero_delay_stability(const LinearizationCoeffs& c,
                                               const KernelSpec& k) {
    ZeroDelayStability out;
    if (k.kind == KernelKind::Discrete) {
        out.margins = {c.p1 * c.p2 - (c.p0 + c.r)};
    } else {
        const double q2 = k.q2;
        const double a3 = c.p2 + q2, a2 = c.p1 + q2 * c.p2, a1 = c.p0 + q2 * c.p1,
                     a0 = q2 * (c.p0 + c.r);
        const double D2 = a3 * a2 - a1;
        const double D3 = a1 * D2 - a3 * a3 * a0;
        out.margins = {D2, D3};
    }
    out.stable = std::all_of(out.margins.begin(), out.margins.end(),
                             [](double m) { return m > 0.0; });
    double mr = -1e300;
    for (const cplx& z : all_roots(zero_delay_poly(c, k))) mr = std::max(mr, z.real());
    out.max_re_root = mr;
    return out;
}

// ---------------------------------------------------------------------------
// Imaginary-axis crossings

struct HopfPoint {
    double omega;    // crossing frequency > 0
    double tau;      // effective delay: tau1+tau2 (discrete) or tau1 (weak)
    int branch;      // k in tau_k = (theta + 2 pi k)/omega
    double z;        // omega^2, the resolving-polynomial root
    bool simple;     // z is a simple root of the resolving polynomial
    cplx dlambda;    // d lambda/d tau at the crossing
    double residual; // |Delta1(i omega, tau)| relative to term scale
};

// Substituting lambda = i*omega and splitting real/imaginary parts reduces
// the crossing condition to a polynomial in z = omega^2:
//   discrete: z^3 + (p2^2-2p1) z^2 + (p1^2-2 p0 p2) z + (p0^2 - r^2)
//   weak:     z^4 + n1 z^3 + n2 z^2 + n3 z + n4   (with m-shorthands below)
inline Poly resolving_poly(const LinearizationCoeffs& c, const KernelSpec& k) {
    if (k.kind == KernelKind::Discrete)
        return {c.p0 * c.p0 - c.r * c.r, c.p1 * c.p1 - 2.0 * c.p0 * c.p2,
                c.p2 * c.p2 - 2.0 * c.p1, 1.0};
    const double q2 = k.q2;
    const double m1 = c.p2 + q2;        // lambda^3 coefficient
    const double m2 = c.p1 + q2 * c.p2; // lambda^2 coefficient
    const double m3 = c.p0 + c.p1 * q2; // lambda^1 coefficient
    const double m4 = q2 * c.p0;        // lambda^0 coefficient (without r)
    return {m4 * m4 - q2 * q2 * c.r * c.r, m3 * m3 - 2.0 * m4 * m2,
            m2 * m2 + 2.0 * m4 - 2.0 * m3 * m1, m1 * m1 - 2.0 * m2, 1.0};
}

namespace detail {
// cos/sin of omega*tau at a crossing, from the real/imaginary split.
inline void crossing_angle(const LinearizationCoeffs& c, const KernelSpec& k, double w,
                           double& cs, double& sn) {
    if (k.kind == KernelKind::Discrete) {
        cs = (c.p2 * w * w - c.p0) / c.r;
        sn = (c.p1 * w - w * w * w) / c.r;
        return;
    }
    const double q2 = k.q2;
    const double m1 = c.p2 + q2, m2 = c.p1 + q2 * c.p2, m3 = c.p0 + c.p1 * q2,
                 m4 = q2 * c.p0;
    cs = (-w * w * w * w + m2 * w * w - m4) / (q2 * c.r);
    sn = (-m1 * w * w * w + m3 * w) / (q2 * c.r);
}
} // namespace detail

// All crossing candidates with branch indices 0..max_branch, sorted by tau.
// Throws NoHopfError when the resolving polynomial has no positive real
// root (the equilibrium can then never destabilize through this kernel).
inline std::vector<HopfPoint> crossings(const LinearizationCoeffs& c, const KernelSpec& k,
                                        int max_branch = 0) {
    if (!(c.r > 0.0))
        throw NoHopfError("delayed-loop gain r is zero: no crossing can occur");
    const Poly rp = resolving_poly(c, k);
    const std::vector<RealRoot> zroots = real_roots_in(rp, 1e-14, root_bound(rp));
    std::vector<HopfPoint> out;
    for (const RealRoot& zr : zroots) {
        if (!(zr.x > 0.0)) continue;
        const double w = std::sqrt(zr.x);
        double cs, sn;
        detail::crossing_angle(c, k, w, cs, sn);
        double theta = std::atan2(sn, cs);
        if (theta < 0.0) theta += 2.0 * M_PI;
        for (int b = 0; b <= max_branch; ++b) {
            HopfPoint h;
            h.omega = w;
            h.tau = (theta + 2.0 * M_PI * b) / w;
            h.branch = b;
            h.z = zr.x;
            h.simple = zr.simple;
            KernelSpec kk = k;
            if (k.kind == KernelKind::Discrete) {
                kk.tau1 = h.tau;
                kk.tau2 = 0.0;
            } else {
                kk.tau1 = h.tau;
            }
            h.dlambda = dlambda_dtau(c, kk, cplx(0.0, w));
            h.residual = std::abs(char_delta1(c, kk, cplx(0.0, w))) /
                         char_delta1_scale(c, kk, cplx(0.0, w));
            if (h.residual > 1e-9)
                throw InconsistencyError("crossing residual above 1e-9");
            out.push_back(h);
        }
    }
    if (out.empty())
        throw NoHopfError("resolving polynomial has no positive root: "
                          "no imaginary-axis crossing exists");
    std::sort(out.begin(), out.end(),
              [](const HopfPoint& a, const HopfPoint& b) { return a.tau < b.tau; });
    return out;
}

// Smallest positive critical delay. Requires the crossing to be usable for
// bifurcation analysis: a simple resolving root crossed transversally.
inline HopfPoint first_crossing(const LinearizationCoeffs& c, const KernelSpec& k) {
    for (const HopfPoint& h : crossings(c, k, 0)) {
        if (h.tau <= 1e-12) continue;
        if (!h.simple)
            throw DegenerateCrossingError("first crossing sits on a multiple "
                                          "resolving-polynomial root");
        if (std::abs(h.dlambda.real()) < 1e-12)
            throw DegenerateCrossingError("first crossing is not transversal");
        return h;
    }
    throw NoHopfError("no strictly positive critical delay found");
}

// ---------------------------------------------------------------------------
// Characteristic-root scan at a fixed delay

// Newton iteration over a seed grid in the rectangle [re_lo,re_hi] x
// [0,im_hi]. Roots come in conjugate pairs, so only Im >= 0 is scanned;
// results are deduplicated and sorted by descending real part. The factored
// x1 root lambda = -a2 is part of the full spectrum but not of Delta1 and is
// not reported here. The default window [-2,1] x [0,5] covers every root of
// interest at the magnitudes this model produces (|roots| < p2 + r + 1); it
// is a bounded desk-scale check, not a rightmost-root solver for arbitrary
// coefficients.
inline std::vector<cplx> root_scan(const LinearizationCoeffs& c, const KernelSpec& k,
                                   double re_lo = -2.0, double re_hi = 1.0,
                                   double im_hi = 5.0, int n_re = 31, int n_im = 51) {
    std::vector<cplx> found;
    for (int i = 0; i < n_re; ++i) {
        for (int j = 0; j < n_im; ++j) {
            cplx lam(re_lo + (re_hi - re_lo) * (i + 0.5) / n_re,
                     im_hi * static_cast<double>(j) / (n_im - 1));
            bool ok = false;
            for (int it = 0; it < 80; ++it) {
                const cplx f = char_delta1(c, k, lam);
                const cplx df = char_delta1_dlambda(c, k, lam);
                if (df == cplx(0.0)) break;
                cplx step = f / df;
                if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
                lam -= step;
                if (std::abs(step) < 1e-13 * (1.0 + std::abs(lam))) {
                    ok = true;
                    break;
                }
            }
            if (!ok) continue;
            if (std::abs(char_delta1(c, k, lam)) >
                1e-10 * char_delta1_scale(c, k, lam))
                continue;
            if (lam.imag() < 0.0) lam = std::conj(lam);
            if (std::abs(lam.imag()) < 1e-12) lam = cplx(lam.real(), 0.0);
            if (lam.real() < re_lo - 0.5 || lam.real() > re_hi + 0.5 ||
                lam.imag() > im_hi + 0.5)
                continue;
            bool dup = false;
            for (const cplx& g : found)
                if (std::abs(g - lam) < 1e-8 * (1.0 + std::abs(lam))) {
                    dup = true;
                    break;
                }
            if (!dup) found.push_back(lam);
        }
    }
    std::sort(found.begin(), found.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    return found;
}

// Rightmost Delta1 root from the default scan window.
inline cplx dominant_root(const LinearizationCoeffs& c, const KernelSpec& k) {
    const std::vector<cplx> roots = root_scan(c, k);
    if (roots.empty())
        throw InconsistencyError("root scan found no characteristic roots");
    return roots.front();
}

} // namespace p53dde
