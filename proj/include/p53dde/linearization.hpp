#pragma once

#include <complex>
#include <vector>

#include "p53dde/equilibrium.hpp"
#include "p53dde/hill.hpp"
#include "p53dde/kernel.hpp"
#include "p53dde/linalg.hpp"
#include "p53dde/params.hpp"

namespace p53dde {

// Linear (and local cubic Taylor) data of the model about a state.
//
// The linearized system factors its characteristic function as
// (lambda + a2) * Delta1(lambda); everything below feeds Delta1:
//   discrete kernels: Delta1 = lambda^3 + p2 lambda^2 + p1 lambda + p0
//                              + r e^{-lambda (tau1+tau2)}
//   weak kernel:      Delta1 = (lambda + q2)(lambda^3 + p2 lambda^2
//                              + p1 lambda + p0) + r q2 e^{-lambda tau1}
//
// The struct carries copies of the parameters and the expansion point:
// the quadratic/cubic model terms downstream (normal form) need b12 and the
// state, not just the cubic coefficients.
struct LinearizationCoeffs {
    double B;     // b2 + b12*y2*, total linear decay felt by y1
    double rho;   // f'(y1*)
    double rho2;  // f''(y1*)/2  (Taylor coefficient)
    double rho3;  // f'''(y1*)/6 (Taylor coefficient)
    double p2;
    double p1;
    double p0;
    double r;     // delayed-loop gain b12*y1*rho
    Params params;
    State4 about;
};

inline LinearizationCoeffs linearize(const Params& p, const State4& s) {
    LinearizationCoeffs c;
    const HillTaylor t = hill_taylor(s.y1, p.a, p.n);
    c.B = p.b2 + p.b12 * s.y2;
    c.rho = t.rho;
    c.rho2 = t.rho2;
    c.rho3 = t.rho3;
    c.p2 = c.B + p.c2 + p.d2;
    c.p1 = c.B * (p.c2 + p.d2) + p.c2 * p.d2;
    c.p0 = c.B * p.c2 * p.d2;
    c.r = p.b12 * s.y1 * c.rho;
    c.params = p;
    c.about = s;
    return c;
}

// The same linearization in matrix form, x'(t) = A x(t) + sum_k B_k x(t-tau_k):
// coordinates (x1, y1, x2, y2) for discrete kernels, plus the chain state z
// as a fifth coordinate for the weak kernel. det(lambda I - A - sum e^{-lambda
// tau_k} B_k) factors as (lambda + a2) * Delta1(lambda).
struct SystemMatrices {
    std::size_t dim;
    CMat A;
    std::vector<CMat> Bs;
    std::vector<double> taus;
    explicit SystemMatrices(std::size_t d) : dim(d), A(d) {}
};

inline SystemMatrices system_matrices(const LinearizationCoeffs& c,
                                      const KernelSpec& k) {
    const Params& p = c.params;
    if (k.kind == KernelKind::Discrete) {
        SystemMatrices s(4);
        s.A.at(0, 0) = -p.a2;
        s.A.at(1, 0) = p.b1;
        s.A.at(1, 1) = -c.B;
        s.A.at(1, 3) = -p.b12 * c.about.y1;
        s.A.at(2, 2) = -p.c2;
        s.A.at(3, 3) = -p.d2;
        CMat B1(4), B2(4);
        B1.at(2, 1) = c.rho;
        B2.at(3, 2) = 1.0;
        s.Bs = {B1, B2};
        s.taus = {k.tau1, k.tau2};
        return s;
    }
    SystemMatrices s(5);
    s.A.at(0, 0) = -p.a2;
    s.A.at(1, 0) = p.b1;
    s.A.at(1, 1) = -c.B;
    s.A.at(1, 3) = -p.b12 * c.about.y1;
    s.A.at(2, 2) = -p.c2;
    s.A.at(3, 3) = -p.d2;
    s.A.at(3, 4) = 1.0;
    s.A.at(4, 2) = k.q2;
    s.A.at(4, 4) = -k.q2;
    CMat B1(5);
    B1.at(2, 1) = c.rho;
    s.Bs = {B1};
    s.taus = {k.tau1};
    return s;
}

// lambda I - A - sum_k e^{-lambda tau_k} B_k
inline CMat system_char_matrix(const SystemMatrices& s, std::complex<double> lam) {
    CMat M(s.dim);
    for (std::size_t i = 0; i < s.dim; ++i)
        for (std::size_t j = 0; j < s.dim; ++j)
            M.at(i, j) = (i == j ? lam : std::complex<double>(0.0)) - s.A.at(i, j);
    for (std::size_t b = 0; b < s.Bs.size(); ++b) {
        const std::complex<double> e = std::exp(-lam * s.taus[b]);
        for (std::size_t i = 0; i < s.dim; ++i)
            for (std::size_t j = 0; j < s.dim; ++j)
                M.at(i, j) -= e * s.Bs[b].at(i, j);
    }
    return M;
}

} // namespace p53dde
