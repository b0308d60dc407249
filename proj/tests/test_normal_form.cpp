#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "p53dde/equilibrium.hpp"
#include "p53dde/linearization.hpp"
#include "p53dde/normal_form.hpp"
#include "p53dde/spectral.hpp"

using namespace p53dde;

namespace {

struct CaseSetup {
    LinearizationCoeffs c;
    KernelSpec k;
    HopfPoint hp;
    NormalFormSummary nf;
};

CaseSetup make_case(bool reference_chain, KernelKind kind, double v_scale = 1.0) {
    const Params p;
    const State4 about =
        reference_chain
            ? State4{3.636363636, 0.8347719895, 0.2370744013, 2.370744013}
            : solve_equilibrium(p);
    CaseSetup cs{linearize(p, about), KernelSpec{}, HopfPoint{}, NormalFormSummary{}};
    if (kind == KernelKind::Discrete) {
        cs.hp = first_crossing(cs.c, KernelSpec::discrete(6.0, 3.0));
        cs.k = KernelSpec::discrete(cs.hp.tau - 3.0, 3.0);
    } else {
        cs.hp = first_crossing(cs.c, KernelSpec::weak(5.0, 0.5));
        cs.k = KernelSpec::weak(cs.hp.tau, 0.5);
    }
    cs.nf = compute_normal_form(cs.c, cs.k, cs.hp, v_scale);
    return cs;
}

void check_cplx(cplx actual, double re, double im, double rtol) {
    const cplx want(re, im);
    CAPTURE(actual.real(), actual.imag(), re, im);
    CHECK(std::abs(actual - want) <= rtol * std::abs(want));
}

void check_diagnostics(const NormalFormSummary& nf) {
    CHECK(nf.res_v < 1e-12);
    CHECK(nf.res_w < 1e-12);
    CHECK(nf.pairing_error < 1e-12);
    CHECK(nf.orthogonality < 1e-12);
    CHECK(nf.bc20 < 1e-12);
    CHECK(nf.bc11 < 1e-12);
}

} // namespace

TEST_CASE("reference chain, discrete kernel, split tau2 = 3") {
    const CaseSetup cs = make_case(true, KernelKind::Discrete);
    const NormalFormSummary& nf = cs.nf;
    check_diagnostics(nf);
    const double rt = 5e-8;
    check_cplx(nf.g20, 0.002292782529, -0.003769455409, rt);
    check_cplx(nf.g11, -0.001945482959, 0.003930090377, rt);
    check_cplx(nf.g02, -0.0001788509866, -0.002217279435, rt);
    check_cplx(nf.g21, 5.23348594e-05, 5.298692893e-05, rt);
    check_cplx(nf.g21_variant, 0.5308975148, 0.3026302738, rt);
    check_cplx(nf.C1, -3.55549354005e-05, -8.58797373196e-05, rt);
    check_cplx(nf.dlambda, 0.00332859857232, -0.00589114774987, 1e-9);
    CHECK(nf.mu2 == Catch::Approx(0.01068165314).epsilon(rt));
    CHECK(nf.beta2 == Catch::Approx(-7.11098708e-05).epsilon(rt));
    CHECK(nf.T2 == Catch::Approx(0.001123907647).epsilon(rt));
}

TEST_CASE("reference chain, weak relay kernel, q2 = 0.5") {
    const CaseSetup cs = make_case(true, KernelKind::Weak);
    const NormalFormSummary& nf = cs.nf;
    check_diagnostics(nf);
    const double rt = 5e-8;
    check_cplx(nf.g20, -0.0996506732, 0.08486309676, rt);
    check_cplx(nf.g11, 0.02054306099, -0.1283319856, rt);
    check_cplx(nf.g02, 0.05994954883, 0.007680707248, rt);
    check_cplx(nf.g21, 0.04690121806, 0.04130270563, rt);
    check_cplx(nf.g21_variant, 2.076438272, 0.07814211325, rt);
    check_cplx(nf.C1, -0.0328467711991, -0.0806811010517, rt);
    check_cplx(nf.dlambda, 0.00316767022805, -0.00549085356848, 1e-9);
    CHECK(nf.mu2 == Catch::Approx(10.36937839).epsilon(rt));
    CHECK(nf.beta2 == Catch::Approx(-0.0656935424).epsilon(rt));
    CHECK(nf.T2 == Catch::Approx(1.066291627).epsilon(rt));
}

TEST_CASE("computed chain, discrete kernel, split tau2 = 3") {
    const CaseSetup cs = make_case(false, KernelKind::Discrete);
    const NormalFormSummary& nf = cs.nf;
    check_diagnostics(nf);
    const double rt = 5e-8;
    check_cplx(nf.g20, -0.0005027272788, -0.001368565878, rt);
    check_cplx(nf.g11, -0.001127685931, 0.0009111242277, rt);
    check_cplx(nf.g02, 0.0006364756869, -0.001241126584, rt);
    check_cplx(nf.g21, -8.657776887e-06, 1.11836108e-05, rt);
    check_cplx(nf.g21_variant, 0.4039302819, 0.1133843661, rt);
    check_cplx(nf.C1, -1.10943002849e-05, -1.33485381895e-05, rt);
    check_cplx(nf.dlambda, 0.000609766167377, -0.00215333763542, 1e-9);
    CHECK(nf.mu2 == Catch::Approx(0.018194352).epsilon(rt));
    CHECK(nf.beta2 == Catch::Approx(-2.218860057e-05).epsilon(rt));
    CHECK(nf.T2 == Catch::Approx(0.0006548952539).epsilon(rt));
}

TEST_CASE("computed chain, weak relay kernel, q2 = 0.5") {
    const CaseSetup cs = make_case(false, KernelKind::Weak);
    const NormalFormSummary& nf = cs.nf;
    check_diagnostics(nf);
    const double rt = 5e-8;
    check_cplx(nf.g20, -0.04443482844, 0.04862156351, rt);
    check_cplx(nf.g11, -0.01281904648, -0.06420790089, rt);
    check_cplx(nf.g02, 0.02508475099, -0.06815606386, rt);
    check_cplx(nf.g21, -0.02022793853, 0.02555132105, rt);
    check_cplx(nf.g21_variant, 1.453517192, 0.02229982095, rt);
    check_cplx(nf.C1, -0.0242365695559, -0.0292835284438, rt);
    check_cplx(nf.dlambda, 0.000592883944224, -0.00207636502942, 1e-9);
    CHECK(nf.mu2 == Catch::Approx(40.87911267).epsilon(rt));
    CHECK(nf.beta2 == Catch::Approx(-0.04847313911).epsilon(rt));
    CHECK(nf.T2 == Catch::Approx(1.446135238).epsilon(rt));
}

TEST_CASE("summary identities hold bit-level") {
    for (bool ref : {true, false}) {
        for (KernelKind kind : {KernelKind::Discrete, KernelKind::Weak}) {
            const CaseSetup cs = make_case(ref, kind);
            const NormalFormSummary& nf = cs.nf;
            CAPTURE(ref, static_cast<int>(kind));
            const cplx c1_from_g =
                cplx(0.0, 1.0) / (2.0 * nf.omega) *
                    (nf.g20 * nf.g11 - 2.0 * std::norm(nf.g11) -
                     std::norm(nf.g02) / 3.0) +
                nf.g21 / 2.0;
            CHECK(std::abs(nf.C1 - c1_from_g) <= 1e-14 * std::abs(nf.C1));
            CHECK(nf.mu2 == Catch::Approx(-nf.C1.real() / nf.dlambda.real())
                                .epsilon(1e-14));
            CHECK(nf.beta2 == Catch::Approx(2.0 * nf.C1.real()).epsilon(1e-14));
            CHECK(nf.T2 ==
                  Catch::Approx(-(nf.C1.imag() + nf.mu2 * nf.dlambda.imag()) /
                                nf.omega)
                      .epsilon(1e-14));
            // The two trace identities combine to beta2 = -2 mu2 Re(lambda').
            CHECK(nf.beta2 == Catch::Approx(-2.0 * nf.mu2 * nf.dlambda.real())
                                  .epsilon(1e-13));
            // Uniform classification across all four cases: supercritical,
            // orbitally stable, period growing with the delay.
            CHECK(nf.mu2 > 0.0);
            CHECK(nf.beta2 < 0.0);
            CHECK(nf.T2 > 0.0);
        }
    }
}

TEST_CASE("first component reflects the one-way coupling") {
    // x1 sits upstream of the feedback loop: nothing in the loop feeds back
    // into it, so the right eigenvector and the second-order corrections have
    // no x1 part. The adjoint runs the other way; it weights x1 by the b1
    // coupling pulled through the resolvent at the eigenvalue.
    for (bool ref : {true, false}) {
        for (KernelKind kind : {KernelKind::Discrete, KernelKind::Weak}) {
            const CaseSetup cs = make_case(ref, kind);
            CHECK(std::abs(cs.nf.v[0]) == 0.0);
            const cplx w0 = cs.c.params.b1 * cs.nf.w[1] /
                            (std::conj(cs.nf.lambda1) + cs.c.params.a2);
            CHECK(std::abs(cs.nf.w[0] - w0) < 1e-12 * std::abs(w0));
            CHECK(std::abs(cs.nf.E1[0]) < 1e-14);
            CHECK(std::abs(cs.nf.E2[0]) < 1e-14);
        }
    }
}

TEST_CASE("quadratic coefficients recomputed from the eigenvectors") {
    // g20/g11/g02 follow from the two nonlinear rows alone; g02 is g20's
    // image under v -> conj(v), lambda1 -> lambda2. Full second derivative
    // of the activation is twice the stored Taylor coefficient.
    for (bool ref : {true, false}) {
        for (KernelKind kind : {KernelKind::Discrete, KernelKind::Weak}) {
            const CaseSetup cs = make_case(ref, kind);
            const NormalFormSummary& nf = cs.nf;
            const double b12 = cs.c.params.b12;
            const double f2 = 2.0 * cs.c.rho2;
            const cplx lam1(0.0, nf.omega);
            const cplx e1 = std::exp(-lam1 * cs.k.tau1);
            const cplx v2 = nf.v[1], v4 = nf.v[3];
            const cplx w2 = std::conj(nf.w[1]), w3 = std::conj(nf.w[2]);
            const cplx g20 = w2 * (-2.0 * b12 * v2 * v4) + w3 * (f2 * v2 * v2 * e1 * e1);
            const cplx g11 =
                w2 * (-b12 * (v2 * std::conj(v4) + std::conj(v2) * v4)) +
                w3 * (f2 * std::norm(v2));
            const cplx g02 =
                w2 * (-2.0 * b12 * std::conj(v2) * std::conj(v4)) +
                w3 * (f2 * std::conj(v2) * std::conj(v2) * std::conj(e1) * std::conj(e1));
            CAPTURE(ref, static_cast<int>(kind));
            CHECK(std::abs(nf.g20 - g20) <= 1e-12 * std::abs(g20));
            CHECK(std::abs(nf.g11 - g11) <= 1e-12 * std::abs(g11));
            CHECK(std::abs(nf.g02 - g02) <= 1e-12 * std::abs(g02));
        }
    }
}

TEST_CASE("E vectors satisfy the chain rows") {
    const Params p;
    SECTION("weak relay") {
        const CaseSetup cs = make_case(false, KernelKind::Weak);
        const NormalFormSummary& nf = cs.nf;
        const cplx lam1(0.0, nf.omega);
        const double q2 = cs.k.q2;
        // Relay row: (2 lam1 + q2) E1_z = q2 E1_x2.
        CHECK(std::abs(nf.E1[2] - (2.0 * lam1 + q2) / q2 * nf.E1[4]) <=
              1e-12 * std::abs(nf.E1[2]));
        // Repressor row: (2 lam1 + d2) E1_y2 = E1_z.
        CHECK(std::abs(nf.E1[3] - nf.E1[4] / (2.0 * lam1 + p.d2)) <=
              1e-12 * std::abs(nf.E1[3]));
        // E2 solves the zero-frequency system, which is real.
        for (const cplx& e : nf.E2) CHECK(std::abs(e.imag()) < 1e-12);
        CHECK(std::abs(nf.E2[4] - nf.E2[2]) <= 1e-12 * std::abs(nf.E2[2]));
        CHECK(std::abs(p.d2 * nf.E2[3] - nf.E2[4]) <= 1e-12 * std::abs(nf.E2[4]));
    }
    SECTION("discrete") {
        const CaseSetup cs = make_case(false, KernelKind::Discrete);
        const NormalFormSummary& nf = cs.nf;
        const cplx lam1(0.0, nf.omega);
        const cplx rhs = std::exp(-2.0 * lam1 * cs.k.tau2) * nf.E1[2];
        CHECK(std::abs((2.0 * lam1 + p.d2) * nf.E1[3] - rhs) <=
              1e-12 * std::abs(rhs));
        for (const cplx& e : nf.E2) CHECK(std::abs(e.imag()) < 1e-12);
    }
}

TEST_CASE("eigenvector rescaling acts homogeneously") {
    const double s = 2.37;
    for (KernelKind kind : {KernelKind::Discrete, KernelKind::Weak}) {
        const CaseSetup base = make_case(false, kind);
        const CaseSetup scaled = make_case(false, kind, s);
        const NormalFormSummary& a = base.nf;
        const NormalFormSummary& b = scaled.nf;
        CAPTURE(static_cast<int>(kind));
        CHECK(std::abs(b.g20 - s * a.g20) <= 1e-12 * std::abs(a.g20));
        CHECK(std::abs(b.g11 - s * a.g11) <= 1e-12 * std::abs(a.g11));
        CHECK(std::abs(b.g02 - s * a.g02) <= 1e-12 * std::abs(a.g02));
        CHECK(std::abs(b.g21 - s * s * a.g21) <= 1e-11 * std::abs(a.g21));
        CHECK(std::abs(b.C1 - s * s * a.C1) <= 1e-11 * std::abs(a.C1));
        CHECK(b.mu2 == Catch::Approx(s * s * a.mu2).epsilon(1e-11));
        CHECK(b.beta2 == Catch::Approx(s * s * a.beta2).epsilon(1e-11));
        CHECK(b.T2 == Catch::Approx(s * s * a.T2).epsilon(1e-11));
        // Scale-free combinations.
        CHECK(b.T2 / b.mu2 == Catch::Approx(a.T2 / a.mu2).epsilon(1e-11));
        CHECK((b.mu2 > 0.0) == (a.mu2 > 0.0));
        CHECK((b.beta2 < 0.0) == (a.beta2 < 0.0));
        CHECK(b.beta2 == Catch::Approx(-2.0 * b.mu2 * b.dlambda.real())
                             .epsilon(1e-13));
    }
}

TEST_CASE("kernel preconditions") {
    const CaseSetup cs = make_case(false, KernelKind::Discrete);
    // Kernel delays must realize the crossing delay.
    CHECK_THROWS_AS(
        compute_normal_form(cs.c, KernelSpec::discrete(cs.hp.tau, 3.0), cs.hp),
        ConfigError);
    // The whole delay on the relay leg leaves tau1 = 0: rejected.
    CHECK_THROWS_AS(
        compute_normal_form(cs.c, KernelSpec::discrete(0.0, cs.hp.tau), cs.hp),
        ConfigError);
    // Weak kernel must carry the crossing delay on tau1.
    const CaseSetup ws = make_case(false, KernelKind::Weak);
    CHECK_THROWS_AS(
        compute_normal_form(ws.c, KernelSpec::weak(ws.hp.tau + 1.0, 0.5), ws.hp),
        ConfigError);
}
