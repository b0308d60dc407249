#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "p53dde/equilibrium.hpp"

using namespace p53dde;

TEST_CASE("baseline equilibrium values") {
    const Params p;
    const EquilibriumSet set = solve_equilibria(p);
    REQUIRE(set.roots.size() == 1);
    const State4& s = set.roots[0];
    CHECK(s.x1 == Catch::Approx(40.0 / 11.0).epsilon(1e-14));
    CHECK(s.y1 == Catch::Approx(0.69684427452656328).epsilon(1e-12));
    CHECK(s.x2 == Catch::Approx(0.29455535756384837).epsilon(1e-12));
    CHECK(s.y2 == Catch::Approx(2.9455535756384839).epsilon(1e-12));
    CHECK(equilibrium_residual_max(p, s) < 1e-12);
    // y2 = x2 / d2 with d2 = 0.1.
    CHECK(s.y2 == Catch::Approx(10.0 * s.x2).epsilon(1e-14));
}

TEST_CASE("selector and principal root") {
    const Params p;
    const State4 s = solve_equilibrium(p);
    CHECK(s.y1 == Catch::Approx(0.69684427452656328).epsilon(1e-12));
    CHECK_THROWS_AS(solve_equilibrium(p, 5), ConfigError);
}

TEST_CASE("no production means no positive equilibrium") {
    Params p;
    p.a1 = 0.0;
    CHECK_THROWS_AS(solve_equilibria(p), NoEquilibriumError);
}

TEST_CASE("decoupled protein equation") {
    // b12 = 0 removes the nonlinear degradation leg; y1 = b1 x1 / b2 exactly.
    Params p;
    p.b12 = 0.0;
    const EquilibriumSet set = solve_equilibria(p);
    REQUIRE(set.roots.size() == 1);
    CHECK(set.roots[0].y1 ==
          Catch::Approx(p.b1 * p.a1 / (p.a2 * p.b2)).epsilon(1e-12));
}

TEST_CASE("random parameter sets: residual postcondition and uniqueness") {
    std::mt19937_64 rng(31415926u);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    for (int trial = 0; trial < 60; ++trial) {
        Params p;
        p.a1 = u(rng);
        p.a2 = u(rng);
        p.b1 = u(rng);
        p.b2 = u(rng);
        p.b12 = u(rng);
        p.c2 = u(rng);
        p.d2 = u(rng);
        p.a = u(rng);
        p.n = 1 + static_cast<int>(u(rng));
        const EquilibriumSet set = solve_equilibria(p);
        CAPTURE(trial, p.a1, p.a2, p.b1, p.b2, p.b12, p.c2, p.d2, p.a, p.n);
        // The balance function is strictly decreasing in y, so the root is
        // unique for every positive parameter set.
        REQUIRE(set.roots.size() == 1);
        const State4& s = set.roots[0];
        const double scale = p.a1 + p.b1 * s.x1;
        CHECK(equilibrium_residual_max(p, s) < 1e-9 * (1.0 + scale));
        CHECK(s.x1 == Catch::Approx(p.a1 / p.a2).epsilon(1e-14));
        CHECK(s.y1 > 0.0);
        CHECK(s.y1 < p.a1 * p.b1 / (p.a2 * p.b2) + 1e-12);
    }
}

TEST_CASE("published concentration tuple is not a steady state of these rates") {
    // The bundled reference tuple fails the clearance balance by ~1.8e-2,
    // far above solver tolerance; the verification report flags this.
    const Params p;
    const State4 printed{3.636363636, 0.8347719895, 0.2370744013, 2.370744013};
    CHECK(equilibrium_residual_max(p, printed) > 0.01);
    // The first component alone is reproduced.
    CHECK(std::abs(printed.x1 - p.a1 / p.a2) < 1e-9);
}
