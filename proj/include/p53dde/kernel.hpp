#pragma once

#include "p53dde/errors.hpp"

namespace p53dde {

enum class KernelKind { Discrete, Weak };

// Delay structure of the two feedback legs.
//
// Discrete: both legs carry Dirac kernels with lags tau1 (activation leg)
// and tau2 (relay leg); only the sum tau1+tau2 enters the characteristic
// function, but the nonlinear dynamics and the normal form see the split.
//
// Weak: the activation leg keeps the discrete lag tau1; the relay leg
// carries the exponential kernel q2*exp(-q2*s), equivalently one extra
// chain state z with z' = q2*(x2 - z).
struct KernelSpec {
    KernelKind kind = KernelKind::Discrete;
    double tau1 = 0.0;
    double tau2 = 0.0; // Discrete only
    double q2 = 0.0;   // Weak only

    static KernelSpec discrete(double tau1, double tau2) {
        if (tau1 < 0.0 || tau2 < 0.0) throw ConfigError("delays must be >= 0");
        KernelSpec k;
        k.kind = KernelKind::Discrete;
        k.tau1 = tau1;
        k.tau2 = tau2;
        return k;
    }

    static KernelSpec weak(double tau1, double q2) {
        if (tau1 < 0.0) throw ConfigError("tau1 must be >= 0");
        if (!(q2 > 0.0)) throw ConfigError("q2 must be > 0");
        KernelSpec k;
        k.kind = KernelKind::Weak;
        k.tau1 = tau1;
        k.q2 = q2;
        return k;
    }

    // The delay that the characteristic function actually sees.
    double effective_delay() const {
        return kind == KernelKind::Discrete ? tau1 + tau2 : tau1;
    }
};

} // namespace p53dde
