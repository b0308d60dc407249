#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "p53dde/errors.hpp"

namespace p53dde {

// Model constants. Units follow the source model: first-order rates
// (a2, b2, c2, d2), production rates (a1, b1), the coupling strength b12,
// and the activation threshold/steepness pair (a, n).
//
// d12 is carried for interface completeness but only the value 0 is
// supported: the analysis pipeline assumes the y2 equation is linear in y2.
struct Params {
    double a1 = 2.0;    // x1 production
    double a2 = 0.55;   // x1 decay
    double b1 = 1.0;    // y1 production via x1
    double b2 = 0.8;    // y1 decay
    double b12 = 1.5;   // y1 degradation by y2
    double c2 = 0.1;    // x2 decay
    double d2 = 0.1;    // y2 decay
    double d12 = 0.0;   // unsupported cross term; must stay 0
    double a = 4.0;     // activation threshold
    int n = 2;          // activation steepness (cooperativity)

    // Throws ConfigError listing every violated requirement.
    void validate() const {
        std::vector<std::string> bad;
        auto pos = [&](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                bad.push_back(std::string(name) + " must be > 0");
        };
        pos(a2, "a2");
        pos(b1, "b1");
        pos(b2, "b2");
        pos(c2, "c2");
        pos(d2, "d2");
        pos(a, "a");
        if (!(a1 >= 0.0) || !std::isfinite(a1)) bad.push_back("a1 must be >= 0");
        if (!(b12 >= 0.0) || !std::isfinite(b12)) bad.push_back("b12 must be >= 0");
        if (d12 != 0.0) bad.push_back("d12 != 0 is not supported");
        if (n < 1) bad.push_back("n must be a positive integer");
        if (!bad.empty()) {
            std::string msg = "invalid parameters: ";
            for (std::size_t i = 0; i < bad.size(); ++i) {
                if (i) msg += "; ";
                msg += bad[i];
            }
            throw ConfigError(msg);
        }
    }

    // Applies `key = value` pairs (as parsed from a config file).
    // Unknown keys are an error so typos cannot silently fall back to
    // defaults.
    void apply(const std::vector<std::pair<std::string, double>>& kv) {
        for (const auto& [key, value] : kv) {
            if (key == "a1") a1 = value;
            else if (key == "a2") a2 = value;
            else if (key == "b1") b1 = value;
            else if (key == "b2") b2 = value;
            else if (key == "b12") b12 = value;
            else if (key == "c2") c2 = value;
            else if (key == "d2") d2 = value;
            else if (key == "d12") d12 = value;
            else if (key == "a") a = value;
            else if (key == "n") {
                double r = std::round(value);
                if (std::abs(value - r) > 1e-12)
                    throw ConfigError("n must be an integer, got " + std::to_string(value));
                n = static_cast<int>(r);
            } else {
                throw ConfigError("unknown parameter key: " + key);
            }
        }
    }
};

} // namespace p53dde
