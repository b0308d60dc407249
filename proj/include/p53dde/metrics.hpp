#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "p53dde/dde_sim.hpp"
#include "p53dde/errors.hpp"

namespace p53dde {

// Successive-peak amplitude ratio bands separating decay, sustained
// oscillation, and growth. Chosen so linear envelopes with |Re lambda|
// around 2e-3 at the periods of interest fall clearly outside the
// sustained band; adjust through OscillationOptions if a regime with
// slower envelopes needs classification.
inline constexpr double kDecayRatioMax = 0.995;
inline constexpr double kGrowthRatioMin = 1.005;

struct OscillationOptions {
    double transient_fraction = 0.5; // portion of the horizon discarded
    double decay_ratio_max = kDecayRatioMax;
    double growth_ratio_min = kGrowthRatioMin;
    std::optional<double> baseline; // default: mean over the analysis window
};

enum class Trend { NoOscillation, Decaying, Sustained, Growing };

inline const char* trend_name(Trend t) {
    switch (t) {
        case Trend::Decaying: return "decaying";
        case Trend::Sustained: return "sustained";
        case Trend::Growing: return "growing";
        default: return "no-oscillation";
    }
}

struct OscillationMetrics {
    Trend trend = Trend::NoOscillation;
    bool oscillating = false;       // at least 3 peaks after the transient
    std::vector<double> peak_times; // parabola-refined
    std::vector<double> peak_values;
    double period = 0.0;        // mean spacing of refined peak times
    double amplitude = 0.0;     // last |peak - baseline|
    double amplitude_ratio = 1.0; // geometric mean of successive ratios
    double baseline = 0.0;
};

// Peak census of one trajectory component. Interior local maxima of the
// sampled signal are refined by the parabola through the three samples
// around each (fixed-step RK4 output is smooth enough that this recovers
// peak times to O(step^2)). Fewer than 3 peaks is a NoOscillation verdict,
// not an error: short horizons and fast decay legitimately produce it.
inline OscillationMetrics oscillation_metrics(const Trajectory& traj,
                                              std::size_t component,
                                              const OscillationOptions& opt = {}) {
    if (component >= traj.dim)
        throw ConfigError("component index out of range for this trajectory");
    if (!(opt.transient_fraction >= 0.0 && opt.transient_fraction < 1.0))
        throw ConfigError("transient_fraction must be in [0, 1)");

    OscillationMetrics m;
    const std::size_t n = traj.times.size();
    if (n < 3) return m;
    std::size_t start = static_cast<std::size_t>(opt.transient_fraction * n);
    if (start + 3 > n) start = n >= 3 ? n - 3 : 0;

    double mean = 0.0;
    for (std::size_t i = start; i < n; ++i) mean += traj.states[i][component];
    mean /= static_cast<double>(n - start);
    m.baseline = opt.baseline.value_or(mean);

    for (std::size_t i = std::max<std::size_t>(start, 1); i + 1 < n; ++i) {
        const double y0 = traj.states[i - 1][component];
        const double y1 = traj.states[i][component];
        const double y2 = traj.states[i + 1][component];
        if (!(y1 > y0 && y1 >= y2)) continue;
        const double dd = y0 - 2.0 * y1 + y2;
        double off = 0.0, height = y1;
        if (dd < 0.0) {
            off = 0.5 * (y0 - y2) / dd;
            height = y1 - 0.25 * (y0 - y2) * off;
        }
        m.peak_times.push_back(traj.times[i] + off * traj.step);
        m.peak_values.push_back(height);
    }

    if (m.peak_times.size() < 3) return m;
    m.oscillating = true;

    double span = 0.0;
    for (std::size_t i = 1; i < m.peak_times.size(); ++i)
        span += m.peak_times[i] - m.peak_times[i - 1];
    m.period = span / static_cast<double>(m.peak_times.size() - 1);

    double logsum = 0.0;
    std::size_t nratio = 0;
    for (std::size_t i = 1; i < m.peak_values.size(); ++i) {
        const double prev = m.peak_values[i - 1] - m.baseline;
        const double cur = m.peak_values[i] - m.baseline;
        if (prev > 0.0 && cur > 0.0) {
            logsum += std::log(cur / prev);
            ++nratio;
        }
    }
    m.amplitude_ratio = nratio ? std::exp(logsum / static_cast<double>(nratio)) : 1.0;
    m.amplitude = std::abs(m.peak_values.back() - m.baseline);

    if (m.amplitude_ratio < opt.decay_ratio_max) m.trend = Trend::Decaying;
    else if (m.amplitude_ratio > opt.growth_ratio_min) m.trend = Trend::Growing;
    else m.trend = Trend::Sustained;
    return m;
}

// Simulation protocol shared by the delay sweeps and the acceptance checks:
// perturb y1 off the equilibrium, integrate long enough to see the envelope,
// classify the tail.
struct SweepProtocol {
    double horizon = 3000.0;
    double step = 0.05;
    double perturb_y1 = 0.05;
    std::size_t component = 1; // y1
    double transient_fraction = 0.6;
};

struct ScalingPoint {
    double tau = 0.0;
    Trend trend = Trend::NoOscillation;
    double amplitude = 0.0; // saturated amplitude, 0 when not sustained/growing
};

struct ScalingFit {
    bool conclusive = false;
    std::string side; // "above": oscillations for tau > tau_hat
    double tau_hat = 0.0;
    double slope = 0.0;
    std::vector<ScalingPoint> points;
};

// Square-amplitude regression across a delay grid. Near a supercritical
// Hopf point the saturated amplitude obeys amp^2 ~ K (tau - tau_c), so the
// x-intercept of the least-squares line through the oscillating side
// estimates the onset delay. The grid must have at least 6 points and
// should straddle the suspected onset, with horizons long enough for ~30
// oscillation periods per point so the saturated amplitude is actually
// reached. Needs at least two oscillating grid points; anything less
// (including a uniformly quiescent grid) is inconclusive.
inline ScalingFit amplitude_scaling_fit(const Params& p, const KernelSpec& base,
                                        const std::vector<double>& taus,
                                        const SweepProtocol& proto = {}) {
    if (taus.size() < 6)
        throw ConfigError("amplitude scaling fit needs a grid of >= 6 delays");
    ScalingFit fit;
    for (double tau : taus) {
        KernelSpec k = base;
        if (base.kind == KernelKind::Discrete) {
            if (tau <= base.tau2)
                throw ConfigError("total delay must exceed tau2 in the sweep");
            k.tau1 = tau - base.tau2;
        } else {
            k.tau1 = tau;
        }
        const HistorySpec hist =
            HistorySpec::at_equilibrium({0.0, proto.perturb_y1, 0.0, 0.0});
        const Trajectory traj =
            base.kind == KernelKind::Discrete
                ? simulate_discrete(p, k.tau1, k.tau2, hist, proto.horizon, proto.step)
                : simulate_weak_chain(p, k.tau1, k.q2, hist, proto.horizon, proto.step);
        OscillationOptions opt;
        opt.transient_fraction = proto.transient_fraction;
        const OscillationMetrics m = oscillation_metrics(traj, proto.component, opt);
        ScalingPoint pt;
        pt.tau = tau;
        pt.trend = m.trend;
        if (m.trend == Trend::Sustained || m.trend == Trend::Growing)
            pt.amplitude = m.amplitude;
        fit.points.push_back(pt);
    }

    std::vector<std::pair<double, double>> xy; // (tau, amp^2)
    for (const auto& pt : fit.points)
        if (pt.amplitude > 0.0) xy.emplace_back(pt.tau, pt.amplitude * pt.amplitude);
    if (xy.size() < 2) return fit;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nn = static_cast<double>(xy.size());
    const double denom = nn * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) return fit;
    const double slope = (nn * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / nn;
    if (!(slope > 0.0)) return fit; // amplitude not growing with delay: no onset estimate
    fit.slope = slope;
    fit.tau_hat = -icept / slope;
    fit.side = "above";
    fit.conclusive = true;
    return fit;
}

} // namespace p53dde
