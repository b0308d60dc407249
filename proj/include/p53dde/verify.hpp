#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "p53dde/dde_sim.hpp"
#include "p53dde/equilibrium.hpp"
#include "p53dde/io.hpp"
#include "p53dde/linearization.hpp"
#include "p53dde/metrics.hpp"
#include "p53dde/normal_form.hpp"
#include "p53dde/params.hpp"
#include "p53dde/spectral.hpp"

namespace p53dde {

// Externally published reference values for the default parameter set that
// this artifact re-derives and audits. The set is exactly: the four
// equilibrium coordinates, and (omega, critical delay, mu2, beta2, T2) for
// each kernel case. Several of them are internally inconsistent (they
// violate the model's own defining equations); the report marks those rows
// as flagged and attaches simulation evidence for the artifact's values
// instead of silently disagreeing.
namespace reference {
inline constexpr double x10 = 3.636363636;
inline constexpr double y10 = 0.8347719895;
inline constexpr double x20 = 0.2370744013;
inline constexpr double y20 = 2.370744013;

inline constexpr double case1_omega = 0.1324013896;
inline constexpr double case1_tau0 = 9.541873607;
inline constexpr double case1_mu2 = -0.4204703301;
inline constexpr double case1_beta2 = 0.2799153884;
inline constexpr double case1_T2 = 0.0005051758260;

inline constexpr double case2_omega = 0.1290621026;
inline constexpr double case2_tau10 = 32.37014890;
inline constexpr double case2_mu2 = -0.5993860816;
inline constexpr double case2_beta2 = -0.7476750590;
inline constexpr double case2_T2 = 0.1798944390;

// Configuration the reference analysis fixes (not audited values).
inline constexpr double case1_tau2 = 3.0;
inline constexpr double case2_q2 = 0.5;
} // namespace reference

// Tolerances for the audit rows (relative).
inline constexpr double kTolEquilibrium = 1e-6;
inline constexpr double kTolCrossing = 1e-4;
inline constexpr double kTolNormalForm = 0.10;

struct VerifyRow {
    std::string name;
    double computed = 0.0;
    double published = 0.0;
    double tol = 0.0;
    double rel_err = 0.0;
    bool within = false;
    bool flagged = false;    // known internally inconsistent reference value
    std::string verdict;     // arbiter verdict for flagged rows
    std::string note;
};

// Spectral and normal-form results for one kernel case about one expansion
// point.
struct CaseAnalysis {
    KernelSpec kernel;
    HopfPoint hopf;
    double crossing_residual_abs = 0.0; // |Delta1(i omega, tau_crit)|
    NormalFormSummary nf;
};

// Simulation evidence at the computed-chain critical delay: trend below and
// above, period against the root scan at the tested delay, and long-horizon
// saturation slightly above the crossing.
struct ArbiterCase {
    std::string kernel;
    double tau_crit = 0.0;
    double omega = 0.0;
    Trend trend_below = Trend::NoOscillation; // at 0.9 tau_crit
    Trend trend_above = Trend::NoOscillation; // at 1.1 tau_crit
    double period_above = 0.0;     // measured at 1.1 tau_crit
    double period_scan = 0.0;      // 2 pi / Im(dominant root at 1.1 tau_crit)
    double period_rel_err = 0.0;
    double period_onset = 0.0;     // 2 pi / omega(tau_crit), for reference
    double period_onset_rel_err = 0.0;
    double sat_ratio = 0.0;        // trailing amplitude ratio at 1.05 tau_crit
    Trend trend_sat = Trend::NoOscillation;
    bool confirms = false;
};

struct VerificationReport {
    Params params;
    State4 eq;                   // computed equilibrium (principal root)
    double eq_residual = 0.0;
    double ref_tuple_residual = 0.0; // steady-state residual of the reference tuple

    CaseAnalysis ref_case1, ref_case2;   // about the reference tuple
    CaseAnalysis comp_case1, comp_case2; // about the computed equilibrium

    std::vector<VerifyRow> rows;
    ArbiterCase arb_discrete, arb_weak;
    bool classification_confirmed = false;

    std::size_t n_within = 0, n_flagged = 0, n_failed_unflagged = 0;
};

namespace detail {

inline double rel_err(double computed, double published) {
    const double den = std::max(std::abs(published), 1e-300);
    return std::abs(computed - published) / den;
}

inline VerifyRow make_row(std::string name, double computed, double published,
                          double tol) {
    VerifyRow r;
    r.name = std::move(name);
    r.computed = computed;
    r.published = published;
    r.tol = tol;
    r.rel_err = rel_err(computed, published);
    r.within = r.rel_err <= tol;
    return r;
}

inline CaseAnalysis analyze_case(const LinearizationCoeffs& lin, KernelKind kind) {
    CaseAnalysis ca;
    if (kind == KernelKind::Discrete) {
        // tau2 is fixed by the reference configuration; the crossing fixes
        // the total delay and tau1 absorbs the rest.
        KernelSpec probe = KernelSpec::discrete(1.0, reference::case1_tau2);
        const HopfPoint hp = first_crossing(lin, probe);
        ca.kernel = KernelSpec::discrete(hp.tau - reference::case1_tau2,
                                         reference::case1_tau2);
        ca.hopf = hp;
    } else {
        KernelSpec probe = KernelSpec::weak(1.0, reference::case2_q2);
        const HopfPoint hp = first_crossing(lin, probe);
        ca.kernel = KernelSpec::weak(hp.tau, reference::case2_q2);
        ca.hopf = hp;
    }
    ca.crossing_residual_abs = std::abs(
        char_delta1(lin, ca.kernel, cplx(0.0, ca.hopf.omega)));
    ca.nf = compute_normal_form(lin, ca.kernel, ca.hopf);
    return ca;
}

inline ArbiterCase run_arbiter(const Params& p, const LinearizationCoeffs& lin,
                               KernelKind kind, double tau_crit, double omega) {
    // Protocol constants: long enough past the transient to see the envelope
    // direction at +-10% delay offsets. The saturation run at +5% must outlast
    // the 1/(2 Re lambda) envelope timescale (about 750 here) by a wide margin
    // so the analysis window sits on the limit-cycle plateau.
    const double step = 0.05;
    const double horizon_trend = 900.0;
    const double horizon_sat = 15000.0;
    const double perturb = 0.05;
    const std::size_t comp = 1; // y1

    ArbiterCase a;
    a.kernel = kind == KernelKind::Discrete ? "discrete" : "weak";
    a.tau_crit = tau_crit;
    a.omega = omega;
    const HistorySpec hist = HistorySpec::at_equilibrium({0.0, perturb, 0.0, 0.0});

    auto simulate = [&](double tau_total, double horizon) {
        if (kind == KernelKind::Discrete) {
            const double tau1 = tau_total - reference::case1_tau2;
            return simulate_discrete(p, tau1, reference::case1_tau2, hist, horizon,
                                     step);
        }
        return simulate_weak_chain(p, tau_total, reference::case2_q2, hist, horizon,
                                   step);
    };
    auto kernel_at = [&](double tau_total) {
        return kind == KernelKind::Discrete
                   ? KernelSpec::discrete(tau_total - reference::case1_tau2,
                                          reference::case1_tau2)
                   : KernelSpec::weak(tau_total, reference::case2_q2);
    };

    OscillationOptions opt;
    opt.transient_fraction = 0.5;

    const OscillationMetrics below =
        oscillation_metrics(simulate(0.9 * tau_crit, horizon_trend), comp, opt);
    a.trend_below = below.trend;

    const OscillationMetrics above =
        oscillation_metrics(simulate(1.1 * tau_crit, horizon_trend), comp, opt);
    a.trend_above = above.trend;
    a.period_above = above.period;

    const cplx dom = dominant_root(lin, kernel_at(1.1 * tau_crit));
    a.period_scan = 2.0 * M_PI / dom.imag();
    a.period_rel_err = rel_err(a.period_above, a.period_scan);
    a.period_onset = 2.0 * M_PI / omega;
    a.period_onset_rel_err = rel_err(a.period_above, a.period_onset);

    const OscillationMetrics sat =
        oscillation_metrics(simulate(1.05 * tau_crit, horizon_sat), comp, opt);
    a.sat_ratio = sat.amplitude_ratio;
    a.trend_sat = sat.trend;

    a.confirms = a.trend_below == Trend::Decaying &&
                 (a.trend_above == Trend::Growing ||
                  a.trend_above == Trend::Sustained) &&
                 a.period_rel_err < 0.05 && a.trend_sat == Trend::Sustained;
    return a;
}

} // namespace detail

// End-to-end audit. Two linearization chains run side by side:
//   reference chain: linearized about the published equilibrium tuple, the
//     basis on which the published crossing and normal-form values were
//     produced; rows compare against it like-for-like.
//   computed chain: linearized about the artifact's own equilibrium; it
//     drives the simulations, which integrate the true nonlinear model and
//     therefore can only see the computed equilibrium's dynamics.
inline VerificationReport build_verification_report(const Params& p = Params{}) {
    VerificationReport rep;
    rep.params = p;

    rep.eq = solve_equilibrium(p);
    rep.eq_residual = equilibrium_residual_max(p, rep.eq);
    const State4 ref_tuple{reference::x10, reference::y10, reference::x20,
                           reference::y20};
    rep.ref_tuple_residual = equilibrium_residual_max(p, ref_tuple);

    const LinearizationCoeffs lin_ref = linearize(p, ref_tuple);
    const LinearizationCoeffs lin_comp = linearize(p, rep.eq);

    rep.ref_case1 = detail::analyze_case(lin_ref, KernelKind::Discrete);
    rep.ref_case2 = detail::analyze_case(lin_ref, KernelKind::Weak);
    rep.comp_case1 = detail::analyze_case(lin_comp, KernelKind::Discrete);
    rep.comp_case2 = detail::analyze_case(lin_comp, KernelKind::Weak);

    rep.arb_discrete =
        detail::run_arbiter(p, lin_comp, KernelKind::Discrete,
                            rep.comp_case1.hopf.tau, rep.comp_case1.hopf.omega);
    rep.arb_weak = detail::run_arbiter(p, lin_comp, KernelKind::Weak,
                                       rep.comp_case2.hopf.tau,
                                       rep.comp_case2.hopf.omega);
    rep.classification_confirmed =
        rep.arb_discrete.confirms && rep.arb_weak.confirms;

    const std::string verdict_cls =
        rep.classification_confirmed
            ? "simulation confirms the computed classification: decaying below "
              "the critical delay, oscillating above it, saturating to a "
              "bounded orbit at +5% (supercritical, stable, period increasing)"
            : "simulation did NOT confirm the computed classification";
    const std::string note_eq =
        "reference tuple leaves steady-state residual " +
        format_double(rep.ref_tuple_residual) +
        " in the activation equation; the computed tuple is consistent at " +
        format_double(rep.eq_residual);
    const std::string note_tau10 =
        "reference delay sits half an oscillation period past the first "
        "crossing: |Delta1| there is " +
        format_double(std::abs(char_delta1(
            lin_ref, KernelSpec::weak(reference::case2_tau10, reference::case2_q2),
            cplx(0.0, rep.ref_case2.hopf.omega)))) +
        " versus " + format_double(rep.ref_case2.crossing_residual_abs) +
        " at the computed crossing";
    const std::string note_nf =
        "computed coefficients satisfy beta2 = -2 mu2 Re(lambda') exactly; the "
        "reference (mu2, beta2) pair violates it for every transversal "
        "crossing with Re(lambda') > 0";

    auto add = [&](VerifyRow r, bool flag_known, const std::string& note,
                   const std::string& verdict) {
        if (!r.within && flag_known) {
            r.flagged = true;
            r.note = note;
            r.verdict = verdict;
        }
        rep.rows.push_back(std::move(r));
    };

    add(detail::make_row("equilibrium.x10", rep.eq.x1, reference::x10,
                         kTolEquilibrium),
        false, "", "");
    add(detail::make_row("equilibrium.y10", rep.eq.y1, reference::y10,
                         kTolEquilibrium),
        true, note_eq, verdict_cls);
    add(detail::make_row("equilibrium.x20", rep.eq.x2, reference::x20,
                         kTolEquilibrium),
        true, note_eq, verdict_cls);
    add(detail::make_row("equilibrium.y20", rep.eq.y2, reference::y20,
                         kTolEquilibrium),
        true, note_eq, verdict_cls);

    add(detail::make_row("case1.omega", rep.ref_case1.hopf.omega,
                         reference::case1_omega, kTolCrossing),
        false, "", "");
    add(detail::make_row("case1.tau0", rep.ref_case1.hopf.tau,
                         reference::case1_tau0, kTolCrossing),
        false, "", "");
    add(detail::make_row("case1.mu2", rep.ref_case1.nf.mu2, reference::case1_mu2,
                         kTolNormalForm),
        true, note_nf, verdict_cls);
    add(detail::make_row("case1.beta2", rep.ref_case1.nf.beta2,
                         reference::case1_beta2, kTolNormalForm),
        true, note_nf, verdict_cls);
    add(detail::make_row("case1.T2", rep.ref_case1.nf.T2, reference::case1_T2,
                         kTolNormalForm),
        true, note_nf, verdict_cls);

    add(detail::make_row("case2.omega", rep.ref_case2.hopf.omega,
                         reference::case2_omega, kTolCrossing),
        false, "", "");
    add(detail::make_row("case2.tau10", rep.ref_case2.hopf.tau,
                         reference::case2_tau10, kTolCrossing),
        true, note_tau10,
        "the computed crossing satisfies the characteristic equation; the "
        "reference value does not");
    add(detail::make_row("case2.mu2", rep.ref_case2.nf.mu2, reference::case2_mu2,
                         kTolNormalForm),
        true, note_nf, verdict_cls);
    add(detail::make_row("case2.beta2", rep.ref_case2.nf.beta2,
                         reference::case2_beta2, kTolNormalForm),
        true, note_nf, verdict_cls);
    add(detail::make_row("case2.T2", rep.ref_case2.nf.T2, reference::case2_T2,
                         kTolNormalForm),
        true, note_nf, verdict_cls);

    for (const VerifyRow& r : rep.rows) {
        if (r.within) ++rep.n_within;
        else if (r.flagged) ++rep.n_flagged;
        else ++rep.n_failed_unflagged;
    }
    return rep;
}

namespace detail {

inline Json case_json(const CaseAnalysis& ca) {
    Json j = Json::object();
    j.set("kind", Json::str(ca.kernel.kind == KernelKind::Discrete ? "discrete"
                                                                   : "weak"));
    j.set("tau1", Json::number(ca.kernel.tau1));
    if (ca.kernel.kind == KernelKind::Discrete)
        j.set("tau2", Json::number(ca.kernel.tau2));
    else
        j.set("q2", Json::number(ca.kernel.q2));
    j.set("omega", Json::number(ca.hopf.omega));
    j.set("tau_crit", Json::number(ca.hopf.tau));
    j.set("crossing_residual_abs", Json::number(ca.crossing_residual_abs));
    j.set("dlambda_dtau", Json::complex(ca.hopf.dlambda));
    Json nf = Json::object();
    nf.set("g20", Json::complex(ca.nf.g20));
    nf.set("g11", Json::complex(ca.nf.g11));
    nf.set("g02", Json::complex(ca.nf.g02));
    nf.set("g21", Json::complex(ca.nf.g21));
    nf.set("g21_variant", Json::complex(ca.nf.g21_variant));
    nf.set("C1", Json::complex(ca.nf.C1));
    nf.set("mu2", Json::number(ca.nf.mu2));
    nf.set("beta2", Json::number(ca.nf.beta2));
    nf.set("T2", Json::number(ca.nf.T2));
    j.set("normal_form", std::move(nf));
    return j;
}

inline Json arbiter_json(const ArbiterCase& a) {
    Json j = Json::object();
    j.set("kernel", Json::str(a.kernel));
    j.set("tau_crit", Json::number(a.tau_crit));
    j.set("omega", Json::number(a.omega));
    j.set("trend_at_0.9", Json::str(trend_name(a.trend_below)));
    j.set("trend_at_1.1", Json::str(trend_name(a.trend_above)));
    j.set("period_at_1.1", Json::number(a.period_above));
    j.set("period_root_scan", Json::number(a.period_scan));
    j.set("period_rel_err_vs_scan", Json::number(a.period_rel_err));
    j.set("period_onset", Json::number(a.period_onset));
    j.set("period_rel_err_vs_onset", Json::number(a.period_onset_rel_err));
    j.set("trend_at_1.05_long", Json::str(trend_name(a.trend_sat)));
    j.set("amplitude_ratio_at_1.05_long", Json::number(a.sat_ratio));
    j.set("confirms", Json::boolean(a.confirms));
    return j;
}

} // namespace detail

inline Json verification_report_json(const VerificationReport& rep) {
    Json root = Json::object();

    Json prm = Json::object();
    prm.set("a1", Json::number(rep.params.a1));
    prm.set("a2", Json::number(rep.params.a2));
    prm.set("b1", Json::number(rep.params.b1));
    prm.set("b2", Json::number(rep.params.b2));
    prm.set("b12", Json::number(rep.params.b12));
    prm.set("c2", Json::number(rep.params.c2));
    prm.set("d2", Json::number(rep.params.d2));
    prm.set("d12", Json::number(rep.params.d12));
    prm.set("a", Json::number(rep.params.a));
    prm.set("n", Json::integer(rep.params.n));
    root.set("params", std::move(prm));

    Json eq = Json::object();
    eq.set("x10", Json::number(rep.eq.x1));
    eq.set("y10", Json::number(rep.eq.y1));
    eq.set("x20", Json::number(rep.eq.x2));
    eq.set("y20", Json::number(rep.eq.y2));
    eq.set("residual", Json::number(rep.eq_residual));
    eq.set("reference_tuple_residual", Json::number(rep.ref_tuple_residual));
    root.set("equilibrium", std::move(eq));

    Json ref = Json::object();
    ref.set("case1", detail::case_json(rep.ref_case1));
    ref.set("case2", detail::case_json(rep.ref_case2));
    root.set("reference_chain", std::move(ref));

    Json comp = Json::object();
    comp.set("case1", detail::case_json(rep.comp_case1));
    comp.set("case2", detail::case_json(rep.comp_case2));
    root.set("computed_chain", std::move(comp));

    Json rows = Json::array();
    for (const VerifyRow& r : rep.rows) {
        Json jr = Json::object();
        jr.set("name", Json::str(r.name));
        jr.set("computed", Json::number(r.computed));
        jr.set("published", Json::number(r.published));
        jr.set("rel_err", Json::number(r.rel_err));
        jr.set("tol", Json::number(r.tol));
        jr.set("within", Json::boolean(r.within));
        jr.set("flagged", Json::boolean(r.flagged));
        if (!r.verdict.empty()) jr.set("verdict", Json::str(r.verdict));
        if (!r.note.empty()) jr.set("note", Json::str(r.note));
        rows.push(std::move(jr));
    }
    root.set("rows", std::move(rows));

    Json arb = Json::object();
    arb.set("discrete", detail::arbiter_json(rep.arb_discrete));
    arb.set("weak", detail::arbiter_json(rep.arb_weak));
    arb.set("classification_confirmed",
            Json::boolean(rep.classification_confirmed));
    root.set("arbiter", std::move(arb));

    Json sum = Json::object();
    sum.set("rows_within", Json::integer(static_cast<long long>(rep.n_within)));
    sum.set("rows_flagged", Json::integer(static_cast<long long>(rep.n_flagged)));
    sum.set("rows_failed_unflagged",
            Json::integer(static_cast<long long>(rep.n_failed_unflagged)));
    root.set("summary", std::move(sum));
    return root;
}

inline std::string verification_report_text(const VerificationReport& rep) {
    std::string out;
    out += "verification against bundled reference values\n";
    out += "=============================================\n\n";
    out += "computed equilibrium: x10=" + format_double(rep.eq.x1) +
           " y10=" + format_double(rep.eq.y1) + " x20=" + format_double(rep.eq.x2) +
           " y20=" + format_double(rep.eq.y2) +
           "  (residual " + format_double(rep.eq_residual) + ")\n";
    out += "reference tuple residual: " + format_double(rep.ref_tuple_residual) +
           "\n\n";
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    out += pad("row", 18) + pad("computed", 26) + pad("published", 26) +
           pad("rel_err", 14) + "status\n";
    for (const VerifyRow& r : rep.rows) {
        std::string status = r.within ? "ok" : (r.flagged ? "FLAGGED" : "FAIL");
        out += pad(r.name, 18) + pad(format_double(r.computed), 26) +
               pad(format_double(r.published), 26) +
               pad(format_brief(r.rel_err), 14) + status + "\n";
    }
    std::vector<std::pair<std::string, std::string>> notes; // note -> row list
    for (const VerifyRow& r : rep.rows) {
        if (r.note.empty()) continue;
        auto it = std::find_if(notes.begin(), notes.end(),
                               [&](const auto& n) { return n.first == r.note; });
        if (it == notes.end()) notes.emplace_back(r.note, r.name);
        else it->second += ", " + r.name;
    }
    if (!notes.empty()) {
        out += "\nflagged row notes:\n";
        for (const auto& [note, rows] : notes)
            out += "  " + rows + ":\n    " + note + "\n";
    }

    out += "\narbiter (simulation at the computed-chain critical delays):\n";
    for (const ArbiterCase* a : {&rep.arb_discrete, &rep.arb_weak}) {
        out += "  [" + a->kernel + "] tau_crit=" + format_double(a->tau_crit) +
               "  0.9x: " + trend_name(a->trend_below) +
               "  1.1x: " + trend_name(a->trend_above) +
               "  period=" + format_double(a->period_above) +
               " (vs root scan " + format_double(a->period_scan) + ", rel " +
               format_double(a->period_rel_err) + "; vs onset " +
               format_double(a->period_onset) + ", rel " +
               format_double(a->period_onset_rel_err) + ")\n";
        out += "    1.05x long horizon: " + std::string(trend_name(a->trend_sat)) +
               ", amplitude ratio " + format_double(a->sat_ratio) +
               (a->confirms ? "  -> confirms" : "  -> DOES NOT confirm") + "\n";
    }
    out += std::string("classification confirmed: ") +
           (rep.classification_confirmed ? "yes" : "no") + "\n";
    return out;
}

} // namespace p53dde
