#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "p53dde/verify.hpp"

using namespace p53dde;
using Catch::Matchers::ContainsSubstring;

namespace {

// The report drives four analyses plus six long simulations; build it once
// for the whole binary.
const VerificationReport& report() {
    static const VerificationReport rep = build_verification_report();
    return rep;
}

const VerifyRow& row(const std::string& name) {
    for (const VerifyRow& r : report().rows)
        if (r.name == name) return r;
    FAIL("missing row " + name);
    static VerifyRow dummy;
    return dummy;
}

} // namespace

TEST_CASE("report audits all fourteen published values") {
    const VerificationReport& rep = report();
    const std::vector<std::string> names = {
        "equilibrium.x10", "equilibrium.y10", "equilibrium.x20",
        "equilibrium.y20", "case1.omega",     "case1.tau0",
        "case1.mu2",       "case1.beta2",     "case1.T2",
        "case2.omega",     "case2.tau10",     "case2.mu2",
        "case2.beta2",     "case2.T2"};
    REQUIRE(rep.rows.size() == names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
        CHECK(rep.rows[i].name == names[i]);

    // Every row is either within tolerance or flagged with evidence; nothing
    // fails silently.
    CHECK(rep.n_within == 4);
    CHECK(rep.n_flagged == 10);
    CHECK(rep.n_failed_unflagged == 0);
    for (const VerifyRow& r : rep.rows) {
        CAPTURE(r.name);
        CHECK((r.within || r.flagged));
        if (r.flagged) {
            CHECK_FALSE(r.note.empty());
            CHECK_FALSE(r.verdict.empty());
        }
    }
}

TEST_CASE("agreeing and disagreeing rows split as expected") {
    CHECK(row("equilibrium.x10").within);
    CHECK(row("case1.omega").within);
    CHECK(row("case1.tau0").within);
    CHECK(row("case2.omega").within);

    for (const char* n : {"equilibrium.y10", "equilibrium.x20", "equilibrium.y20",
                          "case1.mu2", "case1.beta2", "case1.T2", "case2.tau10",
                          "case2.mu2", "case2.beta2", "case2.T2"}) {
        CAPTURE(n);
        CHECK_FALSE(row(n).within);
        CHECK(row(n).flagged);
    }

    // The reference tuple is not a steady state of the model while the
    // computed one is; both residuals are attached to the report.
    CHECK(report().ref_tuple_residual > 0.01);
    CHECK(report().eq_residual < 1e-12);
}

TEST_CASE("rows quote the published constants and the computed chain") {
    const VerificationReport& rep = report();
    CHECK(row("equilibrium.x10").published == reference::x10);
    CHECK(row("equilibrium.y10").published == reference::y10);
    CHECK(row("case1.omega").published == reference::case1_omega);
    CHECK(row("case1.tau0").published == reference::case1_tau0);
    CHECK(row("case1.mu2").published == reference::case1_mu2);
    CHECK(row("case1.beta2").published == reference::case1_beta2);
    CHECK(row("case1.T2").published == reference::case1_T2);
    CHECK(row("case2.omega").published == reference::case2_omega);
    CHECK(row("case2.tau10").published == reference::case2_tau10);
    CHECK(row("case2.mu2").published == reference::case2_mu2);
    CHECK(row("case2.beta2").published == reference::case2_beta2);
    CHECK(row("case2.T2").published == reference::case2_T2);

    CHECK(row("equilibrium.x10").computed == rep.eq.x1);
    CHECK(row("equilibrium.y10").computed == rep.eq.y1);
    CHECK(row("case1.omega").computed == rep.ref_case1.hopf.omega);
    CHECK(row("case1.tau0").computed == rep.ref_case1.hopf.tau);
    CHECK(row("case1.mu2").computed == rep.ref_case1.nf.mu2);
    CHECK(row("case2.tau10").computed == rep.ref_case2.hopf.tau);
    CHECK(row("case2.T2").computed == rep.ref_case2.nf.T2);

    // The crossings that anchor the agreeing rows satisfy the
    // characteristic equation to roundoff.
    CHECK(rep.ref_case1.crossing_residual_abs < 1e-9);
    CHECK(rep.ref_case2.crossing_residual_abs < 1e-9);
    CHECK(rep.comp_case1.crossing_residual_abs < 1e-9);
    CHECK(rep.comp_case2.crossing_residual_abs < 1e-9);
}

TEST_CASE("simulation arbiter confirms the computed classification") {
    const VerificationReport& rep = report();
    for (const ArbiterCase* a : {&rep.arb_discrete, &rep.arb_weak}) {
        CAPTURE(a->kernel);
        CHECK(a->trend_below == Trend::Decaying);
        CHECK((a->trend_above == Trend::Growing ||
               a->trend_above == Trend::Sustained));
        CHECK(a->trend_sat == Trend::Sustained);
        CHECK(a->period_rel_err < 0.05);
        CHECK(a->confirms);
    }
    CHECK(rep.classification_confirmed);

    // Saturation at +5% sits inside the sustained band: bounded orbit, not
    // an exponential blow-up.
    CHECK(rep.arb_discrete.sat_ratio < kGrowthRatioMin);
    CHECK(rep.arb_weak.sat_ratio < kGrowthRatioMin);
    CHECK(rep.arb_discrete.sat_ratio > kDecayRatioMax);
    CHECK(rep.arb_weak.sat_ratio > kDecayRatioMax);
}

TEST_CASE("report serializations are deterministic and complete") {
    const VerificationReport& rep = report();
    const std::string j1 = verification_report_json(rep).dump();
    const std::string j2 = verification_report_json(rep).dump();
    CHECK(j1 == j2);
    for (const char* key :
         {"params", "equilibrium", "reference_chain", "computed_chain", "rows",
          "arbiter", "summary", "rows_within", "rows_flagged",
          "rows_failed_unflagged", "classification_confirmed", "normal_form",
          "g21_variant", "period_root_scan"}) {
        CAPTURE(key);
        CHECK_THAT(j1, ContainsSubstring(std::string("\"") + key + "\""));
    }

    const std::string text = verification_report_text(rep);
    CHECK_THAT(text, ContainsSubstring("FLAGGED"));
    CHECK_THAT(text, ContainsSubstring("ok"));
    CHECK_THAT(text, ContainsSubstring("-> confirms"));
    CHECK_THAT(text, ContainsSubstring("classification confirmed: yes"));
    CHECK_THAT(text, !ContainsSubstring("FAIL"));
    CHECK_THAT(text, !ContainsSubstring("DOES NOT"));
}
