#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "p53dde/dde_sim.hpp"
#include "p53dde/equilibrium.hpp"
#include "p53dde/errors.hpp"
#include "p53dde/io.hpp"
#include "p53dde/linearization.hpp"
#include "p53dde/metrics.hpp"
#include "p53dde/normal_form.hpp"
#include "p53dde/params.hpp"
#include "p53dde/spectral.hpp"
#include "p53dde/verify.hpp"

namespace {

using namespace p53dde;

// Exit codes: 0 success, 1 usage or I/O, 2 no positive equilibrium,
// 3 no Hopf point, 4 numerical degeneracy.
int run_guarded(const std::function<void()>& fn) {
    try {
        fn();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NoEquilibriumError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NoHopfError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateCrossingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ResonanceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InconsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

struct CommonOpts {
    std::string params_file;
    std::size_t root_index = 0;

    Params load() const {
        Params p;
        if (!params_file.empty())
            p = params_from_config_text(read_text_file(params_file));
        p.validate();
        return p;
    }
};

struct KernelOpts {
    std::string kernel = "discrete";
    double tau1 = 0.0;
    double tau2 = reference::case1_tau2;
    double q2 = reference::case2_q2;

    KernelKind kind() const {
        if (kernel == "discrete") return KernelKind::Discrete;
        if (kernel == "weak") return KernelKind::Weak;
        throw ConfigError("unknown kernel: " + kernel +
                          " (expected discrete or weak)");
    }
    KernelSpec spec() const {
        return kind() == KernelKind::Discrete ? KernelSpec::discrete(tau1, tau2)
                                              : KernelSpec::weak(tau1, q2);
    }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--params", o.params_file,
                    "flat key = value parameter file (defaults built in)");
    cmd->add_option("--root-index", o.root_index,
                    "equilibrium root selector (ascending y1 order)");
}

Json params_json(const Params& p) {
    Json j = Json::object();
    j.set("a1", Json::number(p.a1));
    j.set("a2", Json::number(p.a2));
    j.set("b1", Json::number(p.b1));
    j.set("b2", Json::number(p.b2));
    j.set("b12", Json::number(p.b12));
    j.set("c2", Json::number(p.c2));
    j.set("d2", Json::number(p.d2));
    j.set("d12", Json::number(p.d12));
    j.set("a", Json::number(p.a));
    j.set("n", Json::integer(p.n));
    return j;
}

Json state_json(const State4& s) {
    Json j = Json::object();
    j.set("x1", Json::number(s.x1));
    j.set("y1", Json::number(s.y1));
    j.set("x2", Json::number(s.x2));
    j.set("y2", Json::number(s.y2));
    return j;
}

Json kernel_json(const KernelSpec& k) {
    Json j = Json::object();
    j.set("kind",
          Json::str(k.kind == KernelKind::Discrete ? "discrete" : "weak"));
    j.set("tau1", Json::number(k.tau1));
    if (k.kind == KernelKind::Discrete) j.set("tau2", Json::number(k.tau2));
    else j.set("q2", Json::number(k.q2));
    return j;
}

Json hopf_json(const HopfPoint& h) {
    Json j = Json::object();
    j.set("omega", Json::number(h.omega));
    j.set("tau", Json::number(h.tau));
    j.set("branch", Json::integer(h.branch));
    j.set("z", Json::number(h.z));
    j.set("simple", Json::boolean(h.simple));
    j.set("dlambda_dtau", Json::complex(h.dlambda));
    j.set("residual_rel", Json::number(h.residual));
    return j;
}

Json nf_json(const NormalFormSummary& n) {
    Json j = Json::object();
    j.set("kernel", kernel_json(n.kernel));
    j.set("omega", Json::number(n.omega));
    j.set("lambda1", Json::complex(n.lambda1));
    j.set("dlambda_dtau", Json::complex(n.dlambda));
    j.set("v", Json::complex_array(n.v));
    j.set("w", Json::complex_array(n.w));
    j.set("eta", Json::complex(n.eta));
    j.set("g20", Json::complex(n.g20));
    j.set("g11", Json::complex(n.g11));
    j.set("g02", Json::complex(n.g02));
    j.set("g21", Json::complex(n.g21));
    j.set("g21_variant", Json::complex(n.g21_variant));
    j.set("E1", Json::complex_array(n.E1));
    j.set("E2", Json::complex_array(n.E2));
    j.set("C1", Json::complex(n.C1));
    j.set("mu2", Json::number(n.mu2));
    j.set("beta2", Json::number(n.beta2));
    j.set("T2", Json::number(n.T2));
    Json d = Json::object();
    d.set("res_v", Json::number(n.res_v));
    d.set("res_w", Json::number(n.res_w));
    d.set("pairing_error", Json::number(n.pairing_error));
    d.set("orthogonality", Json::number(n.orthogonality));
    d.set("bc20", Json::number(n.bc20));
    d.set("bc11", Json::number(n.bc11));
    j.set("diagnostics", std::move(d));
    return j;
}

Json metrics_json(const OscillationMetrics& m) {
    Json j = Json::object();
    j.set("trend", Json::str(trend_name(m.trend)));
    j.set("oscillating", Json::boolean(m.oscillating));
    j.set("n_peaks", Json::integer(static_cast<long long>(m.peak_times.size())));
    j.set("period", Json::number(m.period));
    j.set("amplitude", Json::number(m.amplitude));
    j.set("amplitude_ratio", Json::number(m.amplitude_ratio));
    j.set("baseline", Json::number(m.baseline));
    return j;
}

// The expansion point for linearization: the artifact's computed
// equilibrium, or the bundled reference tuple (the basis of the published
// analysis).
State4 expansion_point(const Params& p, const std::string& about,
                       std::size_t root_index) {
    if (about == "computed") return solve_equilibrium(p, root_index);
    if (about == "reference")
        return State4{reference::x10, reference::y10, reference::x20,
                      reference::y20};
    throw ConfigError("unknown --about value: " + about +
                      " (expected computed or reference)");
}

std::string plot_script(const std::string& csv_name, std::size_t dim) {
    std::string s;
    s += "# line plot of the trajectory columns; run: gnuplot <this file>\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set xlabel 't'\n";
    s += "set terminal pngcairo size 1200,700\n";
    s += "set output 'trajectory.png'\n";
    s += "plot '" + csv_name + "' using 1:2 with lines";
    for (std::size_t c = 3; c <= dim + 1; ++c)
        s += ", '' using 1:" + format_int(static_cast<long long>(c)) +
             " with lines";
    s += "\n";
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "delayed feedback model toolkit: equilibrium, stability, Hopf "
        "crossings, normal form, and direct DDE simulation"};
    app.require_subcommand(1);

    // ---- equilibrium ----
    CommonOpts eq_o;
    auto* eq_cmd = app.add_subcommand(
        "equilibrium", "solve for all positive equilibria and print them");
    add_common(eq_cmd, eq_o);

    // ---- hopf ----
    CommonOpts hopf_o;
    KernelOpts hopf_k;
    std::string hopf_about = "computed";
    int hopf_branches = 3;
    auto* hopf_cmd = app.add_subcommand(
        "hopf", "zero-delay stability, critical delays, and transversality");
    add_common(hopf_cmd, hopf_o);
    hopf_cmd->add_option("--kernel", hopf_k.kernel, "discrete | weak")
        ->capture_default_str();
    hopf_cmd->add_option("--tau2", hopf_k.tau2,
                         "relay-leg delay (discrete kernel)")
        ->capture_default_str();
    hopf_cmd->add_option("--q2", hopf_k.q2, "weak-kernel rate")
        ->capture_default_str();
    hopf_cmd->add_option("--about", hopf_about, "computed | reference")
        ->capture_default_str();
    hopf_cmd->add_option("--branches", hopf_branches,
                         "number of delay branches per root to list")
        ->capture_default_str();

    // ---- normalform ----
    CommonOpts nf_o;
    KernelOpts nf_k;
    std::string nf_about = "computed";
    auto* nf_cmd = app.add_subcommand(
        "normalform",
        "center-manifold coefficients and bifurcation classification at the "
        "first crossing");
    add_common(nf_cmd, nf_o);
    nf_cmd->add_option("--kernel", nf_k.kernel, "discrete | weak")
        ->capture_default_str();
    nf_cmd->add_option("--tau2", nf_k.tau2, "relay-leg delay (discrete kernel)")
        ->capture_default_str();
    nf_cmd->add_option("--q2", nf_k.q2, "weak-kernel rate")
        ->capture_default_str();
    nf_cmd->add_option("--about", nf_about, "computed | reference")
        ->capture_default_str();

    // ---- simulate ----
    CommonOpts sim_o;
    KernelOpts sim_k;
    double sim_horizon = 200.0, sim_step = 0.01, sim_perturb = 0.0;
    std::vector<double> sim_hist;
    std::string sim_out = ".";
    std::string sim_integrator = "chain";
    bool sim_no_plot = false;
    auto* sim_cmd =
        app.add_subcommand("simulate", "integrate the model and classify the "
                                       "oscillation; writes CSV + plot script");
    add_common(sim_cmd, sim_o);
    sim_cmd->add_option("--kernel", sim_k.kernel, "discrete | weak")
        ->capture_default_str();
    sim_cmd->add_option("--tau1", sim_k.tau1, "activation-leg delay")
        ->required();
    sim_cmd->add_option("--tau2", sim_k.tau2, "relay-leg delay (discrete kernel)")
        ->capture_default_str();
    sim_cmd->add_option("--q2", sim_k.q2, "weak-kernel rate")
        ->capture_default_str();
    sim_cmd->add_option("--horizon", sim_horizon, "integration horizon")
        ->capture_default_str();
    sim_cmd->add_option("--step", sim_step, "output step")
        ->capture_default_str();
    sim_cmd->add_option("--perturb", sim_perturb,
                        "y1 offset from equilibrium in the constant history")
        ->capture_default_str();
    sim_cmd->add_option("--history-constant", sim_hist,
                        "constant history as four values x1 y1 x2 y2 "
                        "(overrides --perturb)")
        ->expected(4);
    sim_cmd->add_option("--integrator", sim_integrator,
                        "weak kernel integrator: chain | quadrature")
        ->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "output directory")
        ->capture_default_str();
    sim_cmd->add_flag("--no-plot", sim_no_plot, "skip the plot script");

    // ---- sweep ----
    CommonOpts sw_o;
    KernelOpts sw_k;
    double sw_lo = 0.0, sw_hi = 0.0;
    int sw_points = 6;
    double sw_horizon = 3000.0, sw_step = 0.05, sw_perturb = 0.05;
    auto* sw_cmd = app.add_subcommand(
        "sweep", "delay sweep with square-amplitude onset regression");
    add_common(sw_cmd, sw_o);
    sw_cmd->add_option("--kernel", sw_k.kernel, "discrete | weak")
        ->capture_default_str();
    sw_cmd->add_option("--tau2", sw_k.tau2, "relay-leg delay (discrete kernel)")
        ->capture_default_str();
    sw_cmd->add_option("--q2", sw_k.q2, "weak-kernel rate")
        ->capture_default_str();
    sw_cmd->add_option("--tau-min", sw_lo, "smallest total delay")->required();
    sw_cmd->add_option("--tau-max", sw_hi, "largest total delay")->required();
    sw_cmd->add_option("--points", sw_points, "grid size (>= 6)")
        ->capture_default_str();
    sw_cmd->add_option("--horizon", sw_horizon, "horizon per grid point")
        ->capture_default_str();
    sw_cmd->add_option("--step", sw_step, "output step")->capture_default_str();
    sw_cmd->add_option("--perturb", sw_perturb, "y1 history offset")
        ->capture_default_str();

    // ---- verify-reference ----
    std::string ver_out;
    bool ver_json = false;
    auto* ver_cmd = app.add_subcommand(
        "verify-reference",
        "re-derive every bundled reference value, compare, and attach "
        "simulation arbiter verdicts to flagged rows");
    ver_cmd->add_flag("--json", ver_json, "emit JSON instead of text");
    ver_cmd->add_option("--out", ver_out,
                        "directory to also write verification.json into");

    CLI11_PARSE(app, argc, argv);

    if (eq_cmd->parsed()) {
        return run_guarded([&] {
            const Params p = eq_o.load();
            const EquilibriumSet set = solve_equilibria(p);
            if (eq_o.root_index >= set.roots.size())
                throw ConfigError("root-index out of range: " +
                                  std::to_string(set.roots.size()) +
                                  " root(s) exist");
            std::string txt;
            txt += "idx  x1                        y1                        "
                   "x2                        y2\n";
            for (std::size_t i = 0; i < set.roots.size(); ++i) {
                const State4& s = set.roots[i];
                auto pad = [](std::string v) {
                    if (v.size() < 26) v.append(26 - v.size(), ' ');
                    return v;
                };
                txt += format_int(static_cast<long long>(i)) +
                       (i == set.principal ? "*   " : "    ") +
                       pad(format_double(s.x1)) + pad(format_double(s.y1)) +
                       pad(format_double(s.x2)) + format_double(s.y2) + "\n";
            }
            txt += "(* principal root, smallest y1)\n\n";
            Json j = Json::object();
            j.set("params", params_json(p));
            Json roots = Json::array();
            for (const State4& s : set.roots) {
                Json r = state_json(s);
                r.set("residual", Json::number(equilibrium_residual_max(p, s)));
                roots.push(std::move(r));
            }
            j.set("roots", std::move(roots));
            j.set("principal",
                  Json::integer(static_cast<long long>(set.principal)));
            j.set("selected",
                  Json::integer(static_cast<long long>(eq_o.root_index)));
            std::cout << txt << j.dump();
        });
    }

    if (hopf_cmd->parsed()) {
        return run_guarded([&] {
            const Params p = hopf_o.load();
            const State4 about = expansion_point(p, hopf_about, hopf_o.root_index);
            const LinearizationCoeffs lin = linearize(p, about);
            KernelOpts k = hopf_k;
            k.tau1 = 1.0; // placeholder, crossings ignore tau1
            const KernelSpec probe = k.spec();
            const ZeroDelayStability zd = zero_delay_stability(lin, probe);
            const std::vector<HopfPoint> pts =
                crossings(lin, probe, std::max(0, hopf_branches - 1));
            const HopfPoint first = first_crossing(lin, probe);

            Json j = Json::object();
            j.set("params", params_json(p));
            j.set("about", state_json(about));
            Json lc = Json::object();
            lc.set("p2", Json::number(lin.p2));
            lc.set("p1", Json::number(lin.p1));
            lc.set("p0", Json::number(lin.p0));
            lc.set("r", Json::number(lin.r));
            lc.set("B", Json::number(lin.B));
            lc.set("rho", Json::number(lin.rho));
            j.set("linearization", std::move(lc));
            Json zj = Json::object();
            zj.set("stable", Json::boolean(zd.stable));
            zj.set("margins", Json::number_array(zd.margins));
            zj.set("max_re_root", Json::number(zd.max_re_root));
            j.set("zero_delay", std::move(zj));
            Json arr = Json::array();
            for (const HopfPoint& h : pts) arr.push(hopf_json(h));
            j.set("crossings", std::move(arr));
            j.set("first_crossing", hopf_json(first));
            std::cout << j.dump();
        });
    }

    if (nf_cmd->parsed()) {
        return run_guarded([&] {
            const Params p = nf_o.load();
            const State4 about = expansion_point(p, nf_about, nf_o.root_index);
            const LinearizationCoeffs lin = linearize(p, about);
            KernelOpts k = nf_k;
            k.tau1 = 1.0;
            const KernelSpec probe = k.spec();
            const HopfPoint first = first_crossing(lin, probe);
            KernelSpec crit = probe;
            if (crit.kind == KernelKind::Discrete) {
                if (first.tau <= crit.tau2)
                    throw ConfigError(
                        "tau2 must be smaller than the critical total delay " +
                        format_double(first.tau));
                crit.tau1 = first.tau - crit.tau2;
            } else {
                crit.tau1 = first.tau;
            }
            const NormalFormSummary nf = compute_normal_form(lin, crit, first);
            Json j = Json::object();
            j.set("params", params_json(p));
            j.set("about", state_json(about));
            j.set("summary", nf_json(nf));
            Json cls = Json::object();
            cls.set("direction", Json::str(nf.mu2 > 0 ? "supercritical (orbits "
                                                        "for delays above "
                                                        "critical)"
                                                      : "subcritical"));
            cls.set("orbit_stability",
                    Json::str(nf.beta2 < 0 ? "stable" : "unstable"));
            cls.set("period_trend",
                    Json::str(nf.T2 > 0 ? "increasing" : "decreasing"));
            j.set("classification", std::move(cls));
            std::cout << j.dump();
        });
    }

    if (sim_cmd->parsed()) {
        return run_guarded([&] {
            const Params p = sim_o.load();
            HistorySpec hist =
                HistorySpec::at_equilibrium({0.0, sim_perturb, 0.0, 0.0});
            if (!sim_hist.empty())
                hist = HistorySpec::constant(
                    {sim_hist[0], sim_hist[1], sim_hist[2], sim_hist[3]});
            Trajectory traj;
            if (sim_k.kind() == KernelKind::Discrete) {
                traj = simulate_discrete(p, sim_k.tau1, sim_k.tau2, hist,
                                         sim_horizon, sim_step);
            } else if (sim_integrator == "chain") {
                traj = simulate_weak_chain(p, sim_k.tau1, sim_k.q2, hist,
                                           sim_horizon, sim_step);
            } else if (sim_integrator == "quadrature") {
                traj = simulate_weak_quadrature(p, sim_k.tau1, sim_k.q2, hist,
                                                sim_horizon, sim_step);
            } else {
                throw ConfigError("unknown --integrator: " + sim_integrator);
            }
            const OscillationMetrics m = oscillation_metrics(traj, 1);

            namespace fs = std::filesystem;
            fs::create_directories(sim_out);
            const std::string csv_path =
                (fs::path(sim_out) / "trajectory.csv").string();
            write_text_file(csv_path, trajectory_csv(traj));
            if (!sim_no_plot)
                write_text_file(
                    (fs::path(sim_out) / "plot_trajectory.gp").string(),
                    plot_script("trajectory.csv", traj.dim));

            Json j = Json::object();
            j.set("params", params_json(p));
            j.set("kernel", kernel_json(traj.kernel));
            j.set("horizon", Json::number(sim_horizon));
            j.set("step", Json::number(sim_step));
            j.set("csv", Json::str(csv_path));
            j.set("metrics", metrics_json(m));
            write_text_file((fs::path(sim_out) / "metrics.json").string(),
                            j.dump());
            std::cout << j.dump();
        });
    }

    if (sw_cmd->parsed()) {
        return run_guarded([&] {
            const Params p = sw_o.load();
            if (sw_points < 6)
                throw ConfigError("--points must be >= 6");
            if (!(sw_hi > sw_lo)) throw ConfigError("--tau-max must exceed --tau-min");
            std::vector<double> taus;
            for (int i = 0; i < sw_points; ++i)
                taus.push_back(sw_lo + (sw_hi - sw_lo) * i / (sw_points - 1));
            KernelOpts k = sw_k;
            k.tau1 = 1.0;
            SweepProtocol proto;
            proto.horizon = sw_horizon;
            proto.step = sw_step;
            proto.perturb_y1 = sw_perturb;
            const ScalingFit fit = amplitude_scaling_fit(p, k.spec(), taus, proto);
            Json j = Json::object();
            j.set("params", params_json(p));
            Json pj = Json::array();
            for (const ScalingPoint& pt : fit.points) {
                Json e = Json::object();
                e.set("tau", Json::number(pt.tau));
                e.set("trend", Json::str(trend_name(pt.trend)));
                e.set("amplitude", Json::number(pt.amplitude));
                pj.push(std::move(e));
            }
            j.set("points", std::move(pj));
            j.set("conclusive", Json::boolean(fit.conclusive));
            if (fit.conclusive) {
                j.set("tau_hat", Json::number(fit.tau_hat));
                j.set("slope", Json::number(fit.slope));
                j.set("side_of_onset", Json::str(fit.side));
            }
            std::cout << j.dump();
        });
    }

    if (ver_cmd->parsed()) {
        return run_guarded([&] {
            const VerificationReport rep = build_verification_report();
            const Json j = verification_report_json(rep);
            if (ver_json) std::cout << j.dump();
            else std::cout << verification_report_text(rep);
            if (!ver_out.empty()) {
                namespace fs = std::filesystem;
                fs::create_directories(ver_out);
                write_text_file((fs::path(ver_out) / "verification.json").string(),
                                j.dump());
            }
        });
    }

    return 0;
}
