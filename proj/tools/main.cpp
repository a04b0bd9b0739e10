// Command-line surface for the age-structured epidemic bifurcation toolkit:
// equilibrium/coefficient analysis, imaginary-axis crossing table, normal-form
// coefficients with a full audit record, two independent time-domain schemes,
// a one-command reproduction of the reference oscillation experiment, and a
// built-in oracle suite. stdout carries data, stderr carries human text.
// Exit codes: 2 validation/config, 3 failed admissibility assumptions,
// 4 no crossing, 5 resonance, 6 blowup; cmd_validate exits 1 on suite failure.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agesis/errors.hpp"
#include "agesis/expsum.hpp"
#include "agesis/io.hpp"
#include "agesis/model.hpp"
#include "agesis/normalform.hpp"
#include "agesis/simulate.hpp"
#include "agesis/spectral.hpp"

using nlohmann::json;

namespace {

json cplx_json(agesis::cplx v) {
    return json{{"re", v.real()}, {"im", v.imag()}};
}

json params_json(const agesis::ModelParams& p) {
    return json{{"lambda", p.lambda}, {"mu", p.mu}, {"eta", p.eta}};
}

json manifest_for(const std::string& command, const agesis::ModelParams& p,
                  const json& options, const std::vector<std::string>& outputs) {
    return json{{"command", command},
                {"tool_version", agesis::kToolVersion},
                {"created_utc", agesis::iso8601_now()},
                {"params", params_json(p)},
                {"options", options},
                {"outputs", outputs}};
}

void emit(const json& doc, const std::string& out_path, const std::string& command,
          const agesis::ModelParams& p, const json& options) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        agesis::write_text_file(out_path, text);
        agesis::write_manifest(out_path, manifest_for(command, p, options, {out_path}));
    }
}

void print_assumption_report(const agesis::AssumptionReport& rep) {
    std::cerr << "admissibility report (all five quantities must have their "
                 "required strict sign):\n";
    for (const auto& e : rep.entries)
        std::cerr << "  " << e.name << " = " << agesis::format_value(e.value) << "  "
                  << (e.pass ? "pass" : "FAIL") << "\n";
}

// Gate shared by the crossing-dependent commands: exits 3 on failure.
bool assumptions_pass_or_report(const agesis::ReducedCoeffs& rc) {
    const auto rep = agesis::assumption_report(rc);
    if (!rep.all_pass) print_assumption_report(rep);
    return rep.all_pass;
}

// ---------------- analyze ----------------

struct AnalyzeArgs {
    double lambda = 0.0, mu = 0.0, eta = 0.0, tau = 0.0;
    std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const agesis::ModelParams p = agesis::validate({a.lambda, a.mu, a.eta});
    const agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
    const auto rep = agesis::assumption_report(rc);

    json doc;
    doc["params"] = params_json(p);
    doc["coefficients"] = {{"xi", rc.xi},
                           {"b", rc.b_coef},
                           {"c", rc.c_coef},
                           {"d", rc.d_coef},
                           {"e", rc.e_coef}};
    const double b = rc.b_coef, c = rc.c_coef, d = rc.d_coef, e = rc.e_coef;
    doc["combinations"] = {{"e_minus_c", e - c},
                           {"bd_minus_2e", b * d - 2.0 * e},
                           {"bsq_minus_2c", b * b - 2.0 * c},
                           {"bcd_minus_e_bsq_minus_2c", b * c * d - e * (b * b - 2.0 * c)}};
    json entries = json::array();
    for (const auto& en : rep.entries)
        entries.push_back({{"name", en.name}, {"value", en.value}, {"pass", en.pass}});
    doc["assumptions"] = {{"all_pass", rep.all_pass}, {"entries", entries}};
    try {
        const double w = agesis::omega0(rc);
        doc["omega0"] = w;
        doc["transversality"] = agesis::transversality(rc, w);
    } catch (const agesis::NoCrossingError&) {
        // No crossing frequency: the report is still complete without it.
    }
    if (a.tau > 0.0) {
        const auto eq = agesis::equilibrium(p, a.tau);
        doc["equilibrium"] = {
            {"s_bar", eq.s_bar},
            {"xi", eq.xi},
            {"infected_profile",
             {{"coeff", eq.i_bar.terms[0].coeff.real()},
              {"rate", eq.i_bar.terms[0].rate.real()}}},
            {"susceptible_profile",
             {{"coeff", eq.rho_bar.terms[0].coeff.real()},
              {"rate", eq.rho_bar.terms[0].rate.real()}}}};
    }
    emit(doc, a.out, "analyze", p,
         json{{"tau", a.tau > 0.0 ? json(a.tau) : json()}});
    return 0;
}

// ---------------- hopf ----------------

struct HopfArgs {
    double lambda = 0.0, mu = 0.0, eta = 0.0;
    int k_max = 5;
    std::string format = "json";
    std::string out;
};

int cmd_hopf(const HopfArgs& a) {
    const agesis::ModelParams p = agesis::validate({a.lambda, a.mu, a.eta});
    const agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
    if (!assumptions_pass_or_report(rc)) return 3;
    const double w = agesis::omega0(rc);

    std::vector<agesis::HopfPoint> points;
    for (int k = 0; k <= a.k_max; ++k) points.push_back(agesis::tau_k(rc, w, k));

    if (a.format == "csv") {
        std::string text = "k,omega0,tau_k,branch,transversality,residual\n";
        for (const auto& pt : points) {
            text += std::to_string(pt.k) + ',' + agesis::format_value(pt.omega0) + ',' +
                    agesis::format_value(pt.tau_k) + ',' + pt.branch + ',' +
                    agesis::format_value(pt.transversality) + ',' +
                    agesis::format_value(pt.residual) + '\n';
        }
        if (a.out.empty()) {
            std::cout << text;
        } else {
            agesis::write_text_file(a.out, text);
            agesis::write_manifest(
                a.out, manifest_for("hopf", p, json{{"k-max", a.k_max}, {"format", "csv"}},
                                    {a.out}));
        }
        return 0;
    }

    json doc;
    doc["params"] = params_json(p);
    doc["omega0"] = w;
    json rows = json::array();
    for (const auto& pt : points)
        rows.push_back({{"k", pt.k},
                        {"omega0", pt.omega0},
                        {"tau_k", pt.tau_k},
                        {"branch", pt.branch},
                        {"transversality", pt.transversality},
                        {"residual", pt.residual}});
    doc["points"] = rows;
    emit(doc, a.out, "hopf", p, json{{"k-max", a.k_max}, {"format", "json"}});
    return 0;
}

// ---------------- normal-form ----------------

struct NormalFormArgs {
    double lambda = 0.0, mu = 0.0, eta = 0.0;
    int k = 0;
    bool age_zero_reading = false;
    std::string out;
};

int cmd_normal_form(const NormalFormArgs& a) {
    const agesis::ModelParams p = agesis::validate({a.lambda, a.mu, a.eta});
    const agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
    if (!assumptions_pass_or_report(rc)) return 3;
    const double w = agesis::omega0(rc);
    const agesis::HopfPoint pt = agesis::tau_k(rc, w, a.k);
    const agesis::NormalFormAnalysis an = agesis::analyze_normal_form(p, pt);
    const agesis::NormalFormResult& r = an.result;

    json doc;
    doc["k"] = pt.k;
    doc["tau_k"] = pt.tau_k;
    doc["omega0"] = pt.omega0;
    doc["omega_k"] = pt.tau_k * pt.omega0;
    doc["iota1"] = r.iota1;
    doc["iota2"] = r.iota2;
    doc["classification"] = r.classification;
    doc["A1"] = cplx_json(r.A1);
    doc["C0"] = cplx_json(r.C0);
    doc["C1"] = cplx_json(r.C1);
    doc["a20"] = cplx_json(r.a20);
    doc["a11"] = cplx_json(r.a11);
    doc["a02"] = cplx_json(r.a02);
    doc["c2210"] = cplx_json(r.c2210);
    doc["c2310"] = cplx_json(r.c2310);
    doc["c3310"] = cplx_json(r.c3310);
    json audit = json::array();
    for (const auto& en : an.audit)
        audit.push_back({{"name", en.name}, {"re", en.value.real()}, {"im", en.value.imag()}});
    doc["audit"] = audit;
    doc["reading"] = a.age_zero_reading ? "age-zero" : "scalar";
    doc["reading_note"] = an.reading_note;
    emit(doc, a.out, "normal-form", p,
         json{{"k", a.k}, {"age-zero-reading", a.age_zero_reading}});
    return 0;
}

// ---------------- simulate ----------------

struct SimulateArgs {
    double lambda = 0.6, mu = 0.2, eta = 0.81;
    double tau = 0.0, dt = 1e-3, t_end = 200.0, epsilon = 0.05, a_max = 0.0;
    long stride = 0;
    std::string scheme = "dde";
    double seed_s0 = -1.0, seed_b0 = -1.0;
    std::string out, diagnostics_out;
    bool gnuplot = false, original_units = false;
};

agesis::SimConfig config_from(const SimulateArgs& a) {
    agesis::SimConfig cfg;
    cfg.tau = a.tau;
    cfg.dt = a.dt;
    cfg.t_end = a.t_end;
    cfg.epsilon = a.epsilon;
    cfg.a_max = a.a_max;
    cfg.stride = a.stride;
    cfg.scheme = (a.scheme == "pde") ? agesis::Scheme::pde : agesis::Scheme::dde;
    const bool s0_given = a.seed_s0 >= 0.0, b0_given = a.seed_b0 >= 0.0;
    if (s0_given != b0_given)
        throw agesis::ConfigError("custom seeds need both --seed-s0 and --seed-b0");
    if (s0_given) {
        cfg.seed = agesis::SeedKind::custom;
        cfg.s0 = a.seed_s0;
        cfg.b0 = a.seed_b0;
    }
    return cfg;
}

json diagnostics_json(const agesis::Trajectory& tr, double tau, const std::string& scheme) {
    json doc;
    doc["tau"] = tau;
    doc["scheme"] = scheme;
    try {
        const agesis::Diagnostics d = agesis::diagnose(tr);
        doc["verdict"] = d.verdict;
        doc["period_scaled"] = d.period;
        doc["period_original"] = d.period * tau;
        doc["amplitude"] = d.amplitude;
        json peaks = json::array();
        for (size_t i = 0; i < d.peak_times.size(); ++i)
            peaks.push_back({{"t", d.peak_times[i]}, {"value", d.peak_values[i]}});
        doc["peaks"] = peaks;
    } catch (const agesis::InsufficientDataError&) {
        doc["verdict"] = "insufficient-data";
        doc["period_scaled"] = 0.0;
        doc["period_original"] = 0.0;
        doc["amplitude"] = 0.0;
        doc["peaks"] = json::array();
    }
    return doc;
}

int cmd_simulate(const SimulateArgs& a) {
    const agesis::ModelParams p = agesis::validate({a.lambda, a.mu, a.eta});
    const agesis::SimConfig cfg = config_from(a);
    if (a.out.empty()) throw agesis::ConfigError("--out is required");

    const agesis::Trajectory tr = agesis::integrate(p, cfg);
    const agesis::UnitScaling units{a.original_units, a.tau};
    agesis::write_trajectory_csv(a.out, tr, units);

    const json options{{"tau", a.tau},          {"scheme", a.scheme},
                       {"dt", a.dt},            {"t-end", a.t_end},
                       {"epsilon", a.epsilon},  {"a-max", a.a_max},
                       {"stride", a.stride},    {"original-units", a.original_units}};
    std::vector<std::string> outputs{a.out};

    if (a.gnuplot) {
        const std::string gp = a.out + ".gp";
        agesis::write_text_file(gp, agesis::gnuplot_for_trajectory(a.out));
        outputs.push_back(gp);
        agesis::write_manifest(gp, manifest_for("simulate", p, options, outputs));
    }
    agesis::write_manifest(a.out, manifest_for("simulate", p, options, outputs));

    const json diag = diagnostics_json(tr, a.tau, a.scheme);
    std::cout << diag.dump(2) << "\n";
    if (!a.diagnostics_out.empty()) {
        agesis::write_text_file(a.diagnostics_out, diag.dump(2) + "\n");
        agesis::write_manifest(a.diagnostics_out, manifest_for("simulate", p, options,
                                                               {a.diagnostics_out}));
    }
    if (tr.truncated)
        std::cerr << "warning: transport tail mass was significant at some step; "
                     "increase --a-max\n";
    return 0;
}

// ---------------- reproduce ----------------

struct ReproduceArgs {
    double lambda = 0.6, mu = 0.2, eta = 0.81;
    double tau = 24.0, dt = 2e-3, t_end = 200.0, epsilon = 0.05;
    std::string outdir;
    bool gnuplot = false, original_units = false;
};

int cmd_reproduce(const ReproduceArgs& a) {
    const agesis::ModelParams p = agesis::validate({a.lambda, a.mu, a.eta});
    const agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
    if (!assumptions_pass_or_report(rc)) return 3;
    if (a.outdir.empty()) throw agesis::ConfigError("--outdir is required");

    const double w = agesis::omega0(rc);
    const agesis::HopfPoint pt0 = agesis::tau_k(rc, w, 0);

    agesis::SimConfig cfg;
    cfg.tau = a.tau;
    cfg.dt = a.dt;
    cfg.t_end = a.t_end;
    cfg.epsilon = a.epsilon;
    cfg.stride = std::max<long>(1, std::llround(0.02 / a.dt));

    const agesis::Trajectory tr = agesis::integrate_dde(p, cfg);
    agesis::SimConfig pde_cfg = cfg;
    pde_cfg.scheme = agesis::Scheme::pde;
    agesis::AgeSurface surf;
    const agesis::Trajectory tr_pde = agesis::integrate_pde(p, pde_cfg, &surf);
    (void)tr_pde;

    const agesis::UnitScaling units{a.original_units, a.tau};
    const std::string traj_path = a.outdir + "/trajectory.csv";
    const std::string phase_path = a.outdir + "/phase_plane.csv";
    const std::string surf_path = a.outdir + "/age_surface.csv";
    const std::string summary_path = a.outdir + "/summary.json";
    agesis::write_trajectory_csv(traj_path, tr, units);
    agesis::write_phase_plane_csv(phase_path, tr);
    agesis::write_age_surface_csv(surf_path, surf, units);

    json summary;
    summary["tau0"] = pt0.tau_k;
    summary["omega0"] = w;
    summary["tau"] = a.tau;
    try {
        const agesis::Diagnostics d = agesis::diagnose(tr);
        summary["verdict"] = d.verdict;
        summary["period_scaled"] = d.period;
        summary["period_original"] = d.period * a.tau;
        summary["amplitude"] = d.amplitude;
        summary["loop_closure"] = agesis::loop_closure_fraction(tr, d.period);
    } catch (const agesis::InsufficientDataError&) {
        summary["verdict"] = "insufficient-data";
        summary["period_scaled"] = 0.0;
        summary["period_original"] = 0.0;
        summary["amplitude"] = 0.0;
        summary["loop_closure"] = 0.0;
    }
    agesis::write_text_file(summary_path, summary.dump(2) + "\n");

    const json options{{"tau", a.tau},
                       {"dt", a.dt},
                       {"t-end", a.t_end},
                       {"epsilon", a.epsilon},
                       {"original-units", a.original_units}};
    const std::vector<std::string> outputs{traj_path, phase_path, surf_path, summary_path};
    for (const auto& path : outputs)
        agesis::write_manifest(path, manifest_for("reproduce", p, options, outputs));

    if (a.gnuplot) {
        agesis::write_text_file(traj_path + ".gp",
                                agesis::gnuplot_for_trajectory("trajectory.csv"));
        agesis::write_text_file(surf_path + ".gp",
                                agesis::gnuplot_for_surface("age_surface.csv"));
        agesis::write_manifest(traj_path + ".gp",
                               manifest_for("reproduce", p, options, outputs));
        agesis::write_manifest(surf_path + ".gp",
                               manifest_for("reproduce", p, options, outputs));
    }

    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ---------------- validate ----------------

struct ValidateArgs {
    std::string suite = "all";
    bool inject_conjugation_defect = false;
};

struct SuiteResult {
    std::string name;
    bool pass;
    std::string detail;
};

SuiteResult suite_quartic_vs_scan() {
    // Closed-form crossing frequency against the sign-change scan oracle on
    // deterministic pseudo-random admissible parameter sets.
    std::mt19937_64 rng(20240817u);
    std::uniform_real_distribution<double> umu(0.05, 0.6), ueta(0.05, 0.95),
        ugap(0.05, 2.0);
    int tested = 0;
    double worst = 0.0;
    while (tested < 20) {
        const double mu = umu(rng), eta = ueta(rng), lambda = mu + ugap(rng);
        agesis::ModelParams p{lambda, mu, eta};
        agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
        if (!agesis::assumption_report(rc).all_pass) continue;
        double w;
        try {
            w = agesis::omega0(rc);
        } catch (const agesis::NoCrossingError&) {
            continue;
        }
        const auto scan = agesis::scan_crossings(rc, 2.0, 4000);
        if (scan.empty()) return {"quartic-vs-scan", false, "scan found no crossing"};
        double best = 1e300;
        for (double s : scan) best = std::min(best, std::abs(s - w));
        worst = std::max(worst, best);
        ++tested;
    }
    return {"quartic-vs-scan", worst < 1e-6,
            "worst |closed-form - scan| = " + agesis::format_value(worst)};
}

SuiteResult suite_transversality_fd() {
    const agesis::ModelParams p{0.6, 0.2, 0.81};
    const agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
    const double w = agesis::omega0(rc);
    const double delta = 1e-4;
    for (int k = 0; k <= 2; ++k) {
        const agesis::HopfPoint pt = agesis::tau_k(rc, w, k);
        const agesis::cplx seed(0.0, w);
        const agesis::cplx lo = agesis::refine_root(seed, pt.tau_k - delta, rc);
        const agesis::cplx hi = agesis::refine_root(seed, pt.tau_k + delta, rc);
        const double fd = (hi.real() - lo.real()) / (2.0 * delta);
        if (!(fd > 0.0) || !(pt.transversality > 0.0))
            return {"transversality-fd", false,
                    "k=" + std::to_string(k) + ": fd slope " + agesis::format_value(fd)};
    }
    return {"transversality-fd", true, "closed-form sign matches finite difference, k=0..2"};
}

SuiteResult suite_conjugation(bool inject_defect) {
    const agesis::ModelParams p{0.6, 0.2, 0.81};
    const agesis::ReducedCoeffs rc = agesis::reduced_coeffs(p);
    const double w = agesis::omega0(rc);
    const agesis::HopfPoint pt = agesis::tau_k(rc, w, 0);
    const agesis::NormalFormAnalysis an = agesis::analyze_normal_form(p, pt);
    auto get = [&](const std::string& name) {
        for (const auto& e : an.audit)
            if (e.name == name) return e.value;
        throw agesis::Error("audit entry missing: " + name);
    };
    agesis::cplx c2210 = get("c2210");
    if (inject_defect) c2210 *= 1.0 + 1e-6;  // negative-control hook
    double worst = 0.0;
    worst = std::max(worst, std::abs(get("d_delta_minus") - std::conj(get("d_delta_plus"))));
    worst = std::max(worst, std::abs(get("p_minus") - std::conj(get("p_plus"))));
    worst = std::max(worst, std::abs(get("c3310") - std::conj(c2210)));
    worst = std::max(worst, std::abs(get("c2310").imag()));
    worst = std::max(worst, std::abs(get("int_psi331") - std::conj(get("int_psi221"))));
    worst = std::max(worst, std::abs(get("int_psi332") - std::conj(get("int_psi222"))));
    worst = std::max(worst, get("C0_display_conjugation_defect").real());
    return {"conjugation-audit", worst < 1e-10,
            "worst pairing defect = " + agesis::format_value(worst)};
}

SuiteResult suite_dde_vs_pde() {
    const agesis::ModelParams p{0.6, 0.2, 0.81};
    agesis::SimConfig cfg;
    cfg.tau = 24.0;
    cfg.dt = 2e-3;
    cfg.t_end = 50.0;
    cfg.stride = 10;
    const agesis::Trajectory d = agesis::integrate_dde(p, cfg);
    agesis::SimConfig cp = cfg;
    cp.scheme = agesis::Scheme::pde;
    const agesis::Trajectory q = agesis::integrate_pde(p, cp);
    double gap = 0.0, pmax = 0.0;
    const size_t n = std::min(d.times.size(), q.times.size());
    for (size_t i = 0; i < n; ++i) {
        gap = std::max(gap, std::abs(d.p[i] - q.p[i]));
        pmax = std::max(pmax, std::abs(d.p[i]));
    }
    const double rel = gap / pmax;
    return {"dde-vs-pde", rel < 1e-2,
            "relative sup gap in P = " + agesis::format_value(rel)};
}

SuiteResult suite_stationarity() {
    const agesis::ModelParams p{0.6, 0.2, 0.81};
    const double xi = agesis::reduced_coeffs(p).xi;
    double worst = 0.0;
    for (auto scheme : {agesis::Scheme::dde, agesis::Scheme::pde}) {
        agesis::SimConfig cfg;
        cfg.tau = 24.0;
        cfg.dt = 2e-3;
        cfg.t_end = 50.0;
        cfg.epsilon = 0.0;
        cfg.stride = 100;
        cfg.scheme = scheme;
        const agesis::Trajectory tr = agesis::integrate(p, cfg);
        for (size_t i = 0; i < tr.times.size(); ++i) {
            worst = std::max(worst, std::abs(tr.s[i] - (1.0 + xi)));
            worst = std::max(worst, std::abs(tr.p[i] - xi));
        }
    }
    return {"stationarity", worst < 1e-8,
            "worst deviation from the endemic point = " + agesis::format_value(worst)};
}

int cmd_validate(const ValidateArgs& a) {
    std::vector<SuiteResult> results;
    auto want = [&](const std::string& group) {
        return a.suite == "all" || a.suite == group;
    };
    if (want("spectral")) {
        results.push_back(suite_quartic_vs_scan());
        results.push_back(suite_transversality_fd());
    }
    if (want("normalform")) results.push_back(suite_conjugation(a.inject_conjugation_defect));
    if (want("simulate")) {
        results.push_back(suite_dde_vs_pde());
        results.push_back(suite_stationarity());
    }
    if (results.empty()) throw agesis::ConfigError("unknown suite filter: " + a.suite);

    bool all_pass = true;
    json rows = json::array();
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        rows.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    json doc{{"suites", rows}, {"all_pass", all_pass}};
    std::cout << doc.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

// ---------------- config-file merge ----------------

// The optional JSON config mirrors the invoked subcommand's long flags
// (keys without the leading dashes). Explicit command-line flags win; keys
// that do not name a flag of the invoked subcommand are ignored so one config
// can serve several commands.
std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_path;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw agesis::ConfigError("cannot open config file " + config_path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw agesis::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw agesis::ConfigError("config file must hold a JSON object");

    // Locate the subcommand token (first non-flag argument).
    size_t sub_pos = 0;
    for (size_t i = 1; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == 0) return args;  // no subcommand; parser will report usage

    auto user_passed = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (size_t i = sub_pos + 1; i < args.size(); ++i)
            if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::string> synthesized;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "config" || user_passed(key)) continue;
        const json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) synthesized.push_back("--" + key);
        } else if (v.is_string()) {
            synthesized.push_back("--" + key);
            synthesized.push_back(v.get<std::string>());
        } else if (v.is_number()) {
            synthesized.push_back("--" + key);
            synthesized.push_back(v.dump());
        } else {
            throw agesis::ConfigError("config key '" + key +
                                      "' must be a boolean, number, or string");
        }
    }
    args.insert(args.begin() + long(sub_pos) + 1, synthesized.begin(), synthesized.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"age-structured epidemic bifurcation toolkit"};
    app.require_subcommand(1);
    std::string config_path_sink;  // consumed by merge_config_args; declared so parsing accepts it

    AnalyzeArgs az;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "equilibrium, reduced coefficients, admissibility report");
    analyze->add_option("--lambda", az.lambda, "recruitment rate")->required();
    analyze->add_option("--mu", az.mu, "natural death rate")->required();
    analyze->add_option("--eta", az.eta, "recovery rate")->required();
    analyze->add_option("--tau", az.tau, "delay: include the equilibrium age profiles");
    analyze->add_option("--out", az.out, "write JSON here instead of stdout");
    analyze->add_option("--config", config_path_sink, "JSON config mirroring the flags");

    HopfArgs hf;
    CLI::App* hopf = app.add_subcommand("hopf", "imaginary-axis crossing table");
    hopf->add_option("--lambda", hf.lambda, "recruitment rate")->required();
    hopf->add_option("--mu", hf.mu, "natural death rate")->required();
    hopf->add_option("--eta", hf.eta, "recovery rate")->required();
    hopf->add_option("--k-max", hf.k_max, "largest crossing index")->check(CLI::Range(0, 1000));
    hopf->add_option("--format", hf.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    hopf->add_option("--out", hf.out, "write here instead of stdout");
    hopf->add_option("--config", config_path_sink, "JSON config mirroring the flags");

    NormalFormArgs nf;
    CLI::App* normal_form = app.add_subcommand(
        "normal-form", "bifurcation coefficients with the full audit record");
    normal_form->add_option("--lambda", nf.lambda, "recruitment rate")->required();
    normal_form->add_option("--mu", nf.mu, "natural death rate")->required();
    normal_form->add_option("--eta", nf.eta, "recovery rate")->required();
    normal_form->add_option("--k", nf.k, "crossing index")->check(CLI::Range(0, 1000));
    normal_form->add_flag("--age-zero-reading", nf.age_zero_reading,
                          "label the age-zero reading of the projector displays as primary");
    normal_form->add_option("--out", nf.out, "write JSON here instead of stdout");
    normal_form->add_option("--config", config_path_sink, "JSON config mirroring the flags");

    SimulateArgs sm;
    CLI::App* simulate = app.add_subcommand("simulate", "time-domain run with diagnostics");
    simulate->add_option("--lambda", sm.lambda, "recruitment rate");
    simulate->add_option("--mu", sm.mu, "natural death rate");
    simulate->add_option("--eta", sm.eta, "recovery rate");
    simulate->add_option("--tau", sm.tau, "delay (bifurcation parameter)")->required();
    simulate->add_option("--scheme", sm.scheme, "dde or pde")
        ->check(CLI::IsMember({"dde", "pde"}));
    simulate->add_option("--dt", sm.dt, "time step; 1/dt must be an integer");
    simulate->add_option("--t-end", sm.t_end, "horizon in rescaled time");
    simulate->add_option("--epsilon", sm.epsilon, "equilibrium-scaled seed amplitude");
    simulate->add_option("--a-max", sm.a_max, "age cutoff for the pde scheme (0 = auto)");
    simulate->add_option("--stride", sm.stride, "sampling stride in steps (0 = auto)");
    simulate->add_option("--seed-s0", sm.seed_s0, "custom seed: initial susceptibles");
    simulate->add_option("--seed-b0", sm.seed_b0, "custom seed: constant boundary history");
    simulate->add_option("--out", sm.out, "trajectory CSV path")->required();
    simulate->add_option("--diagnostics-out", sm.diagnostics_out, "diagnostics JSON path");
    simulate->add_flag("--gnuplot", sm.gnuplot, "emit a companion plot script");
    simulate->add_flag("--original-units", sm.original_units,
                       "write times in original units and rates per original time");
    simulate->add_option("--config", config_path_sink, "JSON config mirroring the flags");

    ReproduceArgs rp;
    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "one-command reproduction of the reference oscillation experiment");
    reproduce->add_option("--lambda", rp.lambda, "recruitment rate");
    reproduce->add_option("--mu", rp.mu, "natural death rate");
    reproduce->add_option("--eta", rp.eta, "recovery rate");
    reproduce->add_option("--tau", rp.tau, "delay for the oscillation run");
    reproduce->add_option("--dt", rp.dt, "time step; 1/dt must be an integer");
    reproduce->add_option("--t-end", rp.t_end, "horizon in rescaled time");
    reproduce->add_option("--epsilon", rp.epsilon, "seed amplitude");
    reproduce->add_option("--outdir", rp.outdir, "output directory (must exist)")->required();
    reproduce->add_flag("--gnuplot", rp.gnuplot, "emit companion plot scripts");
    reproduce->add_flag("--original-units", rp.original_units,
                        "write times/ages in original units");
    reproduce->add_option("--config", config_path_sink, "JSON config mirroring the flags");

    ValidateArgs vd;
    CLI::App* validate_cmd = app.add_subcommand("validate", "built-in oracle suites");
    validate_cmd->add_option("--suite", vd.suite, "all, spectral, normalform, or simulate")
        ->check(CLI::IsMember({"all", "spectral", "normalform", "simulate"}));
    validate_cmd->add_flag("--inject-conjugation-defect", vd.inject_conjugation_defect,
                           "negative-control hook: perturb one coefficient before the audit");
    validate_cmd->add_option("--config", config_path_sink, "JSON config mirroring the flags");

    std::vector<std::string> args;
    try {
        args = merge_config_args(argc, argv);
    } catch (const agesis::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<char*> cargv;
    cargv.reserve(args.size());
    for (auto& s : args) cargv.push_back(s.data());

    try {
        app.parse(int(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (*analyze) return cmd_analyze(az);
        if (*hopf) return cmd_hopf(hf);
        if (*normal_form) return cmd_normal_form(nf);
        if (*simulate) return cmd_simulate(sm);
        if (*reproduce) return cmd_reproduce(rp);
        if (*validate_cmd) return cmd_validate(vd);
    } catch (const agesis::NoCrossingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const agesis::ResonanceError& e) {
        std::cerr << "error: " << e.what()
                  << " (|det| = " << agesis::format_value(e.det_magnitude) << ")\n";
        return 5;
    } catch (const agesis::BlowupError& e) {
        std::cerr << "error: " << e.what()
                  << " (t = " << agesis::format_value(e.time) << ")\n";
        return 6;
    } catch (const agesis::Error& e) {
        // Validation bucket: RangeError, EndemicityError, ConfigError, and any
        // other structural failure of the request.
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
