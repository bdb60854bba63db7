#include "chainform/config.hpp"
#include "chainform/link_model.hpp"
#include "chainform/microsim.hpp"
#include "chainform/output.hpp"
#include "chainform/standards.hpp"
#include "chainform/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace chainform;
using json = nlohmann::json;

namespace {

const char* kVersion = "1.0.0";

struct Run {
    std::string command;
    RunConfig cfg;
    fs::path dir;
    json summary = json::object();
    std::vector<std::string> outputs;

    void csv(const std::string& name, const Table& t)
    {
        write_atomic(dir / name, t.csv());
        outputs.push_back(name);
    }
    void svg(const std::string& name, const std::string& body)
    {
        write_atomic(dir / name, body);
        outputs.push_back(name);
    }
    void manifest()
    {
        json m;
        m["command"] = command;
        m["version"] = kVersion;
        json c = json::object();
        for (const auto& [k, v] : resolved_keys(cfg)) c[k] = v;
        m["config"] = c;
        m["outputs"] = outputs;
        m["summary"] = summary;
        write_atomic(dir / "manifest.json", m.dump(2) + "\n");
    }
};

Problem problem_of(const RunConfig& c) { return make_problem(c.cal, c.nodes); }

Setting equilibrium_setting(const RunConfig& c)
{
    if (c.model == "links") {
        require(c.variant == "baseline", "contract variants apply to the static model only");
        return links_setting(false);
    }
    if (c.model == "dynamic") {
        require(c.variant == "baseline", "contract variants apply to the static model only");
        Setting st;
        st.model = Model::Dynamic;
        return st;
    }
    StaticVariant v;
    if (c.variant == "noncontingent") v.contract = Contract::NonContingent;
    if (c.variant == "bargaining") {
        v.contract = Contract::Bargaining;
        v.xi = c.xi;
    }
    return static_setting(v);
}

Solution solve_equilibrium(const Problem& pr, const RunConfig& c)
{
    if (c.model == "links") require(pr.p.delta < 1.0, "link model needs delta < 1");
    return solve(pr, equilibrium_setting(c), c.solver);
}

Solution solve_planner_for(const Problem& pr, const RunConfig& c)
{
    if (c.model == "links") return solve_planner_links(pr, c.solver);
    if (c.model == "dynamic") return solve_planner_dynamic(pr, c.solver);
    return solve_planner_static(pr, c.solver);
}

std::vector<double> aggregate_row(const Problem& pr, const Solution& sol)
{
    const auto& S = sol.st;
    double f = S.c.f, N = S.N, M = 1.0;
    if (sol.setting.model == Model::Dynamic) M = efficiency_M(f, N, pr.p.beta, pr.p.delta);
    if (sol.setting.model == Model::Links) M = link_summary(pr, sol).M_tilde;
    return {f, S.mu, S.nu, S.R, S.Y, S.W, M, N * M - 1.0, S.chi1, S.chi2};
}

Table aggregate_table(const Problem& pr, const Solution& sol)
{
    Table t{aggregate_columns(), {}};
    t.add(aggregate_row(pr, sol));
    return t;
}

Table node_table(const Problem& pr, const Solution& eq, const Solution& planner, const std::vector<double>& tau)
{
    Table t{node_columns(), {}};
    const auto& S = eq.st;
    for (size_t i = 0; i < pr.grid.size(); ++i)
        t.add({pr.grid.z[i], S.s[i], S.x[i], S.A[i], S.P[i], S.D[i], tau[i], planner.st.s[i]});
    return t;
}

json solution_summary(const Solution& s)
{
    return {{"f", s.f()},
            {"W", s.W()},
            {"Y", s.st.Y},
            {"iterations", s.iterations},
            {"fp_error", s.fp_error},
            {"foc_residual", s.foc_residual},
            {"soc_ok", s.soc_ok},
            {"multiplicity", s.multiplicity}};
}

void say(const std::string& line) { std::cout << line << "\n"; }

std::string num(double x) { return fmt_num(x); }

// (a) expected output after a link disruption in month 0
std::string recovery_plot(const RecoveryPath& eq, const RecoveryPath& pl)
{
    svg::Chart c;
    c.title = "Expected output after a link disruption";
    c.xlabel = "month";
    c.ylabel = "expected output per final producer";
    auto xs = [](const RecoveryPath& r) { return std::vector<double>(r.month.begin(), r.month.end()); };
    c.series.push_back({"equilibrium", xs(eq), eq.output, "#d62728", false, false});
    c.series.push_back({"planner", xs(pl), pl.output, "#1f77b4", true, false});
    return svg::render(c);
}

int cmd_solve(Run& r)
{
    auto pr = problem_of(r.cfg);
    auto eq = solve_equilibrium(pr, r.cfg);
    auto pl = solve_planner_for(pr, r.cfg);
    auto sub = subsidy_from_planner(pr, pl);
    r.csv("nodes.csv", node_table(pr, eq, pl, sub.tau));
    r.csv("aggregates.csv", aggregate_table(pr, eq));
    r.csv("planner_aggregates.csv", aggregate_table(pr, pl));
    r.summary["equilibrium"] = solution_summary(eq);
    r.summary["planner"] = solution_summary(pl);
    if (eq.setting.model == Model::Links) {
        auto L = link_summary(pr, eq);
        r.summary["links"] = {{"mu", L.mu},         {"nu", L.nu},       {"rho", L.rho1},
                              {"f_tilde", L.f_tilde}, {"R_tilde", L.R_tilde}, {"chi1", L.chi1},
                              {"chi2", L.chi2},     {"M_tilde", L.M_tilde}, {"N_bar_star", L.N_bar_star},
                              {"mu_residual", L.mu_residual}};
        auto a = recovery_path(pr, eq, r.cfg.recovery_months);
        auto b = recovery_path(pr, pl, r.cfg.recovery_months);
        Table t{{"month", "active_equilibrium", "output_equilibrium", "active_planner", "output_planner"}, {}};
        for (size_t k = 0; k < a.month.size(); ++k)
            t.add({double(a.month[k]), a.active[k], a.output[k], b.active[k], b.output[k]});
        r.csv("recovery.csv", t);
        r.svg("recovery.svg", recovery_plot(a, b));
    }
    say(std::string(model_name(eq.setting.model)) + " equilibrium: f=" + num(eq.f()) + " W=" + num(eq.W()) +
        " iterations=" + std::to_string(eq.iterations));
    say("planner: f=" + num(pl.f()) + " W=" + num(pl.W()));
    return 0;
}

int cmd_planner(Run& r)
{
    auto pr = problem_of(r.cfg);
    require(r.cfg.variant == "baseline", "planner command uses the baseline contract");
    auto eq = solve_equilibrium(pr, r.cfg);
    auto pl = solve_planner_for(pr, r.cfg);
    auto sub = subsidy_from_planner(pr, pl);
    auto dec = verify_decentralization(pr, pl, sub.tau, r.cfg.solver);
    double gap = 0;
    bool below = true;
    for (size_t i = 0; i < pr.grid.size(); ++i) {
        gap = std::max(gap, pl.s()[i] - eq.s()[i]);
        if (pl.s()[i] > eq.s()[i] + 1e-9) below = false;
    }
    r.csv("nodes.csv", node_table(pr, eq, pl, sub.tau));
    r.csv("aggregates.csv", aggregate_table(pr, eq));
    r.csv("planner_aggregates.csv", aggregate_table(pr, pl));
    r.summary["equilibrium"] = solution_summary(eq);
    r.summary["planner"] = solution_summary(pl);
    r.summary["planner_below_equilibrium"] = below;
    r.summary["max_planner_excess"] = gap;
    r.summary["decentralization_deviation"] = dec.deviation;
    say("planner S<=s* at every node: " + std::string(below ? "yes" : "no"));
    say("f: equilibrium " + num(eq.f()) + ", planner " + num(pl.f()));
    say("W: equilibrium " + num(eq.W()) + ", planner " + num(pl.W()));
    say("decentralization deviation sup|s_tau - S| = " + num(dec.deviation));
    return 0;
}

int cmd_decompose(Run& r)
{
    auto pr = problem_of(r.cfg);
    require(r.cfg.variant == "baseline", "decompose uses the baseline contract");
    auto eq = solve_equilibrium(pr, r.cfg);
    auto d = decompose(pr, eq);
    Table t{{"z", "business_stealing", "appropriability", "network", "search", "total", "gradient"}, {}};
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pr.grid.size(); ++i) {
        t.add({pr.grid.z[i], d.business_stealing[i], d.appropriability[i], d.network[i], d.search[i], d.total[i],
               d.gradient[i]});
        worst = std::max(worst, d.total[i]);
    }
    r.csv("decomposition.csv", t);
    r.summary["equilibrium"] = solution_summary(eq);
    r.summary["max_total"] = worst;
    say("max total over nodes = " + num(worst) + (worst < 0 ? " (over-specialization everywhere)" : ""));
    return 0;
}

int cmd_subsidy(Run& r)
{
    auto pr = problem_of(r.cfg);
    require(r.cfg.variant == "baseline", "subsidy uses the baseline contract");
    auto pl = solve_planner_for(pr, r.cfg);
    auto sub = subsidy_from_planner(pr, pl);
    auto dec = verify_decentralization(pr, pl, sub.tau, r.cfg.solver);
    const auto& S = dec.taxed.st;
    Table t{{"z", "p_star", "tau", "price_with_subsidy", "price_ratio", "tau_rate", "tau_rate_direct"}, {}};
    std::vector<double> zs, ratio;
    for (size_t i = 0; i < pr.grid.size(); ++i) {
        double p = pr.F.a(S.s[i]) - S.x[i];
        t.add({pr.grid.z[i], p, sub.tau[i], p + sub.tau[i], (p + sub.tau[i]) / p, sub.tau_rate[i],
               sub.tau_rate_direct[i]});
        zs.push_back(pr.grid.z[i]);
        ratio.push_back((p + sub.tau[i]) / p);
    }
    r.csv("subsidy.csv", t);
    svg::Chart c;
    c.title = "Targeted transaction subsidy";
    c.xlabel = "productivity z";
    c.ylabel = "(p* + tau*) / p*";
    c.series.push_back({"P(z)/p*(z)", zs, ratio, "#2ca02c", false, false});
    r.svg("subsidy.svg", svg::render(c));
    r.summary["T_star"] = sub.T_star;
    r.summary["tau_low"] = sub.tau_low;
    r.summary["tau_high"] = sub.tau_high;
    r.summary["endpoint_ratio"] = sub.tau_high / sub.tau_low;
    r.summary["one_minus_f"] = 1.0 - sub.f;
    r.summary["decentralization_deviation"] = dec.deviation;
    say("T* = " + num(sub.T_star) + ", tau(z_high)/tau(z_low) = " + num(sub.tau_high / sub.tau_low) +
        ", 1-f = " + num(1.0 - sub.f));
    say("decentralization deviation sup|s_tau - S| = " + num(dec.deviation));
    return 0;
}

StandardResult run_standard(const Problem& pr, const RunConfig& c)
{
    ScanOptions so;
    so.points = c.standard_points;
    so.lower_frac = c.standard_lower_frac;
    return optimal_standard(pr, so, c.solver);
}

int cmd_standard(Run& r)
{
    auto pr = problem_of(r.cfg);
    auto R = run_standard(pr, r.cfg);
    Table curve{{"s_bar", "W"}, {}};
    for (size_t k = 0; k < R.curve_s.size(); ++k) curve.add({R.curve_s[k], R.curve_W[k]});
    r.csv("standard_curve.csv", curve);
    Table sum{{"s_bar_star", "W_star", "W_laissez_faire", "W_max", "ratio_W", "ratio_s", "constrained_share", "z_hat",
               "cev", "cev_ratio", "foc_residual"},
              {}};
    sum.add({R.s_bar_star, R.W_star, R.W_lf, R.W_max, R.ratio_W, R.ratio_s, R.constrained_share, R.z_hat, R.cev,
             R.cev_ratio, R.foc_residual});
    r.csv("standard.csv", sum);
    Table phi{{"z", "phi_laissez_faire", "phi_standard", "phi_planner"}, {}};
    std::vector<double> zs, a, b, p;
    for (size_t i = 0; i < pr.grid.size(); ++i) {
        zs.push_back(pr.grid.z[i]);
        a.push_back(pr.F.phi(R.lf.s()[i]));
        b.push_back(pr.F.phi(R.constrained.s()[i]));
        p.push_back(pr.F.phi(R.planner.s()[i]));
        phi.add({zs.back(), a.back(), b.back(), p.back()});
    }
    r.csv("standard_phi.csv", phi);

    svg::Chart c;
    c.title = "Welfare under a specialization standard";
    c.xlabel = "standard s_bar";
    c.ylabel = "steady-state welfare";
    c.series.push_back({"W(s_bar)", R.curve_s, R.curve_W, "#9467bd", false, false});
    c.hlines = {{"planner", R.W_max}, {"laissez-faire", R.W_lf}};
    r.svg("standard_welfare.svg", svg::render(c));
    svg::Chart d;
    d.title = "Compatibility under three regimes";
    d.xlabel = "productivity z";
    d.ylabel = "phi(s(z))";
    d.series.push_back({"laissez-faire", zs, a, "#d62728", false, false});
    d.series.push_back({"standard", zs, b, "#9467bd", false, false});
    d.series.push_back({"planner", zs, p, "#1f77b4", true, false});
    r.svg("standard_phi.svg", svg::render(d));

    r.summary["s_bar_star"] = R.s_bar_star;
    r.summary["ratio_W"] = R.ratio_W;
    r.summary["ratio_s"] = R.ratio_s;
    r.summary["constrained_share"] = R.constrained_share;
    r.summary["binds_all"] = R.binds_all;
    r.summary["monotone_s"] = R.monotone_s;
    r.summary["cev"] = R.cev;
    if (!R.monotone_s) say("note: s*(z) is not monotone; z_hat uses the scan definition");
    say("s_bar* = " + num(R.s_bar_star) + ", W(s_bar*)/W_max = " + num(R.ratio_W) + ", s_bar*/E[s*] = " +
        num(R.ratio_s) + ", constrained share = " + num(R.constrained_share));
    return 0;
}

void apply_sweep_value(RunConfig& c, const std::string& param, const std::string& v)
{
    if (param == "dist") {
        if (v == "uniform") c.cal.dist.kind = DistKind::Uniform;
        else if (v == "left" || v == "right") {
            c.cal.dist.kind = DistKind::ShiftedBeta;
            c.cal.dist.alpha = v == "left" ? 1.0 : 18.0;
            c.cal.dist.beta = v == "left" ? 18.0 : 1.0;
        } else throw ValidationError("dist sweep values are uniform, left, right");
        return;
    }
    apply_key(c, canonical_key(param), v);
    validate(c);
}

int cmd_sweep(Run& r)
{
    const auto& c0 = r.cfg;
    require(!c0.sweep_values.empty(), "sweep.values is empty");
    static const std::vector<std::string> allowed{"lambda", "delta", "beta", "n_inputs", "N", "psi", "m", "dist"};
    require(std::find(allowed.begin(), allowed.end(), c0.sweep_param) != allowed.end(),
            "sweep.param must be one of lambda, delta, beta, n_inputs, psi, m, dist");
    if (c0.sweep_target == "standard") {
        require(c0.sweep_param != "dist", "standard sweeps take a numeric parameter");
        std::vector<double> values;
        std::vector<StandardResult> res;
        Table t{{"param", "value", "ratio_W", "ratio_s", "constrained_share", "s_bar_star", "binds_all"}, {}};
        for (size_t k = 0; k < c0.sweep_values.size(); ++k) {
            std::cerr << "[" << k + 1 << "/" << c0.sweep_values.size() << "] " << c0.sweep_param << "="
                      << c0.sweep_values[k] << "\n";
            RunConfig c = c0;
            apply_sweep_value(c, c0.sweep_param, c0.sweep_values[k]);
            auto R = run_standard(problem_of(c), c);
            values.push_back(detail::to_double("sweep.values", c0.sweep_values[k]));
            t.add_row({c0.sweep_param, c0.sweep_values[k], num(R.ratio_W), num(R.ratio_s), num(R.constrained_share),
                       num(R.s_bar_star), R.binds_all ? "1" : "0"});
            res.push_back(std::move(R));
        }
        r.csv("sweep.csv", t);
        auto rep = standard_report(c0.sweep_param, values, res);
        if (rep.has_flags) {
            r.summary["direction_ratio_W"] = rep.dir_ratio_W;
            r.summary["direction_ratio_s"] = rep.dir_ratio_s;
            r.summary["direction_share"] = rep.dir_share;
            say("directions (+1 up, -1 down, 0 mixed): ratio_W " + std::to_string(rep.dir_ratio_W) + ", ratio_s " +
                std::to_string(rep.dir_ratio_s) + ", share " + std::to_string(rep.dir_share));
        }
        return 0;
    }
    std::vector<std::string> cols{"param", "value"};
    for (const auto& k : aggregate_columns()) cols.push_back(k);
    for (const char* k : {"f_planner", "R_planner", "W_planner", "mean_s", "mean_S"}) cols.push_back(k);
    Table t{cols, {}};
    Table prof{{"param", "value", "z", "s", "S_planner"}, {}};
    svg::Chart shapes;
    shapes.title = "Specialization function by productivity distribution";
    shapes.xlabel = "productivity z";
    shapes.ylabel = "s*(z)";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (size_t k = 0; k < c0.sweep_values.size(); ++k) {
        std::cerr << "[" << k + 1 << "/" << c0.sweep_values.size() << "] " << c0.sweep_param << "="
                  << c0.sweep_values[k] << "\n";
        RunConfig c = c0;
        apply_sweep_value(c, c0.sweep_param, c0.sweep_values[k]);
        auto pr = problem_of(c);
        auto eq = solve_equilibrium(pr, c);
        auto pl = solve_planner_for(pr, c);
        std::vector<std::string> row{c0.sweep_param, c0.sweep_values[k]};
        for (double v : aggregate_row(pr, eq)) row.push_back(num(v));
        double ms = expectation(ExpKind::Plain, pr.grid, eq.st.c, eq.s());
        double mS = expectation(ExpKind::Plain, pr.grid, pl.st.c, pl.s());
        for (double v : {pl.f(), pl.st.R, pl.W(), ms, mS}) row.push_back(num(v));
        t.add_row(row);
        for (size_t i = 0; i < pr.grid.size(); ++i)
            prof.add_row({c0.sweep_param, c0.sweep_values[k], num(pr.grid.z[i]), num(eq.s()[i]), num(pl.s()[i])});
        shapes.series.push_back({c0.sweep_param + "=" + c0.sweep_values[k], pr.grid.z, eq.s(), colors[k % 6], false,
                                 false});
        if (c0.sweep_param == "dist")
            r.summary["shape_" + c0.sweep_values[k]] =
                profile_shape(eq.s()) == ShapeClass::Nondecreasing
                    ? "nondecreasing"
                    : (profile_shape(eq.s()) == ShapeClass::InteriorExtremum ? "interior-extremum" : "other");
    }
    r.csv("sweep.csv", t);
    r.csv("profiles.csv", prof);
    if (c0.sweep_param == "dist") r.svg("specialization.svg", svg::render(shapes));
    say("swept " + c0.sweep_param + " over " + std::to_string(c0.sweep_values.size()) + " values");
    return 0;
}

int cmd_overspec(Run& r)
{
    const auto& c = r.cfg;
    std::vector<double> grid;
    for (int k = 1; k * c.scan_step < 1.0 - 1e-12; ++k) grid.push_back(k * c.scan_step);
    std::vector<int> Ns;
    for (int N = c.scan_n_min; N <= c.scan_n_max; ++N) Ns.push_back(N);
    auto g = overspec_gridscan(grid, grid, Ns);
    double lo = 0.0, hi = *std::max_element(g.gaps.begin(), g.gaps.end());
    int B = c.scan_bins;
    std::vector<double> edges(B + 1);
    for (int b = 0; b <= B; ++b) edges[b] = lo + (hi - lo) * b / B;
    std::vector<long> counts(B, 0);
    long below = 0;
    for (double v : g.gaps) {
        if (v < lo) {
            ++below;
            continue;
        }
        int b = std::min(B - 1, int((v - lo) / (hi - lo) * B));
        ++counts[b];
    }
    Table h{{"bin_low", "bin_high", "count"}, {}};
    for (int b = 0; b < B; ++b) h.add({edges[b], edges[b + 1], double(counts[b])});
    r.csv("overspec_histogram.csv", h);
    Table s{{"min_gap", "arg_delta", "arg_f", "arg_N", "min_chi1", "cells", "chi2_negative"}, {}};
    s.add({g.min_gap, g.arg_delta, g.arg_f, double(g.arg_N), g.min_chi1, double(g.cells), double(g.chi2_negative)});
    r.csv("overspec_summary.csv", s);
    svg::Histogram hg{"Distribution of N - N_bar* over the grid", "N - N_bar*", edges, counts};
    r.svg("overspec_histogram.svg", svg::render(hg));
    r.summary["min_gap"] = g.min_gap;
    r.summary["cells"] = g.cells;
    r.summary["cells_below_zero"] = below;
    r.summary["chi2_negative"] = g.chi2_negative;
    r.summary["min_chi1"] = g.min_chi1;
    say("cells=" + std::to_string(g.cells) + " min(N - N_bar*) = " + num(g.min_gap) + " at delta=" +
        num(g.arg_delta) + " f=" + num(g.arg_f) + " N=" + std::to_string(g.arg_N));
    return 0;
}

int cmd_simulate(Run& r)
{
    auto pr = problem_of(r.cfg);
    auto eq = solve_equilibrium(pr, r.cfg);
    SimConfig sc;
    sc.n_finals = r.cfg.sim_finals;
    sc.T = r.cfg.sim_T;
    sc.burn_in = r.cfg.sim_burn_in;
    sc.batches = r.cfg.sim_batches;
    sc.seed = r.cfg.seed;
    auto st = simulate(sc, pr, eq);
    auto an = analytic_for(pr, eq, st.decile_edges);
    auto rep = compare_sim_analytic(st, an);
    Table t{{"statistic", "simulated", "se", "analytic", "z_score"}, {}};
    auto add = [&](const char* nm, const Estimate& e, double a) {
        if (!e.defined()) return;
        double z = e.se > 0 ? (e.mean - a) / e.se : 0.0;
        t.add_row({nm, num(e.mean), num(e.se), num(a), num(z)});
    };
    add("f", st.f, an.f);
    add("mu", st.mu, an.mu);
    add("nu", st.nu, an.nu);
    add("R", st.R, an.R);
    add("Y", st.Y, an.Y);
    r.csv("simulation.csv", t);
    Table d{{"decile", "z_low", "z_high", "D_simulated", "D_analytic"}, {}};
    for (int k = 0; k < 10; ++k)
        d.add({double(k + 1), st.decile_edges[k], st.decile_edges[k + 1], st.D_decile[k], an.D_decile[k]});
    r.csv("simulation_deciles.csv", d);
    r.summary["tag"] = sim_tag_name(st.tag);
    r.summary["pass"] = rep.pass;
    r.summary["rank_corr"] = rep.rank_corr;
    r.summary["accounting_gap"] = st.accounting_gap;
    for (size_t k = 0; k < rep.names.size(); ++k) r.summary["z_" + rep.names[k]] = rep.z[k];
    std::string line = std::string(sim_tag_name(st.tag)) + ": ";
    for (size_t k = 0; k < rep.names.size(); ++k) line += "z_" + rep.names[k] + "=" + num(rep.z[k]) + " ";
    say(line + "rank_corr=" + num(rep.rank_corr) + (rep.pass ? " PASS" : " FAIL"));
    return 0;
}

int cmd_complexity(Run& r)
{
    auto pr = problem_of(r.cfg);
    RunConfig c = r.cfg;
    if (c.model == "static") c.model = "dynamic";
    auto eq = solve_equilibrium(pr, c);
    const auto& S = eq.st;
    double ls = r.cfg.labor_share >= 0 ? r.cfg.labor_share : S.w * S.labor / S.Y;
    auto ci = optimal_complexity(S.c.f, ls, S.mu);
    double lam = pr.p.lambda;
    Table t{{"f", "mu", "labor_share", "N_star", "N_eff", "N_eff_dyn", "over_complex", "U", "N_bar", "lambda_bar"},
            {}};
    t.add({S.c.f, S.mu, ls, ci.N_star, ci.N_eff, ci.N_eff_dyn, ci.over_complex ? 1.0 : 0.0,
           complexity_bound_U(pr.p.N(), lam), complexity_bound_Nbar(lam), complexity_lambda_bar()});
    r.csv("complexity.csv", t);
    Table g{{"N", "M", "G", "U"}, {}};
    for (int N = 1; N <= 10; ++N) {
        double M = efficiency_M(S.c.f, N, pr.p.beta, pr.p.delta);
        g.add({double(N), M, N * M - 1.0, complexity_bound_U(N, lam)});
    }
    r.csv("complexity_gaps.csv", g);
    r.summary["N_star"] = ci.N_star;
    r.summary["N_eff"] = ci.N_eff;
    r.summary["N_eff_dyn"] = ci.N_eff_dyn;
    r.summary["over_complex"] = ci.over_complex;
    say("N* = " + num(ci.N_star) + ", N_eff = " + num(ci.N_eff) + ", N_eff_dyn = " + num(ci.N_eff_dyn) +
        " (labor share " + num(ls) + ")");
    return 0;
}

KeyValues load_file(const std::string& path)
{
    if (path.empty()) return {};
    if (fs::path(path).extension() == ".json") {
        std::ifstream in(path);
        require(bool(in), "cannot read manifest " + path);
        json m;
        try {
            in >> m;
        } catch (const std::exception& e) {
            throw ValidationError("bad manifest " + path + ": " + e.what());
        }
        require(m.contains("config") && m["config"].is_object(), "manifest has no config object");
        KeyValues kv;
        for (auto& [k, v] : m["config"].items()) {
            require(v.is_string(), "manifest value for " + k + " must be a string");
            kv.emplace_back(k, v.get<std::string>());
        }
        return kv;
    }
    return read_config_file(path);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"chainform: supply-chain formation solver"};
    app.require_subcommand(1);
    std::string config_path, out_flag;
    std::vector<std::string> sets;

    using Handler = int (*)(Run&);
    const std::vector<std::tuple<std::string, std::string, Handler, std::string>> commands{
        {"solve-static", "static equilibrium and planner", cmd_solve, "static"},
        {"solve-dynamic", "dynamic steady state and planner", cmd_solve, "dynamic"},
        {"solve-links", "link-destruction steady state, planner and recovery path", cmd_solve, "links"},
        {"planner", "planner allocation and decentralization check", cmd_planner, ""},
        {"decompose", "externality decomposition of the welfare gradient", cmd_decompose, ""},
        {"subsidy", "targeted subsidy schedule", cmd_subsidy, ""},
        {"standard", "optimal specialization standard", cmd_standard, ""},
        {"sweep", "parameter sweep", cmd_sweep, ""},
        {"overspec-scan", "grid scan of N - N_bar* in the link model", cmd_overspec, ""},
        {"simulate", "finite-agent simulation against the analytic solution", cmd_simulate, ""},
        {"complexity", "complexity indices", cmd_complexity, ""},
    };
    std::map<CLI::App*, size_t> which;
    for (size_t k = 0; k < commands.size(); ++k) {
        auto* sub = app.add_subcommand(std::get<0>(commands[k]), std::get<1>(commands[k]));
        sub->add_option("-c,--config", config_path, "key=value file or a previous manifest.json");
        sub->add_option("-o,--out", out_flag, "output directory");
        sub->add_option("--set", sets, "key=value override (repeatable)");
        sub->add_option("assignments", sets, "key=value overrides");
        which[sub] = k;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const auto& spec = commands[which.at(sub)];
        KeyValues flags;
        for (const auto& s : sets) {
            auto kv = parse_assignment(s);
            flags.insert(flags.end(), kv.begin(), kv.end());
        }
        const std::string& forced = std::get<3>(spec);
        if (!forced.empty()) flags.emplace_back("run.model", forced);
        Run run;
        run.command = std::get<0>(spec);
        run.cfg = resolve_config(load_file(config_path), flags);
        std::string dir = out_flag;
        if (dir.empty()) dir = run.cfg.out_dir;
        if (dir.empty())
            if (const char* env = std::getenv("CHAINFORM_OUT_DIR")) dir = env;
        if (dir.empty()) dir = "chainform_out";
        run.cfg.out_dir = dir;
        run.dir = dir;
        fs::create_directories(run.dir);
        int rc = std::get<2>(spec)(run);
        run.manifest();
        std::cout << "wrote " << run.outputs.size() << " files to " << run.dir.string() << "\n";
        return rc;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver did not converge: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
