#pragma once

#include "dyn_math.hpp"
#include "errors.hpp"
#include "forms.hpp"
#include "grid.hpp"
#include "link_math.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chainform {

enum class Model { Static, Dynamic, SteadyState, Links };
enum class Contract { Baseline, NonContingent, Bargaining };

inline const char* model_name(Model m)
{
    switch (m) {
    case Model::Static: return "static";
    case Model::Dynamic: return "dynamic";
    case Model::SteadyState: return "steady-state";
    case Model::Links: return "links";
    }
    return "?";
}

struct Problem {
    ModelParams p;
    FunctionalForms F;
    ZGrid grid;
};

inline Problem make_problem(const Calibration& cal, int n_nodes = 200)
{
    cal.params.validate();
    Problem pr{cal.params, cal.forms(), {}};
    pr.grid = build_zgrid(pr.F.dist, n_nodes);
    return pr;
}

struct Setting {
    Model model = Model::Static;
    bool planner = false;
    Contract contract = Contract::Baseline;
    double xi = 0.0;                  // bargaining weight of final producers
    std::vector<double> tau;          // per-node transfer; enters as A - (x - tau)
    std::optional<double> cap;        // specialization standard
    bool links_nu_zero = false;       // diagnostic: searchers all inactive last period
    std::optional<double> links_rho;  // diagnostic: replaces rho in demand, multiplier and mu law
    MuLaw links_law = MuLaw::Retention;
};

struct SolverOptions {
    double damping = 0.5;
    double tol = 1e-10;
    int max_iter = 5000;
    bool multistart = false;
    int scan_points = 48;
};

// Aggregates implied by a specialization profile.
struct State {
    std::vector<double> s, A, x, K, net, P, D;
    CompatAggregates c;
    double N = 1;
    double Emax = 0, Ehat = 0, qbar = 0, labor = 0, w = 0;
    double mu = 1, theta = 1, nu = 0, rho1 = 1, f_tilde = 1, R = 0;
    double chi1 = 1, chi2 = 1, mult = 1, net_coef = 0;
    double Y = 0, W = 0;
};

inline State evaluate(const Problem& pr, const Setting& st, const std::vector<double>& s)
{
    const auto& p = pr.p;
    const auto& F = pr.F;
    const auto& G = pr.grid;
    size_t n = G.size();
    State S;
    S.s = s;
    S.N = p.N();
    double N = S.N, lam = p.lambda, d = p.delta;
    S.c = compat_aggregates(G, F, s, lam);
    double f = S.c.f;
    S.A.resize(n);
    std::vector<double> q(n);
    for (size_t i = 0; i < n; ++i) {
        S.A[i] = F.A(s[i], G.z[i]);
        q[i] = F.q(s[i]) * G.g[i];
    }
    S.x = max_leq_profile(G, S.c, S.A);
    S.Emax = expectation(ExpKind::MaxAll, G, S.c, S.A);
    S.Ehat = f > 0 ? S.Emax / f : 0.0;
    S.qbar = G.integrate(q);
    S.labor = N * p.m * S.qbar;
    S.w = S.labor < 1.0 ? p.psi / (1.0 - S.labor) : std::numeric_limits<double>::infinity();

    double fN = std::pow(f, N), fN1 = std::pow(f, N - 1.0);
    double others = fN1;     // probability the buyer completes its other inputs
    double demand_div = 1.0; // stationary demand divisor
    double sw = search_weight(p.beta, d);
    switch (st.model) {
    case Model::Static:
        S.mu = 1.0;
        S.theta = 1.0 / p.m;
        S.mult = 1.0;
        S.R = fN;
        S.net_coef = N - 1.0;
        break;
    case Model::Dynamic:
    case Model::SteadyState:
        S.mu = stationary_mu(f, N, d);
        S.theta = S.mu / p.m;
        demand_div = d;
        S.R = fN;
        if (st.model == Model::Dynamic) {
            S.mult = dynamic_multiplier(p.beta, d);
            S.net_coef = (N - 1.0) - sw * fN * N;
        } else {
            S.mult = 1.0;
            S.net_coef = N * S.mu - 1.0;
        }
        break;
    case Model::Links: {
        auto lm = stationary_mu_links(std::clamp(f, 1e-12, 1.0 - 1e-12), N, d, st.links_nu_zero, st.links_law,
                                      st.links_rho ? *st.links_rho : -1.0);
        S.mu = lm.mu;
        S.nu = lm.nu;
        S.rho1 = lm.rho1;
        S.f_tilde = lm.f_tilde;
        S.theta = S.mu / p.m;
        double r = st.links_rho ? *st.links_rho : S.rho1;
        others = S.f_tilde;
        demand_div = 1.0 - (1.0 - d) * r;
        S.mult = (1.0 - (1.0 - d) * r) * (1.0 + p.beta * (1.0 - d) * r);
        S.R = resilience_links(f, N, d, S.nu);
        auto chi = chi_multipliers(f, N, d, S.mu, S.nu);
        S.chi1 = chi.chi1;
        S.chi2 = chi.chi2;
        S.net_coef = chi.chi1 * (N - 1.0) - chi.chi2 * sw * fN * N;
        break;
    }
    }
    if (st.contract == Contract::NonContingent) others = 1.0;
    double scale = st.contract == Contract::Bargaining ? (1.0 - st.xi) : 1.0;

    S.K.resize(n);
    S.P.resize(n);
    S.D.resize(n);
    S.net.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double e = std::exp(-lam * (S.c.phi_bar - S.c.phi_hat[i]));
        S.P[i] = S.c.phi[i] * e * others;
        S.D[i] = S.theta * lam * S.P[i] / demand_div;
        S.K[i] = scale * S.theta * lam * e * others / demand_div;
        if (st.planner) S.net[i] = S.net_coef * std::exp(-lam * S.c.phi_hat[i]) * S.Ehat;
        if (!st.tau.empty()) S.net[i] += st.tau[i];
    }
    // stationary active mass per searcher; equals 1/delta outside the link model
    double robust = st.model == Model::Static ? 1.0 : 1.0 / demand_div;
    S.Y = S.mu * S.R * robust * N * S.Ehat;
    S.W = S.labor < 1.0 ? S.Y + p.psi * std::log(1.0 - S.labor) : -std::numeric_limits<double>::infinity();
    return S;
}

// Node first-order condition; positive means the node wants more specialization.
inline double node_foc(const Problem& pr, const State& S, size_t i, double s)
{
    const auto& F = pr.F;
    double phi = F.phi(s), dphi = F.phi.d1(s);
    double Ai = F.a(s) - F.c(pr.grid.z[i]);
    return S.K[i] * (phi * F.a.d1(s) + S.mult * dphi * (Ai - S.x[i] + S.net[i])) - S.w * F.q.d1(s);
}

inline double node_foc_slope(const Problem& pr, const State& S, size_t i, double s)
{
    double h = 1e-6 * std::max(1.0, s);
    double lo = std::max(s - h, 1e-14);
    double hi = std::min(s + h, pr.F.s_max);
    return (node_foc(pr, S, i, hi) - node_foc(pr, S, i, lo)) / (hi - lo);
}

enum NodeFlag { Interior = 0, AtUpper = 1, AtLower = 2, Capped = 3 };

struct NodeChoice {
    double s = 0;
    int flag = Interior;
};

// Integral of fn over [a,b] with the grid's reference rule.
template <class Fn>
double rule_integral(const std::vector<double>& rx, const std::vector<double>& rw, Fn&& fn, double a, double b)
{
    double acc = 0.0;
    for (size_t k = 0; k < rx.size(); ++k) acc += rw[k] * fn(0.5 * (a + b) + 0.5 * (b - a) * rx[k]);
    return 0.5 * (b - a) * acc;
}

template <class Fn>
double refine_root(Fn&& fn, double a, double b)
{
    boost::uintmax_t it = 200;
    auto tolf = boost::math::tools::eps_tolerance<double>(50);
    auto r = boost::math::tools::toms748_solve(fn, a, b, tolf, it);
    return 0.5 * (r.first + r.second);
}

// Best local maximum of an objective on [0, smax] given its derivative fn:
// scan for +/- sign changes, refine, keep the root with the largest objective.
template <class Fn>
NodeChoice best_root(Fn&& fn, double smax, int scan_points, const std::vector<double>& rx,
                     const std::vector<double>& rw)
{
    double lo = 1e-12 * smax;
    std::vector<double> pts(scan_points + 1), vals(scan_points + 1);
    for (int k = 0; k <= scan_points; ++k) {
        double u = double(k) / scan_points;
        pts[k] = std::max(lo, smax * u * u);
        vals[k] = fn(pts[k]);
    }
    std::vector<double> roots;
    for (int k = 0; k < scan_points; ++k)
        if (vals[k] > 0 && vals[k + 1] <= 0) roots.push_back(vals[k + 1] == 0 ? pts[k + 1] : refine_root(fn, pts[k], pts[k + 1]));
    NodeChoice out;
    if (roots.empty()) {
        out.flag = vals.back() > 0 ? AtUpper : AtLower;
        out.s = vals.back() > 0 ? smax : 0.0;
        return out;
    }
    double best = roots[0], acc = 0.0, best_val = 0.0;
    for (size_t r = 1; r < roots.size(); ++r) {
        acc += rule_integral(rx, rw, fn, roots[r - 1], roots[r]);
        if (acc > best_val) {
            best_val = acc;
            best = roots[r];
        }
    }
    if (vals.back() > 0 && acc + rule_integral(rx, rw, fn, roots.back(), smax) > best_val) {
        out.s = smax;
        out.flag = AtUpper;
        return out;
    }
    out.s = best;
    return out;
}

inline NodeChoice node_best_response(const Problem& pr, const State& S, size_t i, int scan_points)
{
    return best_root([&](double s) { return node_foc(pr, S, i, s); }, pr.F.s_max, scan_points, pr.grid.ref_x,
                     pr.grid.ref_w);
}

// Cheap local update: bracket around the previous root.
inline std::optional<double> node_local_root(const Problem& pr, const State& S, size_t i, double prev)
{
    double smax = pr.F.s_max;
    double step = 0.05 * std::max(prev, 0.1);
    double a = std::max(prev - step, 1e-12 * smax), b = std::min(prev + step, smax);
    double fa = node_foc(pr, S, i, a), fb = node_foc(pr, S, i, b);
    for (int k = 0; k < 12 && !(fa > 0 && fb <= 0); ++k) {
        step *= 2;
        if (fa <= 0) {
            a = std::max(prev - step, 1e-12 * smax);
            fa = node_foc(pr, S, i, a);
        }
        if (fb > 0) {
            b = std::min(prev + step, smax);
            fb = node_foc(pr, S, i, b);
        }
        if ((a <= 1e-12 * smax && fa <= 0) || (b >= smax && fb > 0)) break;
    }
    if (!(fa > 0 && fb <= 0)) return std::nullopt;
    if (fb == 0) return b;
    return refine_root([&](double t) { return node_foc(pr, S, i, t); }, a, b);
}

struct Solution {
    Setting setting;
    State st;
    std::vector<int> flags;
    int iterations = 0;
    double fp_error = 0;
    double foc_residual = 0; // sup over interior nodes, relative to w q'
    bool soc_ok = true;
    bool multiplicity = false;

    const std::vector<double>& s() const { return st.s; }
    const std::vector<double>& x() const { return st.x; }
    double f() const { return st.c.f; }
    double W() const { return st.W; }
};

inline std::vector<double> best_response(const Problem& pr, const Setting& set, const State& S,
                                         const std::vector<double>& prev, bool full_scan, int scan_points,
                                         std::vector<int>& flags)
{
    size_t n = pr.grid.size();
    std::vector<double> out(n);
    flags.assign(n, Interior);
    for (size_t i = 0; i < n; ++i) {
        std::optional<double> r;
        if (!full_scan) r = node_local_root(pr, S, i, prev[i]);
        if (r) {
            out[i] = *r;
        } else {
            auto c = node_best_response(pr, S, i, scan_points);
            out[i] = c.s;
            flags[i] = c.flag;
        }
        if (set.cap && out[i] > *set.cap) {
            out[i] = *set.cap;
            flags[i] = Capped;
        }
    }
    return out;
}

inline Solution solve_once(const Problem& pr, const Setting& set, const SolverOptions& opt, std::vector<double> s)
{
    require(opt.damping > 0.0 && opt.damping <= 1.0, "damping must be in (0,1]");
    require(opt.tol > 0.0 && opt.max_iter > 0, "tolerance and max iterations must be positive");
    if (!set.tau.empty()) require(set.tau.size() == pr.grid.size(), "tau must have one entry per node");
    Solution sol;
    sol.setting = set;
    std::vector<int> flags;
    for (int it = 0; it < opt.max_iter; ++it) {
        State S = evaluate(pr, set, s);
        if (!(S.labor < 1.0)) throw ValidationError("labor infeasible: N m qbar >= 1");
        bool full = it == 0 || it % 25 == 0;
        auto snew = best_response(pr, set, S, s, full, opt.scan_points, flags);
        double err = 0.0;
        for (size_t i = 0; i < s.size(); ++i) err = std::max(err, std::abs(snew[i] - s[i]));
        if (err < opt.tol && !full) {
            // confirm with a global scan before accepting
            auto schk = best_response(pr, set, S, s, true, opt.scan_points, flags);
            double e2 = 0.0;
            for (size_t i = 0; i < s.size(); ++i) e2 = std::max(e2, std::abs(schk[i] - s[i]));
            if (e2 < opt.tol) {
                sol.iterations = it + 1;
                sol.fp_error = e2;
                s = schk;
                break;
            }
            snew = schk;
            err = e2;
        }
        for (size_t i = 0; i < s.size(); ++i) s[i] = (1.0 - opt.damping) * s[i] + opt.damping * snew[i];
        sol.fp_error = err;
        sol.iterations = it + 1;
        if (it + 1 == opt.max_iter)
            throw ConvergenceError(std::string("fixed point did not converge (") + model_name(set.model) +
                                   "), error " + std::to_string(err));
    }
    sol.st = evaluate(pr, set, s);
    sol.flags = flags;
    double res = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (flags[i] != Interior) continue;
        double scale = std::max(std::abs(sol.st.w * pr.F.q.d1(s[i])), 1e-12);
        res = std::max(res, std::abs(node_foc(pr, sol.st, i, s[i])) / scale);
        if (!(node_foc_slope(pr, sol.st, i, s[i]) < 0.0)) sol.soc_ok = false;
    }
    sol.foc_residual = res;
    if (!sol.soc_ok) throw ConvergenceError("second-order condition fails at a node");
    return sol;
}

inline Solution solve(const Problem& pr, const Setting& set, const SolverOptions& opt = {},
                      std::optional<std::vector<double>> s0 = std::nullopt)
{
    std::vector<double> s = s0 ? *s0 : std::vector<double>(pr.grid.size(), 0.25 * pr.F.s_max);
    Solution sol = solve_once(pr, set, opt, s);
    if (opt.multistart) {
        for (double frac : {0.1, 0.5, 0.8}) {
            Solution alt = solve_once(pr, set, opt, std::vector<double>(pr.grid.size(), frac * pr.F.s_max));
            double d = 0;
            for (size_t i = 0; i < s.size(); ++i) d = std::max(d, std::abs(alt.s()[i] - sol.s()[i]));
            if (d > 1e-6) sol.multiplicity = true;
        }
    }
    return sol;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace chainform
