#pragma once

#include "static_eq.hpp"

#include <cmath>
#include <vector>

namespace chainform {

inline Solution solve_planner_static(const Problem& pr, const SolverOptions& opt = {})
{
    Setting st;
    st.model = Model::Static;
    st.planner = true;
    return solve(pr, st, opt);
}

// Bracketed terms of dW/ds(z). Negative total means the planner wants less specialization.
struct ExternalityDecomposition {
    std::vector<double> business_stealing, appropriability, network, search, total;
    std::vector<double> gradient; // theta lambda P (-phi'/phi) * total
};

inline ExternalityDecomposition decompose(const Problem& pr, const Solution& eq)
{
    require(!eq.setting.planner && eq.setting.tau.empty(), "decomposition needs a laissez-faire solution");
    require(eq.setting.contract == Contract::Baseline, "decomposition needs the baseline contract");
    const auto& S = eq.st;
    const auto& G = pr.grid;
    size_t n = G.size();
    double N = S.N;
    double search_coef = 0.0;
    if (eq.setting.model == Model::Dynamic)
        search_coef = search_weight(pr.p.beta, pr.p.delta) * std::pow(S.c.f, N) * N;
    double net_scale = eq.setting.model == Model::Links ? S.chi1 : 1.0;
    if (eq.setting.model == Model::Links)
        search_coef = S.chi2 * search_weight(pr.p.beta, pr.p.delta) * std::pow(S.c.f, N) * N;
    ExternalityDecomposition d;
    d.business_stealing.resize(n);
    d.appropriability.resize(n);
    d.network.resize(n);
    d.search.resize(n);
    d.total.resize(n);
    d.gradient.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double e = std::exp(-pr.p.lambda * S.c.phi_hat[i]);
        d.business_stealing[i] = expectation(ExpKind::MaxLeq, G, S.c, S.A, G.z[i]);
        d.appropriability[i] = -S.x[i];
        d.network[i] = -net_scale * (N - 1.0) * e * S.Ehat;
        d.search[i] = search_coef * e * S.Ehat;
        d.total[i] = d.business_stealing[i] + d.appropriability[i] + d.network[i] + d.search[i];
        double s = S.s[i];
        d.gradient[i] = S.theta * pr.p.lambda * S.P[i] * (-pr.F.phi.d1(s) / pr.F.phi(s)) * d.total[i];
    }
    return d;
}

inline ExternalityDecomposition externality_decomposition_static(const Problem& pr, const Solution& eq)
{
    require(eq.setting.model == Model::Static, "static decomposition needs a static solution");
    return decompose(pr, eq);
}

// dW/ds at node i by central differences of the welfare functional, per unit of N m gamma w_i.
inline double welfare_gradient_fd(const Problem& pr, const Setting& st, const std::vector<double>& s, size_t i,
                                  double h = 1e-5)
{
    auto up = s, dn = s;
    up[i] += h;
    dn[i] -= h;
    double dW = (evaluate(pr, st, up).W - evaluate(pr, st, dn).W) / (2 * h);
    return dW / (pr.p.N() * pr.p.m * pr.grid.g[i] * pr.grid.w[i]);
}

struct SubsidySchedule {
    double T_star = 0;
    std::vector<double> tau;
    std::vector<double> tau_rate;        // tau / x
    std::vector<double> tau_rate_direct; // from the integral form
    double tau_low = 0, tau_high = 0;
    double f = 0;
};

// Transfer schedule tau(z) = exp(-lambda phihat(z)) T*, evaluated at the planner allocation.
inline SubsidySchedule subsidy_from_planner(const Problem& pr, const Solution& planner)
{
    require(planner.setting.planner, "subsidy schedule needs a planner solution");
    const auto& S = planner.st;
    const auto& G = pr.grid;
    size_t n = G.size();
    double lam = pr.p.lambda;
    SubsidySchedule sc;
    sc.f = S.c.f;
    sc.T_star = S.net_coef * S.Ehat;
    sc.tau.resize(n);
    sc.tau_rate.resize(n);
    sc.tau_rate_direct.resize(n);
    std::vector<double> vphi(n);
    for (size_t i = 0; i < n; ++i) {
        sc.tau[i] = std::exp(-lam * S.c.phi_hat[i]) * sc.T_star;
        vphi[i] = S.A[i] * std::exp(lam * S.c.phi_hat[i]) * lam * S.c.phi[i] * G.g[i];
    }
    double all = 0.0;
    auto below = G.cumulative(vphi, &all);
    double coef = S.Ehat > 0 ? sc.T_star / S.Ehat : 0.0;
    for (size_t i = 0; i < n; ++i) {
        sc.tau_rate[i] = S.x[i] > 0 ? sc.tau[i] / S.x[i] : 0.0;
        sc.tau_rate_direct[i] = coef * ((1.0 - S.c.f) / S.c.f) * (1.0 + (all - below[i]) / below[i]);
    }
    sc.tau_low = sc.T_star;
    sc.tau_high = std::exp(-lam * S.c.phi_bar) * sc.T_star;
    return sc;
}

inline SubsidySchedule subsidy_static(const Problem& pr, const Solution& planner)
{
    require(planner.setting.model == Model::Static, "static subsidy needs a static planner solution");
    return subsidy_from_planner(pr, planner);
}

inline SubsidySchedule subsidy_static(const Problem& pr, const SolverOptions& opt = {})
{
    return subsidy_static(pr, solve_planner_static(pr, opt));
}

struct Decentralization {
    double deviation = 0;
    Solution taxed;
};

// Re-solve the market with the transfer schedule and compare with the planner profile.
inline Decentralization verify_decentralization(const Problem& pr, const Solution& planner,
                                                const std::vector<double>& tau, const SolverOptions& opt = {})
{
    Setting st = planner.setting;
    st.planner = false;
    st.tau = tau;
    Decentralization d{0.0, solve(pr, st, opt)};
    d.deviation = sup_diff(d.taxed.s(), planner.s());
    return d;
}

} // namespace chainform
