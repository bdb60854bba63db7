#pragma once

#include "dynamic_eq.hpp"
#include "link_math.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace chainform {

struct LinkOverrides {
    bool nu_zero = false;
    std::optional<double> rho; // replaces rho(f;N-1) in demand, the FOC multiplier and the mu law
    MuLaw law = MuLaw::Retention;
};

inline Setting links_setting(bool planner, const LinkOverrides& o = {})
{
    Setting st;
    st.model = Model::Links;
    st.planner = planner;
    st.links_nu_zero = o.nu_zero;
    st.links_rho = o.rho;
    st.links_law = o.law;
    return st;
}

inline Solution solve_links(const Problem& pr, const SolverOptions& opt = {}, const LinkOverrides& o = {})
{
    require(pr.p.delta < 1.0, "link model needs delta < 1");
    return solve(pr, links_setting(false, o), opt);
}

inline Solution solve_planner_links(const Problem& pr, const SolverOptions& opt = {}, MuLaw law = MuLaw::Retention)
{
    require(pr.p.delta < 1.0, "link model needs delta < 1");
    LinkOverrides o;
    o.law = law;
    return solve(pr, links_setting(true, o), opt);
}

struct LinkSummary {
    double mu = 0, nu = 0, rho1 = 0, f_tilde = 0, R_tilde = 0;
    double chi1 = 0, chi2 = 0, M_tilde = 0, N_bar_star = 0;
    double mu_residual = 0;
};

inline LinkSummary link_summary(const Problem& pr, const Solution& sol)
{
    require(sol.setting.model == Model::Links, "link summary needs a link-model solution");
    const auto& S = sol.st;
    LinkSummary L;
    L.mu = S.mu;
    L.nu = S.nu;
    L.rho1 = S.rho1;
    L.f_tilde = S.f_tilde;
    L.R_tilde = S.R;
    L.chi1 = S.chi1;
    L.chi2 = S.chi2;
    ChiMultipliers c{S.chi1, S.chi2, S.N < 2};
    L.M_tilde = efficiency_M_links(S.c.f, S.N, search_weight(pr.p.beta, pr.p.delta), c);
    L.N_bar_star = 1.0 / L.M_tilde;
    L.mu_residual = sol.setting.links_law == MuLaw::Retention
                        ? mu_links_residual_retention(S.mu, S.c.f, S.N, pr.p.delta, S.nu, S.rho1)
                        : mu_links_residual(S.mu, S.c.f, S.N, pr.p.delta, S.nu);
    return L;
}

struct RecoveryPath {
    std::vector<int> month;
    std::vector<double> active, output; // expected per final producer
};

// Expected output of a final producer that loses one input link in month 0.
// Active producers keep each link unless it is destroyed and not re-found;
// a producer that fails to restore production loses all links and searches all N.
inline RecoveryPath recovery_path(const Problem& pr, const Solution& sol, int months, int lead = 3)
{
    require(months >= 1 && lead >= 0, "recovery path needs months >= 1");
    require(sol.setting.model == Model::Links, "recovery path needs a link-model solution");
    const auto& S = sol.st;
    double f = S.c.f, N = S.N, d = pr.p.delta;
    double keep = rho(f, N, d), restart = std::pow(f, N);
    double level = N * S.Ehat;
    RecoveryPath r;
    for (int t = -lead; t < 0; ++t) {
        r.month.push_back(t);
        r.active.push_back(1.0);
        r.output.push_back(level);
    }
    double a = f * rho(f, N - 1.0, d);
    for (int t = 0; t <= months; ++t) {
        r.month.push_back(t);
        r.active.push_back(a);
        r.output.push_back(a * level);
        a = a * keep + (1.0 - a) * restart;
    }
    return r;
}

} // namespace chainform
