#pragma once

#include "planner_static.hpp"

#include <cmath>
#include <vector>

namespace chainform {

inline Solution solve_dynamic(const Problem& pr, const SolverOptions& opt = {})
{
    Setting st;
    st.model = Model::Dynamic;
    return solve(pr, st, opt);
}

// Discounted-welfare planner.
inline Solution solve_planner_dynamic(const Problem& pr, const SolverOptions& opt = {})
{
    Setting st;
    st.model = Model::Dynamic;
    st.planner = true;
    return solve(pr, st, opt);
}

// Maximizer of steady-state welfare; the benchmark for standards.
inline Solution solve_planner_steady_state(const Problem& pr, const SolverOptions& opt = {})
{
    Setting st;
    st.model = Model::SteadyState;
    st.planner = true;
    return solve(pr, st, opt);
}

struct EfficiencyIndex {
    double M = 1, G = 0;
    double U = 0, N_bar = 0, lambda_bar = 0;
};

inline EfficiencyIndex efficiency_index(const ModelParams& p, double f)
{
    require(f > 0.0 && f < 1.0, "f must be in (0,1)");
    EfficiencyIndex e;
    double N = p.N();
    e.M = efficiency_M(f, N, p.beta, p.delta);
    e.G = N * e.M - 1.0;
    e.U = complexity_bound_U(N, p.lambda);
    e.N_bar = complexity_bound_Nbar(p.lambda);
    e.lambda_bar = complexity_lambda_bar();
    return e;
}

// Elasticity of phi_bar to lambda from centered differences of dynamic solves.
inline double elasticity_phibar_lambda(const Calibration& cal, int n_nodes = 200, double rel_step = 1e-3,
                                       const SolverOptions& opt = {})
{
    require(rel_step > 0.0 && rel_step < 0.5, "relative step must be in (0, 0.5)");
    auto phibar_at = [&](double lam) {
        Calibration c = cal;
        c.params.lambda = lam;
        return solve_dynamic(make_problem(c, n_nodes), opt).st.c.phi_bar;
    };
    double lam = cal.params.lambda, h = rel_step * lam;
    double up = phibar_at(lam + h), dn = phibar_at(lam - h), mid = phibar_at(lam);
    return (up - dn) / (2 * h) * lam / mid;
}

inline ExternalityDecomposition dynamic_externality_decomposition(const Problem& pr, const Solution& eq)
{
    require(eq.setting.model == Model::Dynamic, "dynamic decomposition needs a dynamic solution");
    return decompose(pr, eq);
}

inline SubsidySchedule subsidy_dynamic(const Problem& pr, const Solution& planner)
{
    require(planner.setting.model == Model::Dynamic, "dynamic subsidy needs a dynamic planner solution");
    return subsidy_from_planner(pr, planner);
}

inline SubsidySchedule subsidy_dynamic(const Problem& pr, const SolverOptions& opt = {})
{
    return subsidy_dynamic(pr, solve_planner_dynamic(pr, opt));
}

struct CustomizationPath {
    size_t node = 0;
    std::vector<double> s, D; // index t-1 holds period t
    double s_steady = 0, D_steady = 0;
    int sweeps = 0;
    bool interior = true; // false if some period had no interior FOC root
};

// Firm-level path with aggregates frozen at the steady state and D_0 = 0.
inline CustomizationPath customization_path(const Problem& pr, const Solution& eq, size_t node, int T,
                                            double tol = 1e-12, int max_sweeps = 500)
{
    require(T >= 1, "horizon must be >= 1");
    require(eq.setting.model == Model::Dynamic && !eq.setting.planner, "customization path needs a dynamic equilibrium");
    require(node < pr.grid.size(), "node out of range");
    const auto& S = eq.st;
    const auto& F = pr.F;
    double d = pr.p.delta, b = pr.p.beta;
    // S.K carries the stationary divisor delta; the path needs the per-period inflow
    double K = S.K[node] * d, x = S.x[node], zc = F.c(pr.grid.z[node]);
    CustomizationPath out;
    out.node = node;
    out.s_steady = S.s[node];
    out.D_steady = K * F.phi(out.s_steady) / d;
    out.s.assign(T, out.s_steady);
    out.D.assign(T, 0.0);
    // Largest interior root of the FOC. With a large inherited customer base the
    // one-period objective may have none and peak at s_max instead (new customers
    // abandoned); the corner is then taken and the path is flagged.
    bool corner = false;
    auto interior_root = [&](auto&& foc) {
        const int M = 96;
        double lo = 1e-12 * F.s_max, prev_s = lo, prev_v = foc(lo), root = -1.0;
        for (int k = 1; k <= M; ++k) {
            double u = double(k) / M, s = std::max(lo, F.s_max * u * u), v = foc(s);
            if (prev_v > 0 && v <= 0) root = v == 0 ? s : refine_root(foc, prev_s, s);
            prev_s = s;
            prev_v = v;
        }
        if (root >= 0) return root;
        corner = true;
        return best_root(foc, F.s_max, M, pr.grid.ref_x, pr.grid.ref_w).s;
    };
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // forward pass: current inherited demand, next-period choice from the last sweep
        double change = 0.0, Dlag = 0.0;
        corner = false;
        for (int t = 0; t < T; ++t) {
            double snext = t + 1 < T ? out.s[t + 1] : out.s_steady;
            double fut = F.a(snext) - zc - x;
            auto foc = [&](double s) {
                return (1.0 - d) * Dlag * F.a.d1(s) +
                       K * (F.phi(s) * F.a.d1(s) + F.phi.d1(s) * ((F.a(s) - zc - x) + b * (1.0 - d) * fut)) -
                       S.w * F.q.d1(s);
            };
            double sn = interior_root(foc);
            change = std::max(change, std::abs(sn - out.s[t]));
            out.s[t] = sn;
            out.D[t] = (1.0 - d) * Dlag + K * F.phi(sn);
            Dlag = out.D[t];
        }
        out.sweeps = sweep + 1;
        if (change < tol) break;
        if (sweep + 1 == max_sweeps) throw ConvergenceError("customization path did not converge");
    }
    out.interior = !corner;
    return out;
}

} // namespace chainform
