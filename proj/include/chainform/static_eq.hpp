#pragma once

#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace chainform {

struct StaticVariant {
    Contract contract = Contract::Baseline;
    double xi = 0.0;
};

inline const char* variant_tag(Contract c)
{
    switch (c) {
    case Contract::Baseline: return "baseline";
    case Contract::NonContingent: return "noncontingent";
    case Contract::Bargaining: return "bargaining";
    }
    return "?";
}

// x(z): expected best surplus among compatible rivals below z.
inline std::vector<double> offered_surplus(const Problem& pr, const std::vector<double>& s)
{
    require(s.size() == pr.grid.size(), "profile size must match grid");
    for (double v : s) require(v >= 0.0 && v <= pr.F.s_max * (1 + 1e-12), "s outside [0, s_max]");
    auto c = compat_aggregates(pr.grid, pr.F, s, pr.p.lambda);
    std::vector<double> A(s.size());
    for (size_t i = 0; i < s.size(); ++i) A[i] = pr.F.A(s[i], pr.grid.z[i]);
    return max_leq_profile(pr.grid, c, A);
}

// Same object from its differential form x' = lambda phi gamma (A - x), x(z_low) = 0,
// integrated by RK4 on a fine mesh over interpolated profiles.
inline std::vector<double> offered_surplus_ode(const Problem& pr, const std::vector<double>& s, int steps_per_node = 20)
{
    const auto& G = pr.grid;
    ProfileInterp si(G, s);
    double lam = pr.p.lambda;
    auto rhs = [&](double z, double x) {
        double sv = si(z);
        return lam * pr.F.phi(sv) * pr.F.gamma(z) * (pr.F.A(sv, z) - x);
    };
    std::vector<double> out(G.size());
    double z = G.z_low, x = 0.0;
    for (size_t i = 0; i < G.size(); ++i) {
        double target = G.z[i];
        int n = std::max(1, steps_per_node);
        double h = (target - z) / n;
        for (int k = 0; k < n; ++k) {
            double k1 = rhs(z, x), k2 = rhs(z + h / 2, x + h / 2 * k1), k3 = rhs(z + h / 2, x + h / 2 * k2),
                   k4 = rhs(z + h, x + h * k3);
            x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            z += h;
        }
        z = target;
        out[i] = x;
    }
    return out;
}

inline Setting static_setting(const StaticVariant& v = {})
{
    require(v.xi >= 0.0 && v.xi < 1.0, "bargaining weight must be in [0,1)");
    Setting st;
    st.model = Model::Static;
    st.contract = v.contract;
    st.xi = v.xi;
    return st;
}

inline Solution solve_static(const Problem& pr, const StaticVariant& v = {}, const SolverOptions& opt = {})
{
    return solve(pr, static_setting(v), opt);
}

inline std::pair<double, double> output_and_welfare_static(const Solution& eq) { return {eq.st.Y, eq.st.W}; }

// Seller value theta lambda P(s,x) (A - x) - w q(s) with the rival-offer CDF G(x)
// read off the solved equilibrium.
inline double seller_value(const Problem& pr, const Solution& eq, size_t i, double s, double x)
{
    const auto& S = eq.st;
    const auto& xs = S.x;
    double Gx;
    if (x <= xs.front()) Gx = 0.0;
    else if (x >= xs.back()) Gx = 1.0;
    else {
        size_t k = size_t(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        double t = (x - xs[k - 1]) / std::max(xs[k] - xs[k - 1], 1e-300);
        Gx = S.c.G[k - 1] + t * (S.c.G[k] - S.c.G[k - 1]);
    }
    double others = eq.setting.contract == Contract::NonContingent ? 1.0 : std::pow(S.c.f, S.N - 1.0);
    double P = pr.F.phi(s) * std::exp(-pr.p.lambda * S.c.phi_bar * (1.0 - Gx)) * others;
    return S.theta * pr.p.lambda * P * (pr.F.A(s, pr.grid.z[i]) - x) - S.w * pr.F.q(s);
}

// Cross-partial d2V/(ds dx) at the solved point, by central differences.
inline std::vector<double> seller_cross_partials(const Problem& pr, const Solution& eq)
{
    std::vector<double> out(pr.grid.size());
    for (size_t i = 0; i < out.size(); ++i) {
        double s = eq.s()[i], x = eq.x()[i];
        double hs = 1e-4 * std::max(1.0, s), hx = 1e-4 * std::max(1.0, x);
        out[i] = (seller_value(pr, eq, i, s + hs, x + hx) - seller_value(pr, eq, i, s + hs, x - hx) -
                  seller_value(pr, eq, i, s - hs, x + hx) + seller_value(pr, eq, i, s - hs, x - hx)) /
                 (4 * hs * hx);
    }
    return out;
}

enum class ShapeClass { Nondecreasing, InteriorExtremum, Other };

inline ShapeClass profile_shape(const std::vector<double>& s, double tol = 1e-9)
{
    bool up = true;
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i] < s[i - 1] - tol) up = false;
    if (up) return ShapeClass::Nondecreasing;
    auto mn = std::min_element(s.begin(), s.end()) - s.begin();
    auto mx = std::max_element(s.begin(), s.end()) - s.begin();
    long last = long(s.size()) - 1;
    if ((mn > 0 && mn < last) || (mx > 0 && mx < last)) return ShapeClass::InteriorExtremum;
    return ShapeClass::Other;
}

} // namespace chainform
