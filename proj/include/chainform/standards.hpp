#pragma once

#include "dynamic_eq.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace chainform {

struct StandardSolve {
    double s_bar = 0;
    Solution sol;
    double W = 0;
    double cev = 0; // W - W_laissez_faire (linear utility in consumption)
};

inline Solution solve_with_standard_raw(const Problem& pr, double s_bar, const SolverOptions& opt = {},
                                        std::optional<std::vector<double>> s0 = std::nullopt)
{
    require(s_bar > 0.0, "standard must be > 0");
    Setting st;
    st.model = Model::Dynamic;
    st.cap = s_bar;
    return solve(pr, st, opt, s0);
}

inline StandardSolve solve_with_standard(const Problem& pr, double s_bar, double W_lf, const SolverOptions& opt = {},
                                         std::optional<std::vector<double>> s0 = std::nullopt)
{
    StandardSolve r{s_bar, solve_with_standard_raw(pr, s_bar, opt, s0), 0, 0};
    r.W = r.sol.W();
    r.cev = r.W - W_lf;
    return r;
}

struct ScanOptions {
    int points = 24;
    double rel_tol = 1e-7;     // refinement tolerance relative to the scan width
    double lower_frac = 0.25;  // scan starts at lower_frac * min s*; extended while the argmax sits on it
};

struct StandardResult {
    double s_bar_star = 0, W_star = 0;
    double z_hat = 0, constrained_share = 0;
    double W_lf = 0, W_max = 0;
    double ratio_W = 0, ratio_s = 0; // W(s*)/W_max, s_bar*/E[s*]
    double cev = 0, cev_ratio = 0;   // level and share of (W_max - W_lf)
    double foc_residual = 0;         // dW/ds_bar at the optimum
    bool monotone_s = true;
    bool binds_all = false; // optimum below min s*: every firm constrained
    std::vector<double> curve_s, curve_W;
    Solution lf, constrained, planner;
};

// Lowest productivity whose unconstrained best response reaches the cap.
inline double z_hat_of(const Problem& pr, const Solution& capped, double s_bar)
{
    const auto& G = pr.grid;
    size_t n = G.size();
    std::vector<double> r(n);
    std::vector<int> flags;
    Setting loose = capped.setting;
    loose.cap.reset();
    r = best_response(pr, loose, capped.st, capped.s(), true, 48, flags);
    for (size_t i = 0; i < n; ++i) {
        if (r[i] >= s_bar) {
            if (i == 0) return G.z_low;
            double t = (s_bar - r[i - 1]) / (r[i] - r[i - 1]);
            return G.z[i - 1] + t * (G.z[i] - G.z[i - 1]);
        }
    }
    return G.z_high;
}

inline StandardResult optimal_standard(const Problem& pr, const ScanOptions& so = {}, const SolverOptions& opt = {})
{
    require(so.points >= 3, "scan needs at least 3 points");
    require(so.lower_frac > 0.0 && so.lower_frac <= 1.0, "lower_frac must be in (0,1]");
    StandardResult R;
    R.lf = solve_dynamic(pr, opt);
    R.planner = solve_planner_steady_state(pr, opt);
    R.W_lf = R.lf.W();
    R.W_max = R.planner.W();
    const auto& slf = R.lf.s();
    R.monotone_s = profile_shape(slf) == ShapeClass::Nondecreasing;
    double smin = *std::min_element(slf.begin(), slf.end());
    double hi = *std::max_element(slf.begin(), slf.end());
    double lo = so.lower_frac * smin;
    auto W_of = [&](double sb) { return solve_with_standard_raw(pr, sb, opt, slf).W(); };
    for (int k = 0; k < so.points; ++k) {
        double sb = lo + (hi - lo) * k / (so.points - 1);
        R.curve_s.push_back(sb);
        R.curve_W.push_back(sb >= hi ? R.W_lf : W_of(sb));
    }
    while (std::max_element(R.curve_W.begin(), R.curve_W.end()) == R.curve_W.begin() && lo > 1e-3 * pr.F.s_max) {
        lo *= 0.5;
        R.curve_s.insert(R.curve_s.begin(), lo);
        R.curve_W.insert(R.curve_W.begin(), W_of(lo));
    }
    size_t kbest = size_t(std::max_element(R.curve_W.begin(), R.curve_W.end()) - R.curve_W.begin());
    double a = R.curve_s[kbest > 0 ? kbest - 1 : 0];
    double b = R.curve_s[std::min(kbest + 1, R.curve_s.size() - 1)];
    double best_s = R.curve_s[kbest], best_W = R.curve_W[kbest];
    if (b > a) {
        boost::uintmax_t it = 100;
        int bits = std::max(8, int(-std::log2(so.rel_tol)));
        auto r = boost::math::tools::brent_find_minima([&](double sb) { return -W_of(sb); }, a, b, bits, it);
        if (-r.second > best_W) {
            best_s = r.first;
            best_W = -r.second;
        }
    }
    R.s_bar_star = best_s;
    R.binds_all = best_s < smin;
    R.constrained = solve_with_standard_raw(pr, best_s, opt, slf);
    R.W_star = R.constrained.W();
    R.ratio_W = R.W_star / R.W_max;
    double Es = expectation(ExpKind::Plain, pr.grid, R.lf.st.c, slf);
    R.ratio_s = best_s / Es;
    R.z_hat = z_hat_of(pr, R.constrained, best_s);
    std::vector<double> g = pr.grid.g;
    R.constrained_share = 1.0 - pr.grid.integrate_to(g, R.z_hat);
    R.cev = R.W_star - R.W_lf;
    R.cev_ratio = R.W_max > R.W_lf ? R.cev / (R.W_max - R.W_lf) : 0.0;
    double h = 1e-4 * (hi - lo);
    if (best_s + h < hi && best_s - h > lo) R.foc_residual = (W_of(best_s + h) - W_of(best_s - h)) / (2 * h);
    return R;
}

struct StandardRow {
    std::string label;
    double value = 0;
    double ratio_W = 0, ratio_s = 0, share = 0;
};

struct StandardTable {
    std::vector<StandardRow> rows;
    bool has_flags = false;
    int dir_ratio_W = 0, dir_ratio_s = 0, dir_share = 0; // +1 increasing, -1 decreasing, 0 neither
};

inline int direction(const std::vector<double>& v)
{
    bool up = true, down = true;
    for (size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) up = false;
        if (!(v[i] < v[i - 1])) down = false;
    }
    return up ? 1 : (down ? -1 : 0);
}

inline StandardTable standard_report(const std::string& label, const std::vector<double>& values,
                                     const std::vector<StandardResult>& results)
{
    require(values.size() == results.size() && !values.empty(), "report needs one result per sweep value");
    StandardTable t;
    std::vector<double> a, b, c;
    for (size_t i = 0; i < values.size(); ++i) {
        const auto& r = results[i];
        t.rows.push_back({label, values[i], r.ratio_W, r.ratio_s, r.constrained_share});
        a.push_back(r.ratio_W);
        b.push_back(r.ratio_s);
        c.push_back(r.constrained_share);
    }
    if (values.size() >= 2) {
        t.has_flags = true;
        t.dir_ratio_W = direction(a);
        t.dir_ratio_s = direction(b);
        t.dir_share = direction(c);
    }
    return t;
}

} // namespace chainform
