#include "common.hpp"

#include <cmath>

using namespace chainform;
using namespace testutil;

namespace {

// Bisection on a real-valued N for N*M(N) = 1 along solved equilibria.
template <class Solve, class Gap>
double neutral_N(Solve&& solve, Gap&& gap, double lo, double hi)
{
    double glo = gap(solve(lo), lo);
    for (int i = 0; i < 50; ++i) {
        double mid = 0.5 * (lo + hi);
        double g = gap(solve(mid), mid);
        if ((g > 0) == (glo > 0)) {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("dynamic_eq")
{
    TEST_CASE("stationary searching mass")
    {
        CHECK(stationary_mu(0.6, 3, 1.0) == 1.0);
        CHECK(stationary_mu(0.0, 3, 0.1) == 1.0);
        CHECK(stationary_mu(1.0, 3, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
        double prev = 1.0;
        for (double f = 0.05; f < 1.0; f += 0.05) {
            double mu = stationary_mu(f, 3, 0.1);
            CHECK(mu >= 0.1);
            CHECK(mu <= 1.0);
            CHECK(mu < prev);
            CHECK(stationary_mu(f, 4, 0.1) > mu);
            prev = mu;
        }
    }

    TEST_CASE("delta = 1 collapses to the static model")
    {
        auto c = bench();
        c.params.delta = 1.0;
        auto pr = make_problem(c);
        CHECK(sup_diff(solve_dynamic(pr).s(), solve_static(pr).s()) <= 1e-9);
    }

    TEST_CASE("mean specialization rises as disruptions become rarer")
    {
        std::vector<double> m;
        for (double d : {0.15, 0.10, 0.05}) {
            auto c = bench();
            c.params.delta = d;
            m.push_back(mean(solve_dynamic(make_problem(c)).s()));
        }
        CHECK(direction(m) == 1);
    }

    TEST_CASE("benchmark finding probability")
    {
        CHECK(std::abs(solve_dynamic(bench_problem()).f() - 0.62) <= 0.02);
    }

    TEST_CASE("resilience")
    {
        CHECK(resilience(0.6, 3) == doctest::Approx(0.216).epsilon(1e-14));
        CHECK(resilience(0.37, 1) == 0.37);
        CHECK(resilience(1.0, 5) == 1.0);
    }

    TEST_CASE("planner: S <= s*, higher resilience and welfare")
    {
        for (int N : {2, 3, 4}) {
            auto pr = make_problem(bench(N));
            auto eq = solve_dynamic(pr);
            auto pl = solve_planner_dynamic(pr);
            for (size_t i = 0; i < pr.grid.size(); ++i) CHECK(pl.s()[i] <= eq.s()[i]);
            CHECK(pl.st.R >= eq.st.R);
            CHECK(pl.W() >= eq.W());
        }
    }

    TEST_CASE("planner equals equilibrium where N M(N) = 1")
    {
        auto solve_at = [](double N) {
            auto c = bench();
            c.params.n_real = N;
            return make_problem(c);
        };
        auto gap = [](const Problem& pr, double N) {
            return efficiency_gap(solve_dynamic(pr).f(), N, pr.p.beta, pr.p.delta);
        };
        double N0 = neutral_N(solve_at, gap, 1.0, 2.0);
        CHECK(N0 > 1.0);
        CHECK(N0 < 2.0);
        auto pr = solve_at(N0);
        CHECK(sup_diff(solve_planner_dynamic(pr).s(), solve_dynamic(pr).s()) <= 1e-6);
    }

    TEST_CASE("efficiency index bounds and monotonicity in delta")
    {
        CHECK(efficiency_M(1e-9, 3, 0.996, 0.1) == doctest::Approx(1.0));
        CHECK(efficiency_M(1.0 - 1e-12, 3, 1.0 - 1e-9, 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
        for (double f : {0.1, 0.5, 0.9})
            for (double d : {0.01, 0.5, 1.0}) {
                double M = efficiency_M(f, 3, 0.996, d);
                CHECK(M > 0.5);
                CHECK(M <= 1.0);
            }
        double prev = -1e300;
        for (int k = 0; k < 50; ++k) {
            double G = efficiency_gap(0.62, 3, 0.996, 0.01 + 0.98 * k / 49.0);
            CHECK(G > prev);
            prev = G;
        }
    }

    TEST_CASE("complexity bound")
    {
        double lb = complexity_lambda_bar();
        CHECK(complexity_bound_U(complexity_bound_Nbar(lb), lb) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(complexity_bound_U(complexity_bound_Nbar(0.5 * lb), 0.5 * lb) < 1.0);
    }

    TEST_CASE("decomposition: N = 1 with patient firms and easy search favors more specialization")
    {
        auto c = bench(1);
        c.params.delta = 0.01;
        c.params.lambda = 200.0;
        auto pr = make_problem(c);
        auto eq = solve_dynamic(pr);
        auto d = dynamic_externality_decomposition(pr, eq);
        for (size_t i = 0; i < pr.grid.size(); ++i) {
            CHECK(d.total[i] > 0.0);
            CHECK(std::abs(d.business_stealing[i] + d.appropriability[i]) <= 1e-9);
        }
    }

    TEST_CASE("decomposition: benchmark is negative everywhere")
    {
        const auto& pr = bench_problem();
        auto d = dynamic_externality_decomposition(pr, solve_dynamic(pr));
        for (double t : d.total) CHECK(t < 0.0);
    }

    TEST_CASE("dynamic transfer schedule")
    {
        auto pr1 = make_problem(bench(1));
        auto pl1 = solve_planner_dynamic(pr1);
        auto sc1 = subsidy_dynamic(pr1, pl1);
        double M1 = efficiency_M(pl1.f(), 1, pr1.p.beta, pr1.p.delta);
        CHECK(sc1.T_star < 0.0);
        CHECK(sc1.T_star == doctest::Approx((M1 - 1) * pl1.st.Ehat).epsilon(1e-12));

        const auto& pr = bench_problem();
        auto pl = solve_planner_dynamic(pr);
        auto sc = subsidy_dynamic(pr, pl);
        for (size_t i = 0; i < sc.tau.size(); ++i) {
            CHECK(sc.tau[i] > 0.0);
            if (i) CHECK(sc.tau[i] < sc.tau[i - 1]);
        }
        CHECK(verify_decentralization(pr, pl, sc.tau).deviation <= 1e-9);
    }

    TEST_CASE("customization path: first period below the steady state")
    {
        const auto& pr = bench_problem();
        auto eq = solve_dynamic(pr);
        auto one = customization_path(pr, eq, 100, 1);
        CHECK(one.s[0] < one.s_steady);
        CHECK(one.D[0] == doctest::Approx(eq.st.K[100] * pr.p.delta * pr.F.phi(one.s[0])).epsilon(1e-14));
    }

    TEST_CASE("customization path: gradual specialization with a convex enough design cost")
    {
        auto c = bench();
        c.coefs.q0 = 0.05;
        auto pr = make_problem(c);
        auto eq = solve_dynamic(pr);
        for (size_t node : {10u, 100u, 190u}) {
            auto p = customization_path(pr, eq, node, 200);
            CHECK(p.interior);
            for (size_t t = 1; t < p.s.size(); ++t) CHECK(p.s[t] >= p.s[t - 1] - 1e-12);
            CHECK(p.D_steady == doctest::Approx(eq.st.D[node]).epsilon(1e-12));
            CHECK(p.D.back() == doctest::Approx(p.D_steady).epsilon(1e-8));
            CHECK(p.s.back() == doctest::Approx(eq.s()[node]).epsilon(1e-8));
        }
    }

    TEST_CASE("customization path: benchmark forms leave the interior branch")
    {
        // flat design cost: an inherited customer base makes s_max the one-period optimum
        const auto& pr = bench_problem();
        auto p = customization_path(pr, solve_dynamic(pr), 100, 200);
        CHECK_FALSE(p.interior);
    }

    TEST_CASE("endogenous complexity indices")
    {
        auto c = optimal_complexity(std::exp(-1.0), 0.0, 1.0);
        CHECK(c.N_star == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c.N_eff == c.N_star);
        CHECK_FALSE(c.over_complex);
        for (double ls : {0.01, 0.3, 0.9}) {
            auto k = optimal_complexity(0.62, ls, 0.4);
            CHECK(k.N_star > k.N_eff);
            CHECK(k.over_complex);
            CHECK(k.N_eff_dyn == doctest::Approx(k.N_eff / 0.4));
        }
    }
}
