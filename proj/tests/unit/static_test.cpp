#include "common.hpp"

#include <cmath>

using namespace chainform;
using namespace testutil;

TEST_SUITE("static_eq")
{
    TEST_CASE("offered surplus: zero at the bottom, closed form for constant A")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto c = eq.st.c;
        CHECK(std::abs(expectation(ExpKind::MaxLeq, pr.grid, c, eq.st.A, pr.grid.z_low)) <= 1e-14);
        // constant phi = p and A = v: x(z) = v (1 - exp(-lambda p (z - z_low)/10))
        std::vector<double> s(pr.grid.size(), 1.3);
        auto x = offered_surplus(pr, s);
        double p = std::exp(-1.3);
        std::vector<double> one(pr.grid.size(), 2.0);
        auto cc = compat_aggregates(pr.grid, pr.F, s, pr.p.lambda);
        auto xc = max_leq_profile(pr.grid, cc, one);
        for (size_t i = 0; i < xc.size(); ++i) {
            double want = 2.0 * -std::expm1(-pr.p.lambda * p * (pr.grid.z[i] - 10.0) / 10.0);
            CHECK(xc[i] == doctest::Approx(want).epsilon(1e-9));
        }
        CHECK(x.size() == pr.grid.size());
    }

    TEST_CASE("integral form of x agrees with its differential form")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto ode = offered_surplus_ode(pr, eq.s(), 40);
        CHECK(sup_diff(ode, eq.x()) <= 1e-5);
    }

    TEST_CASE("surplus split: 0 <= x <= A")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        for (size_t i = 0; i < pr.grid.size(); ++i) {
            CHECK(eq.x()[i] >= 0.0);
            CHECK(eq.x()[i] <= eq.st.A[i]);
        }
    }

    TEST_CASE("equilibrium converges with small FOC residual and valid SOC")
    {
        auto eq = solve_static(bench_problem());
        CHECK(eq.fp_error <= 1e-9);
        CHECK(eq.foc_residual <= 1e-8);
        CHECK(eq.soc_ok);
    }

    TEST_CASE("bargaining with xi = 0 reproduces the baseline")
    {
        const auto& pr = bench_problem();
        auto b = solve_static(pr);
        auto g = solve_static(pr, {Contract::Bargaining, 0.0});
        CHECK(sup_diff(b.s(), g.s()) <= 1e-10);
        CHECK(sup_diff(b.x(), g.x()) <= 1e-10);
    }

    TEST_CASE("bargaining power for buyers lowers specialization")
    {
        const auto& pr = bench_problem();
        auto b = solve_static(pr);
        auto g = solve_static(pr, {Contract::Bargaining, 0.3});
        CHECK(mean(g.s()) < mean(b.s()));
    }

    TEST_CASE("non-contingent contracts: more specialization for N >= 2, identical for N = 1")
    {
        for (int N : {2, 3, 4}) {
            auto pr = make_problem(bench(N));
            auto b = solve_static(pr);
            auto nc = solve_static(pr, {Contract::NonContingent, 0.0});
            for (size_t i = 0; i < pr.grid.size(); ++i) CHECK(nc.s()[i] >= b.s()[i]);
        }
        auto pr1 = make_problem(bench(1));
        CHECK(sup_diff(solve_static(pr1, {Contract::NonContingent, 0.0}).s(), solve_static(pr1).s()) <= 1e-10);
    }

    TEST_CASE("output: all-incompatible limit gives vanishing output")
    {
        const auto& pr = bench_problem();
        std::vector<double> s(pr.grid.size(), pr.F.s_max);
        auto S = evaluate(pr, static_setting(), s);
        CHECK(S.Y < 1e-5);
        CHECK(S.Y >= 0.0);
    }

    TEST_CASE("output identity Y = f^N N E_active[A]")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        double Ea = expectation(ExpKind::Active, pr.grid, eq.st.c, eq.st.A);
        CHECK(eq.st.Y == doctest::Approx(std::pow(eq.f(), 3) * 3 * Ea).epsilon(1e-12));
        CHECK(eq.st.W == doctest::Approx(eq.st.Y + pr.p.psi * std::log(1 - eq.st.labor)).epsilon(1e-12));
    }

    TEST_CASE("sellers' cross partial and profile shape")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto cp = seller_cross_partials(pr, eq);
        CHECK(cp.size() == pr.grid.size());
        CHECK(profile_shape(eq.s()) == ShapeClass::Nondecreasing);
        CHECK(profile_shape({1, 2, 3, 2}) == ShapeClass::InteriorExtremum);
    }
}

TEST_SUITE("planner_static")
{
    TEST_CASE("N = 1 planner coincides with the equilibrium")
    {
        auto pr = make_problem(bench(1));
        CHECK(sup_diff(solve_planner_static(pr).s(), solve_static(pr).s()) <= 1e-9);
    }

    TEST_CASE("complex production: S <= s* and higher welfare")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto pl = solve_planner_static(pr);
        for (size_t i = 0; i < pr.grid.size(); ++i) CHECK(pl.s()[i] <= eq.s()[i]);
        CHECK(pl.W() >= eq.W());
        CHECK(pl.f() >= eq.f());
    }

    TEST_CASE("planner profile is a stationary point of the welfare functional")
    {
        const auto& pr = bench_problem();
        auto pl = solve_planner_static(pr);
        auto eq = solve_static(pr);
        double worst = 0, ref = 0;
        for (size_t i : {10u, 60u, 120u, 180u}) {
            if (pl.flags[i] != int(NodeFlag::Interior)) continue;
            worst = std::max(worst, std::abs(welfare_gradient_fd(pr, pl.setting, pl.s(), i)));
            ref = std::max(ref, std::abs(welfare_gradient_fd(pr, pl.setting, eq.s(), i)));
        }
        CHECK(ref > 1e-3);
        CHECK(worst < 1e-3 * ref);
    }

    TEST_CASE("decomposition: N = 1 is neutral, N = 3 negative, business stealing equals x")
    {
        auto pr1 = make_problem(bench(1));
        auto d1 = externality_decomposition_static(pr1, solve_static(pr1));
        for (double t : d1.total) CHECK(std::abs(t) <= 1e-9);

        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto d = externality_decomposition_static(pr, eq);
        for (size_t i = 0; i < pr.grid.size(); ++i) {
            CHECK(d.total[i] < 0.0);
            CHECK(std::abs(d.business_stealing[i] - eq.x()[i]) <= 1e-9);
        }
    }

    TEST_CASE("subsidy schedule endpoints")
    {
        auto pr1 = make_problem(bench(1));
        auto sc1 = subsidy_static(pr1);
        CHECK(sc1.T_star == 0.0);
        for (double t : sc1.tau) CHECK(t == 0.0);

        const auto& pr = bench_problem();
        auto sc = subsidy_static(pr);
        CHECK(sc.T_star > 0);
        CHECK(sc.tau_low == sc.T_star);
        CHECK(sc.tau.front() == doctest::Approx(sc.T_star).epsilon(2e-2));
        CHECK(sc.tau_high == doctest::Approx((1 - sc.f) * sc.T_star).epsilon(1e-12));
        for (size_t i = 1; i < sc.tau.size(); ++i) CHECK(sc.tau[i] < sc.tau[i - 1]);
        for (size_t i = 0; i < sc.tau.size(); ++i)
            CHECK(sc.tau_rate[i] == doctest::Approx(sc.tau_rate_direct[i]).epsilon(1e-6));
    }

    TEST_CASE("decentralization by the schedule, and failure with half of it")
    {
        auto pr1 = make_problem(bench(1));
        auto pl1 = solve_planner_static(pr1);
        CHECK(verify_decentralization(pr1, pl1, std::vector<double>(pr1.grid.size(), 0.0)).deviation <= 1e-9);

        const auto& pr = bench_problem();
        auto pl = solve_planner_static(pr);
        auto sc = subsidy_from_planner(pr, pl);
        CHECK(verify_decentralization(pr, pl, sc.tau).deviation <= 1e-9);
        auto half = sc.tau;
        for (double& t : half) t *= 0.5;
        CHECK(verify_decentralization(pr, pl, half).deviation > 1e-3);
    }
}
