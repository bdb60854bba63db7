#include "chainform/microsim.hpp"
#include "common.hpp"

#include <cmath>

using namespace chainform;
using namespace testutil;

namespace {

SimConfig small(SimTag tag)
{
    SimConfig c;
    c.n_finals = 3000;
    c.T = 600;
    c.burn_in = 100;
    c.tag = tag;
    return c;
}

} // namespace

TEST_SUITE("microsim")
{
    TEST_CASE("fully compatible suppliers and easy search: f -> 1")
    {
        const auto& pr = bench_problem();
        std::vector<double> s(pr.grid.size(), 0.0), x(pr.grid.size(), 1.0);
        auto st = simulate(small(SimTag::Static), pr, s, x);
        CHECK(st.f.mean > 0.9999);
    }

    TEST_CASE("static: f within 3 SE of the continuum")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto st = simulate(small(SimTag::Static), pr, eq);
        CHECK(std::abs(st.f.mean - eq.f()) <= 3 * st.f.se);
        CHECK(st.accounting_gap == 0);
    }

    TEST_CASE("links: resilience within 3 SE of the continuum")
    {
        auto pr = make_problem(resilience_calibration());
        auto eq = solve_links(pr);
        auto st = simulate(small(SimTag::Links), pr, eq);
        CHECK(std::abs(st.R.mean - eq.st.R) <= 3 * st.R.se);
        CHECK(st.accounting_gap == 0);
    }

    TEST_CASE("comparison: identical inputs give zero scores, a 10% error in phi_bar fails on f")
    {
        const auto& pr = bench_problem();
        auto eq = solve_dynamic(pr);
        SimConfig cfg;
        cfg.tag = SimTag::Dynamic;
        auto st = simulate(cfg, pr, eq);

        SimAnalytic same;
        same.tag = st.tag;
        same.f = st.f.mean;
        same.mu = st.mu.mean;
        same.R = st.R.mean;
        same.Y = st.Y.mean;
        same.D_decile = st.D_decile;
        auto r0 = compare_sim_analytic(st, same);
        CHECK(r0.pass);
        for (double z : r0.z) CHECK(z == 0.0);

        auto good = analytic_for(pr, eq, st.decile_edges);
        auto rg = compare_sim_analytic(st, good);
        CHECK(rg.pass);
        auto bad = good;
        bad.f = finding_prob(pr.p.lambda, 1.1 * eq.st.c.phi_bar);
        auto rb = compare_sim_analytic(st, bad);
        CHECK_FALSE(rb.pass);
        CHECK(rb.names.front() == "f");
        CHECK(std::abs(rb.z.front()) > 3.0);
    }

    TEST_CASE("fixed seed replays bit for bit; a new seed does not")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto cfg = small(SimTag::Static);
        auto a = simulate(cfg, pr, eq), b = simulate(cfg, pr, eq);
        CHECK(a.f.mean == b.f.mean);
        CHECK(a.Y.mean == b.Y.mean);
        CHECK(a.D_decile == b.D_decile);
        cfg.seed += 1;
        CHECK(simulate(cfg, pr, eq).f.mean != a.f.mean);
    }

    TEST_CASE("configuration validation")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto cfg = small(SimTag::Static);
        cfg.n_finals = 10;
        CHECK_THROWS_AS(simulate(cfg, pr, eq), ValidationError);
        cfg = small(SimTag::Static);
        cfg.burn_in = cfg.T;
        CHECK_THROWS_AS(simulate(cfg, pr, eq), ValidationError);
    }

    TEST_CASE("spearman")
    {
        CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
        CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    }
}
