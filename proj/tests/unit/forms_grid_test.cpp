#include "common.hpp"

#include <cmath>

using namespace chainform;
using namespace testutil;

TEST_SUITE("forms")
{
    TEST_CASE("benchmark calibration pins the reported parameters")
    {
        auto c = default_calibration();
        CHECK(c.params.delta == 0.10);
        CHECK(c.params.lambda == 20.0);
        CHECK(c.params.n_inputs == 3);
        CHECK(c.params.beta == 0.996);
        CHECK(c.dist.kind == DistKind::Uniform);
        CHECK(c.params.z_low == 10.0);
        CHECK(c.params.z_high == 20.0);

        auto r = resilience_calibration();
        CHECK(r.params.delta == 0.02);
        CHECK(r.params.lambda == 20.0);
        CHECK(r.params.n_inputs == 3);
        CHECK(r.f_target == 0.60);
    }

    TEST_CASE("default forms satisfy the curvature contracts")
    {
        auto rep = validate_forms(default_calibration().forms(), 25);
        CHECK(rep.ok);
        CHECK(rep.worst <= 1e-8);
    }

    TEST_CASE("a convex benefit function is rejected")
    {
        auto F = default_calibration().forms();
        F.a = {[](double s) { return 12.0 + s * s; }, [](double s) { return 2 * s; }, [](double) { return 2.0; }};
        auto rep = validate_forms(F, 25);
        CHECK_FALSE(rep.ok);
        CHECK(rep.worst_check == "a'' < 0");
    }

    TEST_CASE("an increasing compatibility function is rejected")
    {
        auto F = default_calibration().forms();
        F.phi = {[](double s) { return 1.0 - std::exp(-s); }, [](double s) { return std::exp(-s); },
                 [](double s) { return -std::exp(-s); }};
        CHECK_FALSE(validate_forms(F, 10).ok);
    }

    TEST_CASE("n_probe below 3 is a validation error")
    {
        CHECK_THROWS_AS(validate_forms(default_calibration().forms(), 2), ValidationError);
    }

    TEST_CASE("parameter validation")
    {
        ModelParams p;
        p.delta = 1.5;
        CHECK_THROWS_AS(p.validate(), ValidationError);
        p.delta = 1.0;
        CHECK_NOTHROW(p.validate());
        p.lambda = 0;
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
}

TEST_SUITE("grid_ops")
{
    TEST_CASE("uniform density is 0.1 at every node and the mass is one")
    {
        for (int n : {8, 40, 200}) {
            auto G = build_zgrid(Distribution{}, n);
            for (double g : G.g) CHECK(g == doctest::Approx(0.1).epsilon(1e-14));
            CHECK(std::abs(G.mass() - 1.0) <= 1e-8);
        }
    }

    TEST_CASE("shifted beta(1,18) is left-skewed with its mode at z_low")
    {
        Distribution d;
        d.kind = DistKind::ShiftedBeta;
        auto G = build_zgrid(d, 200);
        CHECK(std::abs(G.mass() - 1.0) <= 1e-6);
        for (size_t i = 1; i < G.size(); ++i) CHECK(G.g[i] < G.g[i - 1]);
        CHECK(d.pdf(10.0) > d.pdf(10.5));
    }

    TEST_CASE("phi_hat boundary cases")
    {
        const auto& pr = bench_problem();
        std::vector<double> s(pr.grid.size(), 0.7);
        CHECK(phi_hat(pr.grid, pr.F, s, 13.0, 13.0) == 0.0);
        double p = std::exp(-0.7);
        CHECK(phi_hat(pr.grid, pr.F, s, 10.0, 20.0) == doctest::Approx(p).epsilon(1e-12));
        CHECK_THROWS_AS(phi_hat(pr.grid, pr.F, s, 15.0, 12.0), ValidationError);
    }

    TEST_CASE("phi_hat over half the support matches a 1e4-node reference quadrature")
    {
        const auto& pr = bench_problem();
        auto s_of = [](double z) { return 0.4 + 0.15 * (z - 10.0) + 0.2 * std::sin(z); };
        std::vector<double> s(pr.grid.size());
        for (size_t i = 0; i < s.size(); ++i) s[i] = s_of(pr.grid.z[i]);
        double got = phi_hat(pr.grid, pr.F, s, 10.0, 15.0);
        // composite Simpson, 10^4 intervals
        const int M = 10000;
        double h = 5.0 / M, acc = 0;
        for (int k = 0; k <= M; ++k) {
            double z = 10.0 + k * h;
            double wk = (k == 0 || k == M) ? 1 : (k % 2 ? 4 : 2);
            acc += wk * std::exp(-s_of(z)) * 0.1;
        }
        acc *= h / 3;
        CHECK(std::abs(got - acc) <= 1e-6);
    }

    TEST_CASE("phi_hat is additive over adjacent intervals")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        double a = phi_hat(pr.grid, pr.F, eq.s(), 10.5, 13.3), b = phi_hat(pr.grid, pr.F, eq.s(), 13.3, 18.2);
        CHECK(a + b == doctest::Approx(phi_hat(pr.grid, pr.F, eq.s(), 10.5, 18.2)).epsilon(1e-12));
    }

    TEST_CASE("expectation operators on constant values")
    {
        const auto& pr = bench_problem();
        auto eq = solve_static(pr);
        auto c = eq.st.c;
        std::vector<double> v(pr.grid.size(), 3.5);
        CHECK(expectation(ExpKind::MaxAll, pr.grid, c, v) == doctest::Approx(3.5 * c.f).epsilon(1e-6));
        CHECK(expectation(ExpKind::Active, pr.grid, c, v) == doctest::Approx(3.5).epsilon(1e-6));
        CHECK(std::abs(expectation(ExpKind::MaxLeq, pr.grid, c, v, pr.grid.z_low)) <= 1e-14);
        CHECK(expectation(ExpKind::MaxLeq, pr.grid, c, v, pr.grid.z_high) == doctest::Approx(3.5 * c.f).epsilon(1e-6));
        CHECK(expectation(ExpKind::Plain, pr.grid, c, v) == doctest::Approx(3.5).epsilon(1e-8));
    }

    TEST_CASE("max_all of one equals f for arbitrary profiles")
    {
        const auto& pr = bench_problem();
        std::vector<double> one(pr.grid.size(), 1.0);
        for (double k : {0.0, 0.3, 1.1}) {
            std::vector<double> s(pr.grid.size());
            for (size_t i = 0; i < s.size(); ++i) s[i] = 0.2 + k * (pr.grid.z[i] - 10.0) / 10.0;
            auto c = compat_aggregates(pr.grid, pr.F, s, pr.p.lambda);
            CHECK(std::abs(expectation(ExpKind::MaxAll, pr.grid, c, one) - c.f) <= 1e-6);
        }
    }

    TEST_CASE("active expectation is undefined at f = 0")
    {
        const auto& pr = bench_problem();
        CompatAggregates c;
        c.lambda = pr.p.lambda;
        c.phi.assign(pr.grid.size(), 0.0);
        c.phi_hat.assign(pr.grid.size(), 0.0);
        std::vector<double> v(pr.grid.size(), 1.0);
        CHECK_THROWS_AS(expectation(ExpKind::Active, pr.grid, c, v), ValidationError);
    }

    TEST_CASE("G is nondecreasing within [0,1]")
    {
        const auto& pr = bench_problem();
        auto c = solve_static(pr).st.c;
        CHECK(c.G.front() >= 0.0);
        CHECK(c.G.front() < 0.01);
        CHECK(c.G.back() <= 1.0 + 1e-12);
        CHECK(c.G.back() > 0.99);
        for (size_t i = 1; i < c.G.size(); ++i) CHECK(c.G[i] >= c.G[i - 1]);
    }

    TEST_CASE("finding probability")
    {
        CHECK(finding_prob(20.0, 0.0) == 0.0);
        CHECK(finding_prob(20.0, std::log(1 / 0.38) / 20.0) == doctest::Approx(0.62).epsilon(1e-14));
        CHECK(finding_prob(1e4, 1.0) == doctest::Approx(1.0));
        CHECK(finding_prob(1e4, 1.0) < 1.0 + 1e-15);
    }

    TEST_CASE("profile interpolation is flat outside the nodes and exact at them")
    {
        const auto& pr = bench_problem();
        std::vector<double> y(pr.grid.size());
        for (size_t i = 0; i < y.size(); ++i) y[i] = std::sqrt(pr.grid.z[i]);
        ProfileInterp P(pr.grid, y);
        CHECK(P(10.0) == y.front());
        CHECK(P(20.0) == y.back());
        CHECK(P(pr.grid.z[57]) == doctest::Approx(y[57]).epsilon(1e-14));
        CHECK(P(14.321) == doctest::Approx(std::sqrt(14.321)).epsilon(1e-7));
    }
}
