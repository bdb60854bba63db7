#pragma once

#include "errors.hpp"

#include <cmath>

namespace chainform {

// Stationary mass of searching final producers.
inline double stationary_mu(double f, double N, double delta)
{
    require(f >= 0.0 && f <= 1.0, "f must be in [0,1]");
    require(delta > 0.0 && delta <= 1.0, "delta must be in (0,1]");
    require(N >= 1.0, "N must be >= 1");
    return delta / (delta + (1.0 - delta) * std::pow(f, N));
}

inline double resilience(double f, double N)
{
    require(f >= 0.0 && f <= 1.0, "f must be in [0,1]");
    require(N >= 1.0, "N must be >= 1");
    return std::pow(f, N);
}

// beta(1-delta)/(1+beta(1-delta)): weight of the search externality.
inline double search_weight(double beta, double delta)
{
    double b = beta * (1.0 - delta);
    return b / (1.0 + b);
}

// Weight delta[1+beta(1-delta)] on the lost-trading-probability term.
inline double dynamic_multiplier(double beta, double delta) { return delta * (1.0 + beta * (1.0 - delta)); }

inline double efficiency_M(double f, double N, double beta, double delta)
{
    return 1.0 - std::pow(f, N) * search_weight(beta, delta);
}

inline double efficiency_gap(double f, double N, double beta, double delta)
{
    return N * efficiency_M(f, N, beta, delta) - 1.0;
}

// Upper bound U(N;lambda) = N (1-e^{-lambda})^N / 2 from the complexity proof.
inline double complexity_bound_U(double N, double lambda)
{
    return 0.5 * N * std::pow(-std::expm1(-lambda), N);
}

// Maximizer of N fbar^N over N, fbar = 1 - e^{-lambda}.
inline double complexity_bound_Nbar(double lambda)
{
    return 1.0 / (-std::log(-std::expm1(-lambda)));
}

// lambda_bar: U(Nbar(lambda); lambda) = 1, found by bisection (U increases in lambda).
inline double complexity_lambda_bar()
{
    auto h = [](double lam) { return complexity_bound_U(complexity_bound_Nbar(lam), lam) - 1.0; };
    double lo = 1e-3, hi = 50.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (h(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct ComplexityIndex {
    double N_star = 0, N_eff = 0, N_eff_dyn = 0;
    bool over_complex = false;
};

inline ComplexityIndex optimal_complexity(double f, double labor_share, double mu)
{
    require(f > 0.0 && f < 1.0, "f must be in (0,1)");
    require(labor_share >= 0.0 && labor_share < 1.0, "labor_share must be in [0,1)");
    require(mu > 0.0 && mu <= 1.0, "mu must be in (0,1]");
    ComplexityIndex c;
    c.N_star = 1.0 / std::log(1.0 / f);
    c.N_eff = c.N_star * (1.0 - labor_share);
    c.N_eff_dyn = c.N_eff / mu;
    c.over_complex = c.N_star > c.N_eff;
    return c;
}

} // namespace chainform
