#pragma once

#include "dyn_math.hpp"
#include "errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace chainform {

// Probability that an active final producer stays operational, symmetric inputs.
inline double rho(double f, double K, double delta) { return std::pow(1.0 - delta * (1.0 - f), K); }

struct LinkMu {
    double mu = 1, nu = 0, f_tilde = 0, rho1 = 1, residual = 0;
};

inline double mu_links_residual(double mu, double f, double N, double delta, double nu)
{
    // delta(1 - q mu) + q mu - mu with q = 1 - p, arranged to avoid cancellation
    double p = std::pow(f, N) * (1.0 - nu) + f * rho(f, N - 1.0, delta) * nu;
    return delta - mu * (delta + (1.0 - delta) * p);
}

inline double nu_of_mu(double mu, double delta) { return delta / (1.0 - delta) * (1.0 / mu - 1.0); }

// Laws of motion for the per-input searching mass.
// Paper: finals whose link i survived count as active next period.
// Retention: they stay active only if their other links survive or are replaced
// (rho(f;N-1)), which is what the link-by-link mechanics produce.
enum class MuLaw { Paper, Retention };

inline double mu_links_residual_retention(double mu, double f, double N, double delta, double nu, double rho1)
{
    double Rt = nu * f * rho1 + (1.0 - nu) * std::pow(f, N);
    return (1.0 - mu) * (1.0 - (1.0 - delta) * rho1) - (1.0 - delta) * mu * Rt;
}

// Stationary (mu, nu, f_tilde) of the link-destruction model.
// rho_override replaces rho(f;N-1) everywhere (diagnostic code-path checks).
inline LinkMu stationary_mu_links(double f, double N, double delta, bool force_nu_zero = false,
                                  MuLaw law = MuLaw::Paper, double rho_override = -1.0)
{
    require(f > 0.0 && f < 1.0, "f must be in (0,1)");
    require(delta > 0.0 && delta < 1.0, "delta must be in (0,1)");
    require(N >= 1.0, "N must be >= 1");
    LinkMu r;
    r.rho1 = rho_override >= 0.0 ? rho_override : rho(f, N - 1.0, delta);
    auto nu_at = [&](double mu) { return force_nu_zero ? 0.0 : nu_of_mu(mu, delta); };
    auto g = [&](double mu) {
        if (law == MuLaw::Retention) return mu_links_residual_retention(mu, f, N, delta, nu_at(mu), r.rho1);
        return mu_links_residual(mu, f, N, delta, nu_at(mu));
    };
    if (law == MuLaw::Paper && force_nu_zero) {
        r.mu = stationary_mu(f, N, delta);
    } else {
        double lo = delta + 1e-12, hi = 1.0;
        double glo = g(lo), ghi = g(hi);
        if (!(glo > 0.0 && ghi <= 0.0)) throw ConvergenceError("stationary_mu_links: no root in (delta, 1]");
        if (ghi == 0.0) lo = hi; // root closer to 1 than double resolution
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? lo : hi) = mid;
        }
        r.mu = 0.5 * (lo + hi);
    }
    r.nu = nu_at(r.mu);
    r.residual = g(r.mu);
    r.f_tilde = r.nu * r.rho1 + (1.0 - r.nu) * std::pow(f, N - 1.0);
    return r;
}

inline double resilience_links(double f, double N, double delta, double nu)
{
    return nu * f * rho(f, N - 1.0, delta) + (1.0 - nu) * std::pow(f, N);
}

struct ChiMultipliers {
    double chi1 = 1, chi2 = 1;
    bool degenerate = false; // N<2: rho(f;N-2) has a negative exponent
};

inline ChiMultipliers chi_multipliers(double f, double N, double delta, double mu, double nu)
{
    ChiMultipliers c;
    c.degenerate = N < 2.0;
    double r0 = rho(f, N, delta), r1 = rho(f, N - 1.0, delta), r2 = rho(f, N - 2.0, delta);
    double fN1 = std::pow(f, N - 1.0), fN2 = std::pow(f, N - 2.0);
    double ft = nu * r1 + (1.0 - nu) * fN1;
    c.chi1 = 1.0 - nu * (r0 - delta * f * r2) / ft + (1.0 - delta) * delta * f * r2 / (1.0 - (1.0 - delta) * r1);
    double comp = 1.0 - (r1 - fN1) / ft * delta / ((1.0 - delta) * mu);
    double act = (1.0 - nu) + nu / N * (r1 / fN1 + (N - 1.0) * delta * r2 / fN2);
    c.chi2 = comp * act;
    return c;
}

// M-tilde(N) = 1 - f^N * w * chi2/chi1 with w = beta(1-delta)/(1+beta(1-delta)).
inline double efficiency_M_links(double f, double N, double w, const ChiMultipliers& c)
{
    return 1.0 - std::pow(f, N) * w * c.chi2 / c.chi1;
}

struct GridScanResult {
    double min_gap = 1e300;
    double arg_delta = 0, arg_f = 0;
    int arg_N = 0;
    double min_chi1 = 1e300;
    long cells = 0;
    long chi2_negative = 0;
    std::vector<double> gaps;
};

// N - Nbar* over the grid, with the search weight bounded by 1/2.
inline GridScanResult overspec_gridscan(const std::vector<double>& deltas, const std::vector<double>& fs,
                                        const std::vector<int>& Ns)
{
    GridScanResult r;
    for (int N : Ns) require(N >= 2 && N <= 10, "N_set must be within {2..10}");
    for (double d : deltas) require(d > 0.0 && d < 1.0, "delta grid must be in (0,1)");
    for (double f : fs) require(f > 0.0 && f < 1.0, "f grid must be in (0,1)");
    r.gaps.reserve(deltas.size() * fs.size() * Ns.size());
    for (double d : deltas)
        for (double f : fs)
            for (int N : Ns) {
                auto lm = stationary_mu_links(f, N, d);
                auto c = chi_multipliers(f, N, d, lm.mu, lm.nu);
                double nbar = 1.0 / efficiency_M_links(f, N, 0.5, c);
                double gap = N - nbar;
                r.gaps.push_back(gap);
                ++r.cells;
                if (c.chi2 < 0) ++r.chi2_negative;
                r.min_chi1 = std::min(r.min_chi1, c.chi1);
                if (gap < r.min_gap) {
                    r.min_gap = gap;
                    r.arg_delta = d;
                    r.arg_f = f;
                    r.arg_N = N;
                }
            }
    return r;
}

struct WeakestLink {
    int endogenous = 0; // argmax delta_j (1 - f_j)
    int exogenous = 0;  // argmax delta_j
};

// Ties break toward the lowest index.
inline WeakestLink weakest_link(const std::vector<double>& delta, const std::vector<double>& f)
{
    require(delta.size() == f.size() && !delta.empty(), "weakest_link needs matching non-empty vectors");
    WeakestLink w;
    double best = -1, bestd = -1;
    for (size_t j = 0; j < delta.size(); ++j) {
        double v = delta[j] * (1.0 - f[j]);
        if (v > best) {
            best = v;
            w.endogenous = int(j);
        }
        if (delta[j] > bestd) {
            bestd = delta[j];
            w.exogenous = int(j);
        }
    }
    return w;
}

// Same statistic from compatibility means: f_j = 1 - exp(-lambda phibar_j).
inline WeakestLink weakest_link_phibar(const std::vector<double>& delta, const std::vector<double>& phibar,
                                       double lambda)
{
    std::vector<double> f(phibar.size());
    for (size_t j = 0; j < f.size(); ++j) f[j] = -std::expm1(-lambda * phibar[j]);
    return weakest_link(delta, f);
}

} // namespace chainform
