#pragma once

#include "solver.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace chainform {

enum class SimTag { Static, Dynamic, Links };

inline const char* sim_tag_name(SimTag t)
{
    switch (t) {
    case SimTag::Static: return "static";
    case SimTag::Dynamic: return "dynamic";
    case SimTag::Links: return "links";
    }
    return "?";
}

inline SimTag sim_tag_of(Model m)
{
    switch (m) {
    case Model::Static: return SimTag::Static;
    case Model::Dynamic: return SimTag::Dynamic;
    case Model::Links: return SimTag::Links;
    default: throw ValidationError("no simulator for this model");
    }
}

struct SimConfig {
    int n_finals = 10000;
    int n_suppliers_per_input = 0; // 0: n_finals * m
    int T = 2000;
    int burn_in = 200;
    std::uint64_t seed = 20240601ULL;
    SimTag tag = SimTag::Static;
    int batches = 20;
};

struct Estimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double se = 0.0;
    bool defined() const { return !std::isnan(mean); }
};

struct SimStats {
    SimTag tag = SimTag::Static;
    Estimate f, mu, nu, R, Y;
    std::vector<double> D_decile;    // mean customers per supplier by productivity decile
    std::vector<double> decile_edges; // 11 edges in z
    long accounting_gap = 0;          // max |active - new - retained| over periods
    int n_suppliers = 0;
};

namespace detail {

inline double dist_quantile(const Distribution& d, double u)
{
    if (d.kind == DistKind::Uniform) return d.z_low + u * (d.z_high - d.z_low);
    boost::math::beta_distribution<> b(d.alpha, d.beta);
    return d.z_low + boost::math::quantile(b, u) * (d.z_high - d.z_low);
}

struct BatchAcc {
    std::vector<double> num, den;
    explicit BatchAcc(int b) : num(b, 0.0), den(b, 0.0) {}
    void add(int b, double n, double d)
    {
        num[b] += n;
        den[b] += d;
    }
    Estimate ratio() const
    {
        Estimate e;
        double N = 0, D = 0;
        for (size_t i = 0; i < num.size(); ++i) {
            N += num[i];
            D += den[i];
        }
        if (D <= 0) return e;
        e.mean = N / D;
        double ss = 0;
        int k = 0;
        for (size_t i = 0; i < num.size(); ++i)
            if (den[i] > 0) {
                double r = num[i] / den[i] - e.mean;
                ss += r * r;
                ++k;
            }
        e.se = k > 1 ? std::sqrt(ss / (k - 1) / k) : 0.0;
        return e;
    }
};

} // namespace detail

// Finite-agent replay of the matching protocol with the supplier policies s(z), x(z) held fixed.
inline SimStats simulate(const SimConfig& cfg, const Problem& pr, const std::vector<double>& s_profile,
                         const std::vector<double>& x_profile)
{
    require(cfg.n_finals >= 1000, "n_finals must be >= 1000");
    require(cfg.burn_in >= 0 && cfg.burn_in < cfg.T, "burn_in must be in [0, T)");
    require(cfg.batches >= 2 && cfg.T - cfg.burn_in >= cfg.batches, "need at least one period per batch");
    require(s_profile.size() == pr.grid.size() && x_profile.size() == pr.grid.size(), "profiles must match grid");
    int ns = cfg.n_suppliers_per_input > 0 ? cfg.n_suppliers_per_input
                                           : int(std::lround(cfg.n_finals * pr.p.m));
    require(ns > 0, "zero suppliers");
    int N = pr.p.n_inputs;
    double lam = pr.p.lambda, delta = pr.p.delta;
    if (cfg.tag == SimTag::Static) delta = 1.0;
    require(cfg.tag != SimTag::Links || delta < 1.0, "links tag needs delta < 1");

    boost::random::mt19937_64 rng(cfg.seed);
    boost::random::uniform_01<double> U;

    // supplier population: stratified draws from the productivity distribution
    ProfileInterp s_of(pr.grid, s_profile), x_of(pr.grid, x_profile);
    std::vector<double> zs(ns), A(ns), xs(ns);
    std::vector<std::uint32_t> phi_cut(ns); // compatible iff low 32 bits < phi * 2^32
    for (int k = 0; k < ns; ++k) {
        zs[k] = detail::dist_quantile(pr.F.dist, (k + U(rng)) / ns);
        double s = s_of(zs[k]);
        phi_cut[k] = std::uint32_t(std::min(4294967295.0, std::ldexp(pr.F.phi(s), 32)));
        A[k] = pr.F.A(s, zs[k]);
        xs[k] = x_of(zs[k]);
    }
    // selection rank: higher x wins, then higher z, then lower index
    std::vector<int> order(ns);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        if (zs[a] != zs[b]) return zs[a] < zs[b];
        return a > b;
    });
    std::vector<int> rank(ns);
    for (int r = 0; r < ns; ++r) rank[order[r]] = r;

    SimStats st;
    st.tag = cfg.tag;
    st.n_suppliers = ns;
    // deciles of the drawn population (same for every input)
    std::vector<double> zsorted(zs);
    std::sort(zsorted.begin(), zsorted.end());
    std::vector<int> decile(ns);
    st.decile_edges.resize(11);
    st.decile_edges[0] = pr.F.dist.z_low;
    st.decile_edges[10] = pr.F.dist.z_high;
    for (int d = 1; d < 10; ++d) {
        size_t k = size_t(d) * ns / 10;
        st.decile_edges[d] = 0.5 * (zsorted[k - 1] + zsorted[k]);
    }
    for (int k = 0; k < ns; ++k) {
        int d = int(std::upper_bound(st.decile_edges.begin() + 1, st.decile_edges.end() - 1, zs[k]) -
                    (st.decile_edges.begin() + 1));
        decile[k] = d;
    }
    std::vector<int> decile_count(10, 0);
    for (int k = 0; k < ns; ++k) ++decile_count[decile[k]];

    int nf = cfg.n_finals;
    // supplier[j*nf + i] = index of final i's supplier of input j, -1 if none
    std::vector<int> link(size_t(N) * nf, -1);
    std::vector<char> attached(nf, 0), was_active(nf, 0), need(size_t(N) * nf, 0);
    std::vector<int> found(size_t(N) * nf, -1);

    // contacts per search by inverse cdf
    std::vector<double> pois_cdf;
    {
        double p = std::exp(-lam), c = p;
        for (int k = 1; k < 1000 && c < 1.0 - 1e-16; ++k) {
            pois_cdf.push_back(c);
            p *= lam / k;
            c += p;
        }
        pois_cdf.push_back(1.0);
    }
    auto pois = [&]() {
        double u = U(rng);
        return int(std::upper_bound(pois_cdf.begin(), pois_cdf.end(), u) - pois_cdf.begin());
    };

    int B = cfg.batches, L = cfg.T - cfg.burn_in;
    detail::BatchAcc accF(B), accMu(B), accNu(B), accR(B), accY(B);
    std::vector<double> Dsum(10, 0.0);
    long gap = 0;

    for (int t = 0; t < cfg.T; ++t) {
        bool rec = t >= cfg.burn_in;
        int b = rec ? std::min(B - 1, (t - cfg.burn_in) * B / L) : 0;
        // disruptions hit matches formed in earlier periods
        long retained_candidates = 0;
        for (int i = 0; i < nf; ++i) {
            was_active[i] = attached[i];
            for (int j = 0; j < N; ++j) need[size_t(j) * nf + i] = 0;
            if (!attached[i]) {
                for (int j = 0; j < N; ++j) need[size_t(j) * nf + i] = 1;
                continue;
            }
            if (cfg.tag == SimTag::Dynamic || cfg.tag == SimTag::Static) {
                if (U(rng) < delta) {
                    attached[i] = 0;
                    for (int j = 0; j < N; ++j) need[size_t(j) * nf + i] = 1;
                } else {
                    ++retained_candidates;
                }
            } else {
                bool any = false;
                for (int j = 0; j < N; ++j)
                    if (U(rng) < delta) {
                        need[size_t(j) * nf + i] = 1;
                        any = true;
                    }
                if (!any) ++retained_candidates;
            }
        }
        // search
        double searchers_j = 0, searchers_prev_active = 0, found_j = 0, ended_active_j = 0;
        long new_active = 0, retained = retained_candidates, active = 0;
        double Y = 0.0;
        for (int i = 0; i < nf; ++i) {
            bool ok = true, searched = false;
            for (int j = 0; j < N; ++j) {
                size_t id = size_t(j) * nf + i;
                if (!need[id]) {
                    found[id] = link[id];
                    continue;
                }
                searched = true;
                int n = pois(), best = -1;
                for (int k = 0; k < n; ++k) {
                    std::uint64_t r = rng();
                    int c = int(((r >> 32) * std::uint64_t(ns)) >> 32);
                    if (std::uint32_t(r) < phi_cut[c] && (best < 0 || rank[c] > rank[best])) best = c;
                }
                found[id] = best;
                if (best < 0) ok = false;
            }
            for (int j = 0; j < N; ++j) {
                size_t id = size_t(j) * nf + i;
                if (!need[id]) continue;
                searchers_j += 1;
                if (was_active[i]) searchers_prev_active += 1;
                if (found[id] >= 0) found_j += 1;
                if (ok) ended_active_j += 1;
            }
            if (ok) {
                attached[i] = 1;
                if (searched) ++new_active;
                ++active;
                for (int j = 0; j < N; ++j) {
                    size_t id = size_t(j) * nf + i;
                    link[id] = found[id];
                    Y += A[link[id]];
                    if (rec) Dsum[decile[link[id]]] += 1.0;
                }
            } else {
                attached[i] = 0;
                for (int j = 0; j < N; ++j) link[size_t(j) * nf + i] = -1;
            }
        }
        gap = std::max(gap, std::labs(active - new_active - retained));
        if (!rec) continue;
        accF.add(b, found_j, searchers_j);
        accMu.add(b, searchers_j / N, nf);
        accNu.add(b, searchers_prev_active, searchers_j);
        accR.add(b, ended_active_j, searchers_j);
        accY.add(b, Y, nf);
    }
    st.f = accF.ratio();
    st.R = accR.ratio();
    st.Y = accY.ratio();
    if (cfg.tag != SimTag::Static) st.mu = accMu.ratio();
    if (cfg.tag == SimTag::Links) st.nu = accNu.ratio();
    st.D_decile.resize(10);
    double per = double(L) * N;
    for (int d = 0; d < 10; ++d) st.D_decile[d] = Dsum[d] / (per * decile_count[d]);
    st.accounting_gap = gap;
    return st;
}

inline SimStats simulate(const SimConfig& cfg, const Problem& pr, const Solution& sol)
{
    SimConfig c = cfg;
    c.tag = sim_tag_of(sol.setting.model);
    return simulate(c, pr, sol.s(), sol.x());
}

struct SimAnalytic {
    SimTag tag = SimTag::Static;
    double f = 0, mu = 1, nu = 0, R = 0, Y = 0;
    std::vector<double> D_decile;
};

// Continuum counterparts, with demand averaged over the simulated deciles.
inline SimAnalytic analytic_for(const Problem& pr, const Solution& sol, const std::vector<double>& edges)
{
    require(edges.size() == 11, "need 11 decile edges");
    const auto& S = sol.st;
    SimAnalytic a;
    a.tag = sim_tag_of(sol.setting.model);
    a.f = S.c.f;
    a.mu = S.mu;
    a.nu = S.nu;
    a.R = S.R;
    a.Y = S.Y;
    ProfileInterp D(pr.grid, S.D);
    a.D_decile.resize(10);
    for (int d = 0; d < 10; ++d) {
        double lo = edges[d], hi = edges[d + 1], num = 0, den = 0;
        const int M = 64;
        for (int k = 0; k < M; ++k) {
            double z = lo + (k + 0.5) * (hi - lo) / M;
            double g = pr.F.gamma(z);
            num += D(z) * g;
            den += g;
        }
        a.D_decile[d] = den > 0 ? num / den : 0.0;
    }
    return a;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    require(a.size() == b.size() && a.size() >= 2, "spearman needs two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (size_t k = 0; k < idx.size();) {
            size_t e = k;
            while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[k]]) ++e;
            for (size_t q = k; q <= e; ++q) r[idx[q]] = 0.5 * (k + e);
            k = e + 1;
        }
        return r;
    };
    auto ra = ranks(a), rb = ranks(b);
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

struct ZReport {
    std::vector<std::string> names;
    std::vector<double> z;
    double rank_corr = 0;
    bool pass = true;
};

inline ZReport compare_sim_analytic(const SimStats& s, const SimAnalytic& a, double z_max = 3.0,
                                    double min_rank_corr = 0.9)
{
    require(s.tag == a.tag, "model tags differ");
    ZReport r;
    auto add = [&](const char* nm, const Estimate& e, double target) {
        if (!e.defined()) return;
        double z = e.mean == target ? 0.0 : (e.se > 0 ? (e.mean - target) / e.se : std::numeric_limits<double>::infinity());
        r.names.push_back(nm);
        r.z.push_back(z);
        if (!(std::abs(z) <= z_max)) r.pass = false;
    };
    add("f", s.f, a.f);
    add("mu", s.mu, a.mu);
    add("nu", s.nu, a.nu);
    add("R", s.R, a.R);
    add("Y", s.Y, a.Y);
    r.rank_corr = s.D_decile == a.D_decile ? 1.0 : spearman(s.D_decile, a.D_decile);
    if (!(r.rank_corr >= min_rank_corr)) r.pass = false;
    return r;
}

} // namespace chainform
