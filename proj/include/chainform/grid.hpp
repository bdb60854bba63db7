#pragma once

#include "errors.hpp"
#include "forms.hpp"

#include <Eigen/Dense>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace chainform {

// Gauss-Legendre rule on [-1,1] by Golub-Welsch.
inline void gauss_legendre(int p, std::vector<double>& x, std::vector<double>& w)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(p, p);
    for (int k = 1; k < p; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x.resize(p);
    w.resize(p);
    for (int i = 0; i < p; ++i) {
        x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        w[i] = 2.0 * v * v;
    }
}

// Lagrange basis integrals: out[k] = int_{-1}^{u} L_k(t) dt over nodes x.
inline std::vector<double> lagrange_partial(const std::vector<double>& x, const std::vector<double>& gx,
                                            const std::vector<double>& gw, double u)
{
    int p = int(x.size());
    std::vector<double> out(p, 0.0);
    double half = (u + 1.0) / 2.0;
    for (size_t q = 0; q < gx.size(); ++q) {
        double t = -1.0 + half * (gx[q] + 1.0);
        for (int k = 0; k < p; ++k) {
            double L = 1.0;
            for (int j = 0; j < p; ++j)
                if (j != k) L *= (t - x[j]) / (x[k] - x[j]);
            out[k] += half * gw[q] * L;
        }
    }
    return out;
}

struct ZGrid {
    std::vector<double> z, w, g; // nodes, weights, density at nodes
    int panels = 0, order = 0;
    double z_low = 0.0, z_high = 1.0;
    std::vector<double> ref_x, ref_w;   // reference rule
    std::vector<std::vector<double>> Q; // Q[j][k]: panel-local cumulative weights (physical units)

    size_t size() const { return z.size(); }
    double panel_width() const { return (z_high - z_low) / panels; }

    // Integral of values (already multiplied by any density) from z_low to each node.
    std::vector<double> cumulative(const std::vector<double>& v, double* total = nullptr) const
    {
        std::vector<double> out(v.size());
        double acc = 0.0;
        for (int pnl = 0; pnl < panels; ++pnl) {
            int o = pnl * order;
            for (int j = 0; j < order; ++j) {
                double sum = 0.0;
                for (int k = 0; k < order; ++k) sum += Q[j][k] * v[o + k];
                out[o + j] = acc + sum;
            }
            for (int k = 0; k < order; ++k) acc += w[o + k] * v[o + k];
        }
        if (total) *total = acc;
        return out;
    }

    double integrate(const std::vector<double>& v) const
    {
        double acc = 0.0;
        for (size_t i = 0; i < v.size(); ++i) acc += w[i] * v[i];
        return acc;
    }

    // Integral of the panel interpolant of v from z_low to an arbitrary z.
    double integrate_to(const std::vector<double>& v, double zz) const
    {
        if (zz <= z_low) return 0.0;
        if (zz >= z_high) return integrate(v);
        double h = panel_width();
        int pnl = std::min(panels - 1, int((zz - z_low) / h));
        double acc = 0.0;
        for (int i = 0; i < pnl * order; ++i) acc += w[i] * v[i];
        double a = z_low + pnl * h;
        double u = 2.0 * (zz - a) / h - 1.0;
        auto part = lagrange_partial(ref_x, ref_x, ref_w, u);
        int o = pnl * order;
        for (int k = 0; k < order; ++k) acc += part[k] * (h / 2.0) * v[o + k];
        return acc;
    }

    double mass() const { return integrate(g); }
};

// Composite Gauss-Legendre panels over [z_low, z_high].
inline ZGrid build_zgrid(const Distribution& dist, int n_nodes)
{
    require(n_nodes >= 8, "n_nodes must be >= 8");
    require(dist.kind == DistKind::Uniform || dist.kind == DistKind::ShiftedBeta, "unsupported distribution");
    int order = 0;
    for (int p = 10; p >= 4; --p)
        if (n_nodes % p == 0) {
            order = p;
            break;
        }
    require(order > 0, "n_nodes must be divisible by an order in [4,10]");
    ZGrid G;
    G.order = order;
    G.panels = n_nodes / order;
    G.z_low = dist.z_low;
    G.z_high = dist.z_high;
    gauss_legendre(order, G.ref_x, G.ref_w);
    double h = G.panel_width();
    for (int pnl = 0; pnl < G.panels; ++pnl) {
        double a = G.z_low + pnl * h;
        for (int k = 0; k < order; ++k) {
            G.z.push_back(a + h / 2.0 * (G.ref_x[k] + 1.0));
            G.w.push_back(h / 2.0 * G.ref_w[k]);
        }
    }
    G.Q.assign(order, std::vector<double>(order));
    for (int j = 0; j < order; ++j) {
        auto part = lagrange_partial(G.ref_x, G.ref_x, G.ref_w, G.ref_x[j]);
        for (int k = 0; k < order; ++k) G.Q[j][k] = part[k] * h / 2.0;
    }
    for (double z : G.z) G.g.push_back(dist.pdf(z));
    return G;
}

inline double finding_prob(double lambda, double phi_bar)
{
    require(lambda > 0.0, "lambda must be > 0");
    require(phi_bar >= 0.0 && phi_bar <= 1.0, "phi_bar must be in [0,1]");
    return -std::expm1(-lambda * phi_bar);
}

struct CompatAggregates {
    std::vector<double> phi;     // phi(s_i)
    std::vector<double> phi_hat; // phi_hat(z_low, z_i)
    std::vector<double> G;       // phi_hat_i / phi_bar
    double phi_bar = 0.0;
    double f = 0.0;
    double lambda = 0.0;
    double var_ratio = 0.0; // var(phi)/mean(phi) diagnostic
};

inline CompatAggregates compat_aggregates(const ZGrid& grid, const FunctionalForms& F,
                                          const std::vector<double>& s, double lambda)
{
    CompatAggregates c;
    c.lambda = lambda;
    size_t n = grid.size();
    c.phi.resize(n);
    std::vector<double> pg(n), p2g(n);
    for (size_t i = 0; i < n; ++i) {
        c.phi[i] = F.phi(s[i]);
        pg[i] = c.phi[i] * grid.g[i];
        p2g[i] = c.phi[i] * pg[i];
    }
    c.phi_hat = grid.cumulative(pg, &c.phi_bar);
    c.f = finding_prob(lambda, std::clamp(c.phi_bar, 0.0, 1.0));
    c.G.resize(n);
    for (size_t i = 0; i < n; ++i) c.G[i] = c.phi_bar > 0 ? c.phi_hat[i] / c.phi_bar : 0.0;
    double mean = c.phi_bar / std::max(grid.mass(), 1e-300);
    double var = grid.integrate(p2g) - mean * mean;
    c.var_ratio = mean > 0 ? var / mean : 0.0;
    return c;
}

// phi_hat(z_a, z_b) = int_{z_a}^{z_b} phi(s(t)) gamma(t) dt.
inline double phi_hat(const ZGrid& grid, const FunctionalForms& F, const std::vector<double>& s, double za,
                      double zb)
{
    require(grid.z_low <= za && za <= zb && zb <= grid.z_high, "phi_hat requires z_low <= z_a <= z_b <= z_high");
    std::vector<double> pg(grid.size());
    for (size_t i = 0; i < pg.size(); ++i) pg[i] = F.phi(s[i]) * grid.g[i];
    return grid.integrate_to(pg, zb) - grid.integrate_to(pg, za);
}

enum class ExpKind { Plain, MaxAll, MaxLeq, Active };

// Expectation operators over the surplus-offer order statistic.
inline double expectation(ExpKind kind, const ZGrid& grid, const CompatAggregates& c, const std::vector<double>& v,
                          double z = 0.0)
{
    size_t n = grid.size();
    double lam = c.lambda;
    switch (kind) {
    case ExpKind::Plain: {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) acc += grid.w[i] * v[i] * grid.g[i];
        return acc;
    }
    case ExpKind::MaxAll:
    case ExpKind::Active: {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i)
            acc += grid.w[i] * v[i] * std::exp(-lam * (c.phi_bar - c.phi_hat[i])) * lam * c.phi[i] * grid.g[i];
        if (kind == ExpKind::MaxAll) return acc;
        if (!(c.f > 0.0)) throw ValidationError("active expectation undefined at f=0");
        return acc / c.f;
    }
    case ExpKind::MaxLeq: {
        require(z >= grid.z_low && z <= grid.z_high, "max_leq requires z in support");
        std::vector<double> pg(n), ig(n);
        for (size_t i = 0; i < n; ++i) pg[i] = c.phi[i] * grid.g[i];
        double ph_z = grid.integrate_to(pg, z);
        for (size_t i = 0; i < n; ++i)
            ig[i] = v[i] * std::exp(lam * (c.phi_hat[i] - ph_z)) * lam * c.phi[i] * grid.g[i];
        return grid.integrate_to(ig, z);
    }
    }
    return 0.0;
}

// max_leq evaluated at every node: e^{-lambda phihat(z_i)} int^{z_i} v e^{lambda phihat} lambda phi gamma.
inline std::vector<double> max_leq_profile(const ZGrid& grid, const CompatAggregates& c, const std::vector<double>& v)
{
    size_t n = grid.size();
    double lam = c.lambda;
    std::vector<double> ig(n);
    for (size_t i = 0; i < n; ++i) ig[i] = v[i] * std::exp(lam * c.phi_hat[i]) * lam * c.phi[i] * grid.g[i];
    auto J = grid.cumulative(ig);
    for (size_t i = 0; i < n; ++i) J[i] *= std::exp(-lam * c.phi_hat[i]);
    return J;
}

// Shape-preserving interpolation of a nodal profile, extended flat to the support ends.
class ProfileInterp {
public:
    ProfileInterp() = default;
    ProfileInterp(const ZGrid& grid, const std::vector<double>& y)
    {
        std::vector<double> xs(grid.z), ys(y);
        lo_ = xs.front();
        hi_ = xs.back();
        ylo_ = ys.front();
        yhi_ = ys.back();
        p_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(xs), std::move(ys));
    }
    double operator()(double z) const
    {
        if (z <= lo_) return ylo_;
        if (z >= hi_) return yhi_;
        return (*p_)(z);
    }

private:
    std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> p_;
    double lo_ = 0, hi_ = 0, ylo_ = 0, yhi_ = 0;
};

} // namespace chainform
