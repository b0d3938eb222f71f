#pragma once

// 1D curvature-dimension verifier: builds the monotone (quantile) coupling
// between two probability measures on a weighted interval, evaluates the
// N-Renyi entropy along the displacement interpolation, and checks the
// distortion-weighted convexity inequality at sampled times.
//
// All integrals run in the quantile parameterization, so piecewise-smooth
// densities (blocks, glued weights) integrate exactly when their breakpoints
// are registered as panel edges.

#include "gluecd/needle.hpp"

namespace gluecd {

namespace detail {

// CDF machinery over a piecewise-smooth nonnegative Lebesgue density.
class Quantile1D {
  public:
    Quantile1D(std::function<double(double)> dens, double a, double b,
               const std::vector<double>& breakpoints, int panels_per_piece) {
        dens_ = std::move(dens);
        std::vector<double> edges{a, b};
        for (double x : breakpoints)
            if (x > a && x < b) edges.push_back(x);
        std::sort(edges.begin(), edges.end());
        const GaussLegendre& gl = gauss_legendre(8);
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double lo = edges[e], hi = edges[e + 1];
            for (int p = 0; p < panels_per_piece; ++p) {
                const double plo = lo + (hi - lo) * p / panels_per_piece;
                const double phi = lo + (hi - lo) * (p + 1) / panels_per_piece;
                double mass = 0.0;
                for (int i = 0; i < 8; ++i)
                    mass += 0.5 * (phi - plo) * gl.weights[static_cast<std::size_t>(i)] *
                            dens_(plo + 0.5 * (phi - plo) * (gl.nodes[static_cast<std::size_t>(i)] + 1.0));
                panel_lo_.push_back(plo);
                panel_hi_.push_back(phi);
                prefix_.push_back((prefix_.empty() ? 0.0 : prefix_.back()) + std::max(0.0, mass));
            }
        }
        total_ = prefix_.back();
        if (total_ <= 0.0) throw ValidationError("measure must have positive mass");
    }

    double total_mass() const { return total_; }

    double cdf(double x) const {
        if (x <= panel_lo_.front()) return 0.0;
        if (x >= panel_hi_.back()) return 1.0;
        std::size_t k = 0;
        // binary search for the panel containing x
        std::size_t lo = 0, hi = panel_lo_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (panel_lo_[mid] <= x)
                lo = mid;
            else
                hi = mid - 1;
        }
        k = lo;
        const GaussLegendre& gl = gauss_legendre(8);
        double part = 0.0;
        for (int i = 0; i < 8; ++i)
            part += 0.5 * (x - panel_lo_[k]) * gl.weights[static_cast<std::size_t>(i)] *
                    dens_(panel_lo_[k] +
                          0.5 * (x - panel_lo_[k]) * (gl.nodes[static_cast<std::size_t>(i)] + 1.0));
        const double before = k == 0 ? 0.0 : prefix_[k - 1];
        return std::clamp((before + std::max(0.0, part)) / total_, 0.0, 1.0);
    }

    // monotone inverse by bisection to 1e-10
    double quantile(double q) const {
        q = std::clamp(q, 0.0, 1.0);
        double lo = panel_lo_.front(), hi = panel_hi_.back();
        for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (cdf(mid) < q)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

  private:
    std::function<double(double)> dens_;
    std::vector<double> panel_lo_, panel_hi_;
    std::vector<double> prefix_;
    double total_ = 0.0;
};

}  // namespace detail

struct WassersteinReport {
    std::vector<double> times;
    std::vector<double> violations;  // S_N(mu_t) - RHS(t) per sampled time
    double max_violation = -std::numeric_limits<double>::infinity();
    double w2 = 0.0;
    // quantile midpoints of the two marginals (50-point discretization of the
    // monotone coupling, for cross-validation against discrete transport)
    std::vector<double> atoms0, atoms1;
    bool pass = false;
};

struct Wasserstein1dOptions {
    std::vector<double> times = {0.1, 0.25, 0.5, 0.75, 0.9};
    std::vector<double> breakpoints;  // density kinks/jumps, used as panel edges
    int panels = 256;                 // quadrature panels per smooth piece
    int quantile_panels = 64;
    double tol = 1e-6;
};

// weight(x): Lebesgue density of the reference measure m; rho0, rho1:
// probability densities w.r.t. m (normalized internally).
inline WassersteinReport wasserstein_1d_cd_core(const std::function<double(double)>& weight,
                                                double a, double b, double K, double N,
                                                const std::function<double(double)>& rho0,
                                                const std::function<double(double)>& rho1,
                                                const Wasserstein1dOptions& opt = {}) {
    if (N <= 1.0) throw ValidationError("CD check needs N > 1");
    auto q0 = [&](double x) { return std::max(0.0, rho0(x)) * weight(x); };
    auto q1 = [&](double x) { return std::max(0.0, rho1(x)) * weight(x); };
    detail::Quantile1D F0(q0, a, b, opt.breakpoints, opt.quantile_panels);
    detail::Quantile1D F1(q1, a, b, opt.breakpoints, opt.quantile_panels);
    const double z0 = F0.total_mass(), z1 = F1.total_mass();

    // quantile-space Gauss-Legendre nodes
    const GaussLegendre& gl = gauss_legendre(8);
    struct QNode {
        double q, w, x, y, p0x, p1y, wx, wy;
    };
    std::vector<QNode> nodes;
    nodes.reserve(static_cast<std::size_t>(opt.panels) * 8);
    for (int p = 0; p < opt.panels; ++p) {
        for (int i = 0; i < 8; ++i) {
            QNode nd;
            nd.q = (p + 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0)) / opt.panels;
            nd.w = 0.5 * gl.weights[static_cast<std::size_t>(i)] / opt.panels;
            nd.x = F0.quantile(nd.q);
            nd.y = F1.quantile(nd.q);
            nd.p0x = q0(nd.x) / z0;  // normalized Lebesgue densities
            nd.p1y = q1(nd.y) / z1;
            nd.wx = weight(nd.x);
            nd.wy = weight(nd.y);
            nodes.push_back(nd);
        }
    }

    WassersteinReport rep;
    rep.times = opt.times;
    KahanSum w2sum;
    for (const QNode& nd : nodes) w2sum.add(nd.w * (nd.y - nd.x) * (nd.y - nd.x));
    rep.w2 = std::sqrt(std::max(0.0, w2sum.value()));
    for (int j = 0; j < 50; ++j) {
        const double q = (j + 0.5) / 50.0;
        rep.atoms0.push_back(F0.quantile(q));
        rep.atoms1.push_back(F1.quantile(q));
    }

    for (double t : opt.times) {
        KahanSum entropy, rhs;
        bool rhs_infinite = false;
        for (const QNode& nd : nodes) {
            if (nd.p0x <= 0.0 || nd.p1y <= 0.0) continue;  // outside the common support
            const double theta = std::abs(nd.y - nd.x);
            const double tprime = (1.0 - t) + t * (nd.p0x / nd.p1y);
            const double xt = (1.0 - t) * nd.x + t * nd.y;
            const double wxt = weight(xt);
            // rho_t at T_t(x) w.r.t. m
            const double rho_t = nd.p0x / (tprime * wxt);
            entropy.add(-nd.w * std::pow(rho_t, -1.0 / N));
            const double tau0 = tau(K, N, 1.0 - t, theta);
            const double tau1 = tau(K, N, t, theta);
            if (std::isinf(tau0) || std::isinf(tau1)) {
                rhs_infinite = true;
                break;
            }
            const double r0 = nd.p0x / nd.wx;  // rho_0(x) w.r.t. m
            const double r1 = nd.p1y / nd.wy;
            rhs.add(-nd.w * (tau0 * std::pow(r0, -1.0 / N) + tau1 * std::pow(r1, -1.0 / N)));
        }
        const double viol = rhs_infinite ? std::numeric_limits<double>::infinity()
                                         : entropy.value() - rhs.value();
        rep.violations.push_back(viol);
        rep.max_violation = std::max(rep.max_violation, viol);
    }
    rep.pass = rep.max_violation <= opt.tol;
    return rep;
}

inline WassersteinReport wasserstein_1d_cd_check(const MmInterval& mm, const ScalarField& mu0,
                                                 const ScalarField& mu1,
                                                 const Wasserstein1dOptions& opt = {}) {
    mm.validate();
    auto w = [&](double x) { return mm.phi.value(make_point(x)); };
    auto r0 = [&](double x) { return mu0.value(make_point(x)); };
    auto r1 = [&](double x) { return mu1.value(make_point(x)); };
    return wasserstein_1d_cd_core(w, mm.a, mm.b, mm.K, mm.N, r0, r1, opt);
}

}  // namespace gluecd
