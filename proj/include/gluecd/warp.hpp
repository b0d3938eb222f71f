#pragma once

// Warped products M x_f (r S^m) over a weighted base, f = Phi^{1/(N-n)}.
// Curvature enters through closed formulas only; round fibers are never
// charted (the 1d-fiber chart path exists in the tests as a cross-check).
//
// The vertical Ricci coefficient follows the (N-n-1) form, which makes the
// collapse identity and the round-sphere example exact.  The fiber dimension
// is the integer m = ceil(N) - n while f keeps the real exponent 1/(N-n).

#include "gluecd/weighted.hpp"

namespace gluecd {

struct WarpedProductSpec {
    WeightedManifold base;
    int m = 1;        // fiber dimension
    double r = 1.0;   // fiber radius
    double f_exp = 1.0;  // f = Phi^{f_exp}

    double fiber_ricci_lb() const { return (m - 1) / (r * r); }

    static WarpedProductSpec make(WeightedManifold base, double r = 1.0) {
        WarpedProductSpec s;
        const int n = base.dim();
        if (base.N <= n) throw ValidationError("warped product requires N > n");
        s.m = static_cast<int>(std::ceil(base.N)) - n;
        s.f_exp = 1.0 / (base.N - n);
        s.r = r;
        s.base = std::move(base);
        return s;
    }
};

// scalar eval of Phi^p, used for the collapsed weight f^m = Phi^{m/(N-n)}
struct PowFieldEval : ScalarEval {
    ScalarField field;
    double p;
    PowFieldEval(ScalarField f, double p_) : field(std::move(f)), p(p_) {}
    int dim() const override { return field.arity(); }
    Taylor eval(const Point& x, int order) const override {
        return taylor_pow(taylor_eval(field, x, order), p);
    }
};

// Ric of the warped product at (p, x) on xi + v, with |v|_fiber the norm of
// the fiber component in the unit round sphere:
//   Ric_M(xi,xi) - m Hess f(xi,xi)/f
//   + (m-1)|v|^2_fib - (Delta f/f + (m-1)|grad f|^2/f^2) |v|^2_gtilde,
// where |v|^2_gtilde = f^2 r^2 |v|^2_fib.
inline double warped_ricci(const WarpedProductSpec& spec, const Point& p,
                           const std::array<double, kMaxDim>& xi, double v_fib) {
    const int n = spec.base.dim();
    const Taylor phi = taylor_eval(spec.base.weight, p, 2);
    if (phi.v <= 0.0) throw EvalError("warped_ricci requires f > 0");
    const Taylor f = taylor_pow(phi, spec.f_exp);
    const MetricData d = metric_data(spec.base.chart, p, 2);
    const CurvatureResult curv = curvature_from(d);
    const HessGrad h = hessian_grad_from(d, f);

    double ric_m = 0.0, hess = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            ric_m += curv.ricci.bil(i, j) * xi[i] * xi[j];
            hess += h.hess.bil(i, j) * xi[i] * xi[j];
        }
    const double horizontal = ric_m - spec.m * hess / f.v;
    const double v2_fib = v_fib * v_fib;
    const double v2_warp = f.v * f.v * spec.r * spec.r * v2_fib;
    const double vertical = (spec.m - 1) * v2_fib -
                            (h.laplacian / f.v + (spec.m - 1) * h.gradnormsq / (f.v * f.v)) * v2_warp;
    return horizontal + vertical;
}

// Second fundamental form of the warped boundary at a base boundary point:
//   Pi((xi,v),(chi,w)) = Pi_base(xi,chi) - <nu, grad log f> f^2 r^2 <v,w>_fib.
inline double warped_boundary_sff(const WarpedProductSpec& spec, const Face& face, const Point& p,
                                  const std::array<double, kMaxDim>& xi,
                                  const std::array<double, kMaxDim>& chi, double vw_fib) {
    const BoundaryGeometry bg = boundary_geometry(spec.base, face, p);
    const int nf = spec.base.dim() - 1;
    double pi_base = 0.0;
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b)
            pi_base += bg.sff.bil(a, b) * xi[bg.face_axes[a]] * chi[bg.face_axes[b]];

    const Jet phi = jet_eval(spec.base.weight, bg.base, 1);
    if (phi.value <= 0.0) throw EvalError("warped boundary form requires f > 0");
    // grad log f = f_exp * grad log Phi
    double dlogf = 0.0;
    for (int i = 0; i < spec.base.dim(); ++i)
        dlogf += bg.normal[i] * spec.f_exp * phi.first[i] / phi.value;
    const double f = std::pow(phi.value, spec.f_exp);
    return pi_base - dlogf * f * f * spec.r * spec.r * vw_fib;
}

// ---------------------------------------------------------------------------
// Fiber curvature bound and radius:
//   (m-1) Ltilde >= (m-1) L - (N-1) theta max f + (N-1) eta,
// realized with the round fiber r S^m, 1/r^2 >= Ltilde.
// ---------------------------------------------------------------------------

struct FiberRadiusResult {
    double l_tilde = 0.0;
    double r = 1.0;
    double max_f = 0.0;
    bool constrained = true;  // false when Ltilde <= 0 (any radius works)
};

inline FiberRadiusResult fiber_radius(const WeightedManifold& base, double kbar, double eta,
                                      double L, int res = 33) {
    const int n = base.dim();
    if (base.N <= n) throw ValidationError("fiber radius requires N > n");
    const int m = static_cast<int>(std::ceil(base.N)) - n;
    const double theta = std::min(-kbar, eta);
    FiberRadiusResult out;
    std::array<std::vector<double>, kMaxDim> axes;
    for (int i = 0; i < n; ++i) axes[i] = interior_axis_points(base.chart.domain()[i], res);
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Point p{};
        for (int i = 0; i < n; ++i) p[i] = axes[i][static_cast<std::size_t>(idx[i])];
        const double phi = base.weight.value(p);
        if (phi > 0.0) out.max_f = std::max(out.max_f, std::pow(phi, 1.0 / (base.N - n)));
        int c = 0;
        while (c < n && ++idx[c] == res) idx[c++] = 0;
        if (c == n) break;
    }
    const double rhs = (m - 1) * L - (base.N - 1.0) * theta * out.max_f + (base.N - 1.0) * eta;
    out.l_tilde = m > 1 ? rhs / (m - 1) : rhs;  // S^1 fiber: flat, bound kept as-is
    if (out.l_tilde > 0.0) {
        out.r = 1.0 / std::sqrt(out.l_tilde);
        out.constrained = true;
    } else {
        out.r = 1.0;
        out.constrained = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Collapse identity: for horizontal directions the warped Ricci equals the
// Bakry-Emery tensor of (M, f^m vol, ceil(N)).  Exact algebra; the check
// reports the maximal deviation over an interior grid and direction set.
// ---------------------------------------------------------------------------

struct CollapseIdentityReport {
    double max_deviation = 0.0;
    Point argmax{};
    bool pass = false;
};

inline CollapseIdentityReport collapse_identity_check(const WarpedProductSpec& spec, int res = 9,
                                                      double tol = 1e-8) {
    const int n = spec.base.dim();
    const double ceil_n = std::ceil(spec.base.N);
    PowFieldEval weight(spec.base.weight, spec.m * spec.f_exp);  // f^m
    CollapseIdentityReport rep;
    std::array<std::vector<double>, kMaxDim> axes;
    for (int i = 0; i < n; ++i) axes[i] = interior_axis_points(spec.base.chart.domain()[i], res);
    std::vector<std::array<double, kMaxDim>> dirs;
    for (int i = 0; i < n; ++i) {
        std::array<double, kMaxDim> e{};
        e[i] = 1.0;
        dirs.push_back(e);
        for (int j = i + 1; j < n; ++j) {
            std::array<double, kMaxDim> s{};
            s[i] = 1.0;
            s[j] = 0.7;
            dirs.push_back(s);
        }
    }
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Point p{};
        for (int i = 0; i < n; ++i) p[i] = axes[i][static_cast<std::size_t>(idx[i])];
        if (spec.base.weight.value(p) > kWeightCutoff) {
            const BakryEmeryResult be = bakry_emery_at(spec.base.chart, weight, ceil_n, p);
            for (const auto& xi : dirs) {
                double q = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) q += be.tensor.bil(i, j) * xi[i] * xi[j];
                const double w = warped_ricci(spec, p, xi, 0.0);
                const double dev = std::abs(w - q);
                if (dev > rep.max_deviation) {
                    rep.max_deviation = dev;
                    rep.argmax = p;
                }
            }
        }
        int c = 0;
        while (c < n && ++idx[c] == res) idx[c++] = 0;
        if (c == n) break;
    }
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Hypothesis checks of the warped-product CD theorem: F-kappa concavity of f
// on the interior and |grad f| <= sqrt(K_F) on the declared zero-set faces.
// ---------------------------------------------------------------------------

struct WarpHypothesisReport {
    double max_concavity_eig = -std::numeric_limits<double>::infinity();
    double max_grad_excess = -std::numeric_limits<double>::infinity();
    bool has_zero_set = false;
    bool pass = false;
};

inline WarpHypothesisReport warped_cd_hypothesis_check(const WarpedProductSpec& spec, double kappa,
                                                      double K_F, int res = 33,
                                                      double tol = 1e-8) {
    const WeightedManifold& wm = spec.base;
    const int n = wm.dim();
    WarpHypothesisReport rep;

    // interior concavity: Hess f + kappa f g <= 0
    std::array<std::vector<double>, kMaxDim> axes;
    for (int i = 0; i < n; ++i) axes[i] = interior_axis_points(wm.chart.domain()[i], res);
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Point p{};
        for (int i = 0; i < n; ++i) p[i] = axes[i][static_cast<std::size_t>(idx[i])];
        const Taylor phi = taylor_eval(wm.weight, p, 2);
        if (phi.v > kWeightCutoff) {
            const MetricData d = metric_data(wm.chart, p, 1);
            const Taylor f = taylor_pow(phi, spec.f_exp);
            const HessGrad h = hessian_grad_from(d, f);
            Mat form = h.hess.as_mat();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) form[i][j] += kappa * f.v * d.g[i][j];
            rep.max_concavity_eig = std::max(rep.max_concavity_eig, max_generalized_eig(form, d.g, n));
        }
        int c = 0;
        while (c < n && ++idx[c] == res) idx[c++] = 0;
        if (c == n) break;
    }

    // |grad f| at the zero-set faces, by one-sided extrapolation from inside
    // (f's derivative jets blow up where Phi = 0)
    const double sqrt_kf = std::sqrt(std::max(0.0, K_F));
    for (const Face& face : wm.faces) {
        if (face.role != FaceRole::ZeroSet) continue;
        rep.has_zero_set = true;
        auto grad_norm_at = [&](const Point& q) {
            const MetricData d = metric_data(wm.chart, q, 1);
            const Taylor f = taylor_pow(taylor_eval(wm.weight, q, 1), spec.f_exp);
            double g2 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g2 += d.ginv[i][j] * f.d1[i] * f.d1[j];
            return std::sqrt(g2);
        };
        const Interval iv = wm.chart.domain()[face.axis];
        const double inward = face.at_min ? 1.0 : -1.0;
        const double face_x = face.at_min ? iv.lo : iv.hi;
        const double h0 = 1e-3 * (iv.hi - iv.lo);
        // face grid over the remaining axes
        std::array<int, kMaxDim> fidx{};
        for (;;) {
            Point q{};
            for (int i = 0; i < n; ++i) {
                const Interval di = wm.chart.domain()[i];
                q[i] = i == face.axis
                           ? face_x
                           : di.lo + (di.hi - di.lo) * fidx[i] / std::max(1, res - 1);
            }
            // quadratic extrapolation of |grad f|(face + s nu) to s = 0
            auto at = [&](double s) {
                Point qq = q;
                qq[face.axis] += inward * s;
                return grad_norm_at(qq);
            };
            const double v = (8.0 * at(h0 / 4) - 6.0 * at(h0 / 2) + at(h0)) / 3.0;
            rep.max_grad_excess = std::max(rep.max_grad_excess, v - sqrt_kf);
            int c = 0;
            while (c < n && (c == face.axis || ++fidx[c] == std::max(1, res - 1) + 1)) fidx[c++] = 0;
            if (c == n) break;
        }
    }
    rep.pass = rep.max_concavity_eig <= tol &&
               (!rep.has_zero_set || rep.max_grad_excess <= tol);
    return rep;
}

}  // namespace gluecd
