#pragma once

// Weighted-manifold curvature: the Bakry-Emery N-Ricci tensor, grid sweeps of
// its lower bound, boundary geometry (inward normal, second fundamental form,
// weighted mean curvature), and the concavity criteria on the weight.
//
// Sign conventions: Pi(X,Y) = g(nu, nabla_X Y) with nu the inward unit
// normal.  The boundary circle of the flat unit disk then has Pi = +g_Y.

#include <optional>

#include "gluecd/tensor.hpp"

namespace gluecd {

enum class FaceRole { Glue, Free, ZeroSet };

struct Face {
    int axis = 0;        // zero-based coordinate index
    bool at_min = true;  // face at the lower side of the interval
    FaceRole role = FaceRole::Free;
};

struct FieldEval : ScalarEval {
    ScalarField field;
    explicit FieldEval(ScalarField f) : field(std::move(f)) {}
    int dim() const override { return field.arity(); }
    Taylor eval(const Point& x, int order) const override { return taylor_eval(field, x, order); }
};

struct WeightedManifold {
    MetricChart chart;
    ScalarField weight;
    double N = 0.0;
    std::vector<Face> faces;

    int dim() const { return chart.dim(); }

    std::optional<Face> glue_face() const {
        for (const Face& f : faces)
            if (f.role == FaceRole::Glue) return f;
        return std::nullopt;
    }

    // Collar contract: the glue face is x^n = 0 and the chart is {x^n in
    // [0, depth]} over it.
    double collar_depth() const {
        const auto gf = glue_face();
        if (!gf) throw ValidationError("manifold has no glue face");
        if (gf->axis != dim() - 1 || !gf->at_min || chart.domain()[gf->axis].lo != 0.0)
            throw ValidationError("glue face must be the face x^n = 0 of a collar chart");
        return chart.domain()[gf->axis].hi;
    }

    void validate(int grid = 9) const {
        if (N < dim()) throw ValidationError("synthetic dimension N must be >= chart dimension");
        int glue_count = 0;
        for (const Face& f : faces) {
            if (f.axis < 0 || f.axis >= dim()) throw ValidationError("face axis out of range");
            if (f.role == FaceRole::Glue) ++glue_count;
        }
        if (glue_count > 1) throw ValidationError("at most one glue face allowed");
        // sampled nonnegativity of the weight (and positivity on the glue face)
        std::array<int, kMaxDim> idx{};
        const int n = dim();
        for (;;) {
            Point p{};
            for (int i = 0; i < n; ++i) {
                const Interval iv = chart.domain()[i];
                p[i] = iv.lo + (iv.hi - iv.lo) * idx[i] / (grid - 1);
            }
            if (weight.value(p) < 0.0)
                throw ValidationError("weight is negative at a sampled point");
            int c = 0;
            while (c < n && ++idx[c] == grid) idx[c++] = 0;
            if (c == n) break;
        }
        if (glue_count == 1) {
            const Face gf = *glue_face();
            std::array<int, kMaxDim> yidx{};
            for (;;) {
                Point p{};
                for (int i = 0; i < n; ++i) {
                    const Interval iv = chart.domain()[i];
                    p[i] = i == gf.axis ? (gf.at_min ? iv.lo : iv.hi)
                                        : iv.lo + (iv.hi - iv.lo) * yidx[i] / (grid - 1);
                }
                if (weight.value(p) <= 0.0)
                    throw ValidationError("weight must be positive on the glue face");
                int c = 0;
                while (c < n && (c == gf.axis || ++yidx[c] == grid)) yidx[c++] = 0;
                if (c == n) break;
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Bakry-Emery N-Ricci tensor.
// ---------------------------------------------------------------------------

enum class BakryEmeryBranch { Regular, LogHessian, MinusInfinity };

struct BakryEmeryResult {
    BakryEmeryBranch branch = BakryEmeryBranch::Regular;
    TensorValue tensor;                     // Regular / LogHessian
    std::array<double, kMaxDim> degeneracy{};  // d log Phi for the N = n branch
};

inline BakryEmeryResult bakry_emery_from(const MetricData& d, const CurvatureResult& curv,
                                         const Taylor& phi, double N) {
    const int n = d.n;
    BakryEmeryResult out;
    out.tensor = curv.ricci;
    if (N < n) {
        out.branch = BakryEmeryBranch::MinusInfinity;
        return out;
    }
    if (phi.v <= 0.0) throw EvalError("weight must be positive for the Bakry-Emery tensor");
    if (N == n) {
        out.branch = BakryEmeryBranch::LogHessian;
        const Taylor logphi = taylor_log(phi);
        const HessGrad h = hessian_grad_from(d, logphi);
        for (int i = 0; i < n; ++i) {
            out.degeneracy[i] = logphi.d1[i];
            for (int j = 0; j < n; ++j) out.tensor.bil(i, j) -= h.hess.bil(i, j);
        }
        return out;
    }
    const double m = N - n;
    const Taylor f = taylor_pow(phi, 1.0 / m);
    const HessGrad h = hessian_grad_from(d, f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.tensor.bil(i, j) -= m * h.hess.bil(i, j) / f.v;
    return out;
}

inline BakryEmeryResult bakry_emery_at(const MetricEval& metric, const ScalarEval& weight,
                                       double N, const Point& x) {
    if (N < metric.dim()) {
        BakryEmeryResult out;
        out.branch = BakryEmeryBranch::MinusInfinity;
        return out;
    }
    const MetricData d = metric_data(metric, x, 2);
    return bakry_emery_from(d, curvature_from(d), weight.eval(x, 2), N);
}

inline BakryEmeryResult bakry_emery(const WeightedManifold& wm, const Point& x) {
    FieldEval w(wm.weight);
    return bakry_emery_at(wm.chart, w, wm.N, x);
}

// ---------------------------------------------------------------------------
// Grid sweep of the Bakry-Emery lower bound: min over a uniform interior grid
// of lambda_min(Ric^{Phi,N} vs g).  The grid is shrunk by one step from every
// face; resolution is the caller's knob.
// ---------------------------------------------------------------------------

struct RicciSweepResult {
    double min_eig = std::numeric_limits<double>::infinity();
    Point argmin{};
    long evaluated = 0;
    std::vector<Point> skipped;  // weight below cutoff
};

inline std::vector<double> interior_axis_points(const Interval& iv, int res) {
    std::vector<double> pts(static_cast<std::size_t>(res));
    const double h = (iv.hi - iv.lo) / (res + 1);
    for (int j = 0; j < res; ++j) pts[static_cast<std::size_t>(j)] = iv.lo + (j + 1) * h;
    return pts;
}

inline constexpr double kWeightCutoff = 1e-12;

inline RicciSweepResult ricci_bound_sweep(const WeightedManifold& wm, int res) {
    const int n = wm.dim();
    FieldEval w(wm.weight);
    std::array<std::vector<double>, kMaxDim> axes;
    for (int i = 0; i < n; ++i) axes[i] = interior_axis_points(wm.chart.domain()[i], res);
    RicciSweepResult out;
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Point p{};
        for (int i = 0; i < n; ++i) p[i] = axes[i][static_cast<std::size_t>(idx[i])];
        if (wm.weight.value(p) < kWeightCutoff) {
            out.skipped.push_back(p);
        } else {
            const BakryEmeryResult be = bakry_emery_at(wm.chart, w, wm.N, p);
            double lam;
            if (be.branch == BakryEmeryBranch::MinusInfinity) {
                lam = -std::numeric_limits<double>::infinity();
            } else if (be.branch == BakryEmeryBranch::LogHessian) {
                double dn = 0.0;
                for (int i = 0; i < n; ++i) dn += be.degeneracy[i] * be.degeneracy[i];
                lam = dn > 1e-24 ? -std::numeric_limits<double>::infinity()
                                 : min_generalized_eig(be.tensor.as_mat(), wm.chart.value(p), n);
            } else {
                lam = min_generalized_eig(be.tensor.as_mat(), wm.chart.value(p), n);
            }
            ++out.evaluated;
            if (lam < out.min_eig) {  // strict: first grid index wins ties
                out.min_eig = lam;
                out.argmin = p;
            }
        }
        int c = 0;
        while (c < n && ++idx[c] == res) idx[c++] = 0;
        if (c == n) break;
    }
    if (out.evaluated == 0) throw ValidationError("effective sweep grid is empty");
    return out;
}

// ---------------------------------------------------------------------------
// Boundary geometry at a face point.
// ---------------------------------------------------------------------------

struct BoundaryGeometry {
    Point base{};
    std::array<double, kMaxDim> normal{};  // inward unit normal, coordinate components
    std::array<int, kMaxDim> face_axes{};  // the n-1 tangential coordinate axes
    TensorValue sff;                       // Pi on the face tangent space
    Mat face_metric{};                     // induced metric on the face coordinates
    double tr_sff = 0.0;
    double h_phi = 0.0;                    // tr Pi - <nu, grad log Phi>
};

inline BoundaryGeometry boundary_geometry(const WeightedManifold& wm, const Face& face,
                                          const Point& face_point) {
    const int n = wm.dim();
    const int c = face.axis;
    Point p = face_point;
    p[c] = face.at_min ? wm.chart.domain()[c].lo : wm.chart.domain()[c].hi;

    const MetricData d = metric_data(wm.chart, p, 1);
    const Christoffels ch = christoffels_from(d);

    BoundaryGeometry out;
    out.base = p;
    // inward normal: nu ~ grad of the coordinate function x^c, oriented into
    // the domain, normalized;  g(nu, d_a) = 0 for face-tangent a holds exactly
    const double s = face.at_min ? 1.0 : -1.0;
    const double norm = std::sqrt(d.ginv[c][c]);
    for (int i = 0; i < n; ++i) out.normal[i] = s * d.ginv[i][c] / norm;

    int na = 0;
    for (int i = 0; i < n; ++i)
        if (i != c) out.face_axes[na++] = i;

    // nu-flat
    std::array<double, kMaxDim> nu_flat{};
    for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) v += d.g[k][m] * out.normal[m];
        nu_flat[k] = v;
    }

    out.sff.kind = TensorKind::Bilinear;
    out.sff.dim = n - 1;
    out.sff.point = p;
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b) {
            double v = 0.0;
            for (int k = 0; k < n; ++k) v += ch.gamma[k][out.face_axes[a]][out.face_axes[b]] * nu_flat[k];
            out.sff.bil(a, b) = v;
            out.face_metric[a][b] = d.g[out.face_axes[a]][out.face_axes[b]];
        }
    if (n > 1 && sym_eigen(out.face_metric, n - 1).values[0] <= 1e-12)
        throw DegenerateMetricError("induced metric on face is degenerate", p);

    if (n > 1) {
        const Mat gyinv = mat_inverse(out.face_metric, n - 1);
        for (int a = 0; a < n - 1; ++a)
            for (int b = 0; b < n - 1; ++b) out.tr_sff += gyinv[a][b] * out.sff.bil(a, b);
    }

    const Jet phi = jet_eval(wm.weight, p, 1);
    if (phi.value <= 0.0) throw EvalError("weight must be positive at the boundary point");
    double dlog = 0.0;
    for (int i = 0; i < n; ++i) dlog += out.normal[i] * phi.first[i] / phi.value;
    out.h_phi = out.tr_sff - dlog;
    return out;
}

// ---------------------------------------------------------------------------
// Concavity criteria on the weight.
// ---------------------------------------------------------------------------

struct ConcavityReport {
    double theta = 0.0;
    double max_eig = -std::numeric_limits<double>::infinity();
    Point argmax{};
    bool pass = false;
};

// Checks Hess(f) + theta f g <= 0 for f = Phi^{1/(N-n)}, theta = min(-kbar, eta).
inline ConcavityReport weight_concavity_check(const WeightedManifold& wm, double kbar, double eta,
                                              int res = 33, double tol = 1e-8) {
    const int n = wm.dim();
    if (wm.N <= n) throw ValidationError("weight concavity check requires N > n");
    ConcavityReport rep;
    rep.theta = std::min(-kbar, eta);
    std::array<std::vector<double>, kMaxDim> axes;
    for (int i = 0; i < n; ++i) axes[i] = interior_axis_points(wm.chart.domain()[i], res);
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Point p{};
        for (int i = 0; i < n; ++i) p[i] = axes[i][static_cast<std::size_t>(idx[i])];
        const Taylor phi = taylor_eval(wm.weight, p, 2);
        if (phi.v > kWeightCutoff) {
            const MetricData d = metric_data(wm.chart, p, 1);
            const Taylor f = taylor_pow(phi, 1.0 / (wm.N - n));
            const HessGrad h = hessian_grad_from(d, f);
            Mat form = h.hess.as_mat();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) form[i][j] += rep.theta * f.v * d.g[i][j];
            const double lam = max_generalized_eig(form, d.g, n);
            if (lam > rep.max_eig) {
                rep.max_eig = lam;
                rep.argmax = p;
            }
        }
        int c = 0;
        while (c < n && ++idx[c] == res) idx[c++] = 0;
        if (c == n) break;
    }
    rep.pass = rep.max_eig <= tol;
    return rep;
}

struct GradientBoundReport {
    double max_kf2_minus_L = -std::numeric_limits<double>::infinity();
    double max_grad_term = -std::numeric_limits<double>::infinity();
    bool pass = false;
};

// Condition (2) of the warped-fiber criterion, in the normalization
// |grad f|^2 + k f^2 <= L (set `squared` for the L^2 variant).
inline GradientBoundReport gradient_bound_check(const WeightedManifold& wm, double k, double L, bool squared = false,
                             int res = 65, double tol = 1e-9) {
    const int n = wm.dim();
    if (wm.N <= n) throw ValidationError("gradient bound check requires N > n");
    GradientBoundReport rep;
    const double bound = squared ? L * L : L;
    std::array<std::vector<double>, kMaxDim> axes;
    for (int i = 0; i < n; ++i) axes[i] = interior_axis_points(wm.chart.domain()[i], res);
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Point p{};
        for (int i = 0; i < n; ++i) p[i] = axes[i][static_cast<std::size_t>(idx[i])];
        const Taylor phi = taylor_eval(wm.weight, p, 1);
        if (phi.v > kWeightCutoff) {
            const MetricData d = metric_data(wm.chart, p, 1);
            const Taylor f = taylor_pow(phi, 1.0 / (wm.N - n));
            double gradsq = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) gradsq += d.ginv[i][j] * f.d1[i] * f.d1[j];
            rep.max_kf2_minus_L = std::max(rep.max_kf2_minus_L, k * f.v * f.v - L);
            rep.max_grad_term = std::max(rep.max_grad_term, gradsq + k * f.v * f.v - bound);
        }
        int c = 0;
        while (c < n && ++idx[c] == res) idx[c++] = 0;
        if (c == n) break;
    }
    rep.pass = rep.max_kf2_minus_L <= tol && rep.max_grad_term <= tol;
    return rep;
}

}  // namespace gluecd
