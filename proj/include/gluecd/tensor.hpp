#pragma once

// Chart-based tensor calculus.  Index conventions used throughout:
//   Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
//   R(d_i, d_j) d_k = R^l_{ijk} d_l,
//   R^l_{ijk} = d_i Gamma^l_jk - d_j Gamma^l_ik
//             + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
//   R_ijkl = g_lm R^m_{ijk},   Ric_jk = R^i_{ijk},   scal = g^{jk} Ric_jk.
// With these signs the unit round sphere has Ric = +g.

#include <vector>

#include "gluecd/linalg.hpp"
#include "gluecd/taylor.hpp"

namespace gluecd {

enum class TensorKind { Scalar, Covector, Bilinear, Operator, Curvature4 };

struct TensorValue {
    TensorKind kind = TensorKind::Scalar;
    int dim = 0;
    Point point{};
    std::array<double, 256> a{};  // flat components, kind-dependent indexing

    double& bil(int i, int j) { return a[static_cast<std::size_t>(i * dim + j)]; }
    double bil(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }
    double& cur(int i, int j, int k, int l) {
        return a[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
    }
    double cur(int i, int j, int k, int l) const {
        return a[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
    }

    Mat as_mat() const {
        Mat m{};
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m[i][j] = bil(i, j);
        return m;
    }
};

inline TensorValue bilinear_tensor(int dim, const Point& p, const Mat& m) {
    TensorValue t;
    t.kind = TensorKind::Bilinear;
    t.dim = dim;
    t.point = p;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) t.bil(i, j) = m[i][j];
    return t;
}

// ---------------------------------------------------------------------------
// Metric evaluation interfaces.  Charts back them with expression jets; the
// smoothing module backs them with mollified quadratures.
// ---------------------------------------------------------------------------

inline int sym_count(int n) { return n * (n + 1) / 2; }

inline int sym_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}

struct MetricEval {
    virtual ~MetricEval() = default;
    virtual int dim() const = 0;
    // jets of the upper-triangle components g_ij, i <= j, at x
    virtual void components(const Point& x, int order, Taylor* out) const = 0;
};

struct ScalarEval {
    virtual ~ScalarEval() = default;
    virtual int dim() const = 0;
    virtual Taylor eval(const Point& x, int order) const = 0;
};

// All metric data a curvature evaluation needs at one point.
struct MetricData {
    int n = 0;
    int order = 0;
    Point x{};
    Mat g{};
    Mat ginv{};
    double dg[kMaxDim][kMaxDim][kMaxDim] = {};               // dg[k][i][j] = d_k g_ij
    double d2g[kMaxDim][kMaxDim][kMaxDim][kMaxDim] = {};     // d2g[k][l][i][j]
};

inline MetricData metric_data(const MetricEval& m, const Point& x, int order) {
    const int n = m.dim();
    std::array<Taylor, 10> comp;
    m.components(x, order, comp.data());
    MetricData d;
    d.n = n;
    d.order = order;
    d.x = x;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Taylor& t = comp[static_cast<std::size_t>(sym_index(n, i, j))];
            d.g[i][j] = d.g[j][i] = t.v;
            if (order >= 1)
                for (int k = 0; k < n; ++k) d.dg[k][i][j] = d.dg[k][j][i] = t.d1[k];
            if (order >= 2)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) d.d2g[k][l][i][j] = d.d2g[k][l][j][i] = t.d2[k][l];
        }
    if (condition_number_spd(d.g, n) > 1e12)
        throw DegenerateMetricError("metric degenerate (condition number > 1e12)", x);
    d.ginv = mat_inverse(d.g, n);
    return d;
}

struct Christoffels {
    int n = 0;
    double gamma[kMaxDim][kMaxDim][kMaxDim] = {};  // gamma[k][i][j] = Gamma^k_ij
};

inline Christoffels christoffels_from(const MetricData& d) {
    Christoffels c;
    c.n = d.n;
    for (int k = 0; k < d.n; ++k)
        for (int i = 0; i < d.n; ++i)
            for (int j = i; j < d.n; ++j) {
                double s = 0.0;
                for (int l = 0; l < d.n; ++l)
                    s += d.ginv[k][l] * (d.dg[i][j][l] + d.dg[j][i][l] - d.dg[l][i][j]);
                c.gamma[k][i][j] = c.gamma[k][j][i] = 0.5 * s;
            }
    return c;
}

// d_m Gamma^k_ij, from second metric derivatives.  Needs order >= 2 data.
inline void christoffel_derivatives(const MetricData& d, const Christoffels& c,
                                    double out[kMaxDim][kMaxDim][kMaxDim][kMaxDim]) {
    const int n = d.n;
    // d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    double dginv[kMaxDim][kMaxDim][kMaxDim] = {};
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) s += d.ginv[k][a] * d.dg[m][a][b] * d.ginv[b][l];
                dginv[m][k][l] = -s;
            }
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        s += dginv[m][k][l] * (d.dg[i][j][l] + d.dg[j][i][l] - d.dg[l][i][j]);
                        s += d.ginv[k][l] *
                             (d.d2g[m][i][j][l] + d.d2g[m][j][i][l] - d.d2g[m][l][i][j]);
                    }
                    out[m][k][i][j] = 0.5 * s;
                }
}

struct CurvatureResult {
    TensorValue riemann;  // (0,4) R_ijkl
    TensorValue ricci;    // bilinear
    double scalar = 0.0;
};

inline CurvatureResult curvature_from(const MetricData& d) {
    const int n = d.n;
    const Christoffels c = christoffels_from(d);
    static thread_local double dgamma[kMaxDim][kMaxDim][kMaxDim][kMaxDim];
    christoffel_derivatives(d, c, dgamma);

    CurvatureResult res;
    res.riemann.kind = TensorKind::Curvature4;
    res.riemann.dim = n;
    res.riemann.point = d.x;
    res.ricci.kind = TensorKind::Bilinear;
    res.ricci.dim = n;
    res.ricci.point = d.x;

    double rup[kMaxDim][kMaxDim][kMaxDim][kMaxDim];  // R^l_{ijk}
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for (int m = 0; m < n; ++m)
                        s += c.gamma[l][i][m] * c.gamma[m][j][k] -
                             c.gamma[l][j][m] * c.gamma[m][i][k];
                    rup[l][i][j][k] = s;
                }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m) s += d.g[l][m] * rup[m][i][j][k];
                    res.riemann.cur(i, j, k, l) = s;
                }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += rup[i][i][j][k];
            res.ricci.bil(j, k) = s;
        }
    // enforce exact storage symmetry of the Ricci form
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const double avg = 0.5 * (res.ricci.bil(j, k) + res.ricci.bil(k, j));
            res.ricci.bil(j, k) = avg;
            res.ricci.bil(k, j) = avg;
        }
    res.scalar = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) res.scalar += d.ginv[j][k] * res.ricci.bil(j, k);
    return res;
}

struct HessGrad {
    std::array<double, kMaxDim> grad{};  // contravariant gradient
    TensorValue hess;                    // covariant Hessian
    double laplacian = 0.0;
    double gradnormsq = 0.0;
};

// Covariant Hessian of a scalar jet against metric data (order >= 1 needed
// from the metric, order >= 2 from the field).
inline HessGrad hessian_grad_from(const MetricData& d, const Taylor& f) {
    const int n = d.n;
    const Christoffels c = christoffels_from(d);
    HessGrad out;
    out.hess.kind = TensorKind::Bilinear;
    out.hess.dim = n;
    out.hess.point = d.x;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double h = f.d2[i][j];
            for (int k = 0; k < n; ++k) h -= c.gamma[k][i][j] * f.d1[k];
            out.hess.bil(i, j) = h;
        }
    for (int i = 0; i < n; ++i) {
        double gi = 0.0;
        for (int j = 0; j < n; ++j) gi += d.ginv[i][j] * f.d1[j];
        out.grad[i] = gi;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.laplacian += d.ginv[i][j] * out.hess.bil(i, j);
            out.gradnormsq += d.ginv[i][j] * f.d1[i] * f.d1[j];
        }
    return out;
}

// ---------------------------------------------------------------------------
// MetricChart: a coordinate box with expression-backed metric coefficients.
// Positive definiteness is validated lazily at evaluated points.
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0, hi = 0.0;
};

class MetricChart : public MetricEval {
  public:
    MetricChart() = default;
    MetricChart(int n, std::array<Interval, kMaxDim> domain, std::vector<ScalarField> upper)
        : n_(n), domain_(domain), comp_(std::move(upper)) {
        if (n < 1 || n > kMaxDim) throw ValidationError("chart dimension must be 1..4");
        if (static_cast<int>(comp_.size()) != sym_count(n))
            throw ValidationError("metric needs n(n+1)/2 components");
        for (const ScalarField& f : comp_)
            if (f.arity() != n) throw ValidationError("metric component arity mismatch");
    }

    int dim() const override { return n_; }
    const std::array<Interval, kMaxDim>& domain() const { return domain_; }
    const ScalarField& component(int i, int j) const {
        return comp_[static_cast<std::size_t>(sym_index(n_, i, j))];
    }

    bool inside(const Point& x, double margin = 0.0) const {
        for (int i = 0; i < n_; ++i)
            if (x[i] < domain_[i].lo - margin || x[i] > domain_[i].hi + margin) return false;
        return true;
    }

    void components(const Point& x, int order, Taylor* out) const override {
        for (int i = 0; i < sym_count(n_); ++i) out[i] = taylor_eval(comp_[i], x, order);
    }

    Mat value(const Point& x) const {
        Mat g{};
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j)
                g[i][j] = g[j][i] = component(i, j).value(x);
        // every evaluated metric value must be positive definite
        if (sym_eigen(g, n_).values[0] <= 1e-10)
            throw DegenerateMetricError("metric not positive definite at sampled point", x);
        return g;
    }

  private:
    int n_ = 0;
    std::array<Interval, kMaxDim> domain_{};
    std::vector<ScalarField> comp_;
};

// ---------------------------------------------------------------------------
// chart-level operations.
// ---------------------------------------------------------------------------

inline TensorValue christoffel(const MetricEval& m, const Point& x) {
    const MetricData d = metric_data(m, x, 1);
    const Christoffels c = christoffels_from(d);
    TensorValue t;
    t.kind = TensorKind::Operator;  // one upper, two lower slots, stored flat
    t.dim = d.n;
    t.point = x;
    for (int k = 0; k < d.n; ++k)
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.n; ++j)
                t.a[static_cast<std::size_t>((k * d.n + i) * d.n + j)] = c.gamma[k][i][j];
    return t;
}

inline double christoffel_component(const TensorValue& t, int k, int i, int j) {
    return t.a[static_cast<std::size_t>((k * t.dim + i) * t.dim + j)];
}

inline CurvatureResult curvature(const MetricEval& m, const Point& x) {
    return curvature_from(metric_data(m, x, 2));
}

inline HessGrad hessian_grad(const MetricEval& m, const ScalarField& f, const Point& x) {
    const MetricData d = metric_data(m, x, 1);
    return hessian_grad_from(d, taylor_eval(f, x, 2));
}

}  // namespace gluecd
