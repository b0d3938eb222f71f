#pragma once

// Smoothing of the glued metric:
//  (1) deform side 0 by G_delta = I + 2 F_delta(s) L - 2 C Fcal_delta(s) P^T,
//      with L the interface form Pi_0 + Pi_1 parallel-transported along the
//      normal coordinate lines,
//  (2) mollify the piecewise metric across t = 0 with a compactly supported
//      smooth kernel; derivatives of the mollified metric come from kernel
//      derivatives, never from differentiating the piecewise data across 0.
//
// F'_delta(0) = +1 cancels the C^1 jump of the tangential block:
//   d_t g_ab(0+) - d_t g_ab(0-) = -2 (Pi_0 + Pi_1)_ab + 2 F'(0) L_ab.

#include "gluecd/collar.hpp"

namespace gluecd {

struct SmoothingProfile {
    double delta = 0.1;
    double C = 1.0;
    double h = 0.0;       // mollification width; defaults to delta^5
    int sign = +1;        // sign of F; +1 is fixed by the c1 check on the doubled disk
    double fcal_pow = 5;  // Fcal amplitude delta^fcal_pow (C^2-small so its Ricci error vanishes)
    bool enable_F = true;
    bool enable_Fcal = true;

    static SmoothingProfile make(double delta, double C = 1.0, double h = -1.0) {
        SmoothingProfile p;
        p.delta = delta;
        p.C = C;
        p.h = h > 0.0 ? h : std::pow(delta, 5);
        return p;
    }

    // F(t) = sign * int_0^t smoothstep(u/delta^4) du, truncated smoothly to
    // vanish for t >= delta.  F(0) = 0, F'(0) = sign, support in [0, delta).
    // The cutoff decays over the full [0, delta] so the truncation tail only
    // contributes O(delta^2) second derivatives (the ramp height is delta^4).
    double F(double t) const {
        if (!enable_F || t <= 0.0 || t >= delta) return 0.0;
        const double d4 = delta * delta * delta * delta;
        const double ramp = d4 * smoothstep_integral(t / d4);
        return sign * ramp * smoothstep(t / delta);
    }
    double F_prime0() const { return enable_F ? static_cast<double>(sign) : 0.0; }

    // Fcal(t) = delta^fcal_pow (t/delta)^2 smoothstep(t/delta):
    // Fcal(0) = Fcal'(0) = 0, support in [0, delta).
    double Fcal(double t) const {
        if (!enable_Fcal || t <= 0.0 || t >= delta) return 0.0;
        const double w = t / delta;
        return std::pow(delta, fcal_pow) * w * w * smoothstep(w);
    }
};

// ---------------------------------------------------------------------------
// Parallel transport of the interface form L = Pi_0 + Pi_1 along the normal
// coordinate lines of side 0 (unit-speed geodesics in Fermi coordinates):
//   d/ds L_ab = Gamma^c_{na} L_cb + Gamma^c_{nb} L_ac.
// Tabulated once over a (y, s) grid, then read-only (Catmull-Rom lookup).
// ---------------------------------------------------------------------------

class TransportTable {
  public:
    TransportTable() = default;

    TransportTable(const CollarGluedSpace& gs, double delta, int y_res = 0, int s_res = 128) {
        n_ = gs.dim();
        const int ny = n_ - 1;
        s_res_ = s_res;
        s_max_ = std::min(delta, gs.depth(0));
        if (y_res <= 0) y_res = ny <= 1 ? 129 : (ny == 2 ? 33 : 9);
        y_res_ = ny == 0 ? 1 : y_res;
        for (int i = 0; i < ny; ++i) dom_[i] = gs.side(0).chart.domain()[i];

        long y_count = 1;
        for (int i = 0; i < ny; ++i) y_count *= y_res_;
        comps_ = std::max(1, ny * ny);
        data_.assign(static_cast<std::size_t>(y_count) * (s_res_ + 1) *
                         static_cast<std::size_t>(comps_),
                     0.0);

        for (long yi = 0; yi < y_count; ++yi) {
            Point y{};
            long rem = yi;
            for (int i = 0; i < ny; ++i) {
                const int idx = static_cast<int>(rem % y_res_);
                rem /= y_res_;
                y[i] = y_res_ == 1 ? 0.5 * (dom_[i].lo + dom_[i].hi)
                                   : dom_[i].lo + (dom_[i].hi - dom_[i].lo) * idx / (y_res_ - 1);
            }
            solve_line(gs, y, yi);
        }
    }

    bool empty() const { return data_.empty(); }
    double s_max() const { return s_max_; }

    Mat eval(const Point& y, double s) const {
        const int ny = n_ - 1;
        Mat out{};
        if (ny == 0 || data_.empty()) return out;
        std::array<double, kMaxDim> yc{};
        for (int i = 0; i < ny; ++i) {
            const double step = y_res_ > 1 ? (dom_[i].hi - dom_[i].lo) / (y_res_ - 1) : 1.0;
            yc[i] = y_res_ > 1 ? (y[i] - dom_[i].lo) / step : 0.0;
        }
        const double sc = std::clamp(s, 0.0, s_max_) / (s_max_ / s_res_);
        for (int a = 0; a < ny; ++a)
            for (int b = 0; b < ny; ++b)
                out[a][b] = axis_interp(yc.data(), sc, 0, std::array<int, kMaxDim>{}, a * ny + b);
        return out;
    }

  private:
    double axis_interp(const double* yc, double sc, int axis, std::array<int, kMaxDim> nodes,
                       int comp) const {
        const int ny = n_ - 1;
        if (axis == ny)
            return cr1(sc, s_res_ + 1, [&](int node) { return fetch(nodes, node, comp); });
        return cr1(yc[axis], y_res_, [&](int node) {
            auto nn = nodes;
            nn[axis] = node;
            return axis_interp(yc, sc, axis + 1, nn, comp);
        });
    }

    template <typename F>
    static double cr1(double c, int res, F&& value_at) {
        if (res == 1) return value_at(0);
        const double cc = std::clamp(c, 0.0, static_cast<double>(res - 1));
        const int i1 = std::clamp(static_cast<int>(std::floor(cc)), 0, res - 2);
        const double u = cc - i1;
        double v[4];
        for (int k = -1; k <= 2; ++k) v[k + 1] = value_at(std::clamp(i1 + k, 0, res - 1));
        return 0.5 * (2.0 * v[1] + (-v[0] + v[2]) * u +
                      (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) * u * u +
                      (-v[0] + 3 * v[1] - 3 * v[2] + v[3]) * u * u * u);
    }

    double fetch(const std::array<int, kMaxDim>& ynodes, int s_node, int comp) const {
        const int ny = n_ - 1;
        long yi = 0;
        for (int i = ny - 1; i >= 0; --i) yi = yi * y_res_ + ynodes[i];
        const std::size_t base =
            (static_cast<std::size_t>(yi) * (s_res_ + 1) + static_cast<std::size_t>(s_node)) *
            static_cast<std::size_t>(comps_);
        return data_[base + static_cast<std::size_t>(comp)];
    }

    void store(long yi, int s_node, const Mat& L) {
        const int ny = n_ - 1;
        const std::size_t base =
            (static_cast<std::size_t>(yi) * (s_res_ + 1) + static_cast<std::size_t>(s_node)) *
            static_cast<std::size_t>(comps_);
        for (int a = 0; a < ny; ++a)
            for (int b = 0; b < ny; ++b)
                data_[base + static_cast<std::size_t>(a * ny + b)] = L[a][b];
    }

    static Mat axpy(const Mat& base, const Mat& dir, double t) {
        Mat r = base;
        for (int i = 0; i < kMaxDim; ++i)
            for (int j = 0; j < kMaxDim; ++j) r[i][j] += t * dir[i][j];
        return r;
    }

    void solve_line(const CollarGluedSpace& gs, Point y, long yi) {
        const int ny = n_ - 1;
        Mat L{};
        if (ny > 0) {
            const BoundaryGeometry b0 = boundary_geometry(gs.side(0), gs.glue_face(0), y);
            const BoundaryGeometry b1 = boundary_geometry(gs.side(1), gs.glue_face(1), y);
            for (int a = 0; a < ny; ++a)
                for (int b = 0; b < ny; ++b) L[a][b] = b0.sff.bil(a, b) + b1.sff.bil(a, b);
        }
        store(yi, 0, L);
        const double ds = s_max_ / s_res_;
        auto rhs = [&](double s, const Mat& cur) {
            Point p = y;
            p[n_ - 1] = s;
            const MetricData d = metric_data(gs.side(0).chart, p, 1);
            const Christoffels ch = christoffels_from(d);
            Mat out{};
            for (int a = 0; a < ny; ++a)
                for (int b = 0; b < ny; ++b) {
                    double v = 0.0;
                    for (int c = 0; c < ny; ++c)
                        v += ch.gamma[c][n_ - 1][a] * cur[c][b] + ch.gamma[c][n_ - 1][b] * cur[a][c];
                    out[a][b] = v;
                }
            return out;
        };
        for (int js = 0; js < s_res_; ++js) {
            const double s = js * ds;
            const Mat k1 = rhs(s, L);
            const Mat k2 = rhs(s + ds / 2, axpy(L, k1, ds / 2));
            const Mat k3 = rhs(s + ds / 2, axpy(L, k2, ds / 2));
            const Mat k4 = rhs(s + ds, axpy(L, k3, ds));
            for (int a = 0; a < ny; ++a)
                for (int b = 0; b < ny; ++b)
                    L[a][b] += ds / 6.0 * (k1[a][b] + 2 * k2[a][b] + 2 * k3[a][b] + k4[a][b]);
            store(yi, js + 1, L);
        }
    }

    int n_ = 0;
    int y_res_ = 1;
    int s_res_ = 128;
    int comps_ = 1;
    double s_max_ = 0.0;
    std::array<Interval, kMaxDim> dom_{};
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// The deformed piecewise metric g_(delta): side 0 carries
//   g_ab + 2 F(s) L_ab - 2 C Fcal(s) g_ab            (tangential block)
// while g_nn and g_na are untouched (L nu = 0, P^T nu = 0), and side 1 is the
// original metric.  On Y (t = 0) the metric is unchanged.
// ---------------------------------------------------------------------------

class DeformedGluedMetric {
  public:
    DeformedGluedMetric(const CollarGluedSpace& gs, const SmoothingProfile& prof)
        : gs_(&gs), prof_(prof), transport_(gs, prof.delta) {
        validate_pd();
    }

    const CollarGluedSpace& glued() const { return *gs_; }
    const SmoothingProfile& profile() const { return prof_; }

    int dim() const { return gs_->dim(); }

    // full component matrix of g_(delta) in glued coordinates
    Mat value(const Point& glued) const {
        Mat g = gs_->glued_metric_value(glued);
        const double t = glued[dim() - 1];
        if (t <= 0.0 || t >= prof_.delta) return g;
        apply_deformation(glued, t, g);
        return g;
    }

    // C^1 mismatch of the tangential block across t = 0, per interface point:
    // d_s g0_ab + d_s g1_ab + 2 F'(0) L_ab, evaluated analytically.
    Mat c1_jump(const Point& y) const {
        const int n = dim();
        Point p = y;
        p[n - 1] = 0.0;
        std::array<Taylor, 10> c0, c1;
        gs_->side(0).chart.components(p, 1, c0.data());
        gs_->side(1).chart.components(p, 1, c1.data());
        const BoundaryGeometry b0 = boundary_geometry(gs_->side(0), gs_->glue_face(0), y);
        const BoundaryGeometry b1 = boundary_geometry(gs_->side(1), gs_->glue_face(1), y);
        Mat jump{};
        for (int a = 0; a < n - 1; ++a)
            for (int b = a; b < n - 1; ++b) {
                const int k = sym_index(n, a, b);
                const double l_ab = b0.sff.bil(a, b) + b1.sff.bil(a, b);
                const double v = c0[static_cast<std::size_t>(k)].d1[n - 1] +
                                 c1[static_cast<std::size_t>(k)].d1[n - 1] +
                                 2.0 * prof_.F_prime0() * l_ab;
                jump[a][b] = jump[b][a] = v;
            }
        return jump;
    }

  private:
    void apply_deformation(const Point& glued, double t, Mat& g) const {
        const int n = dim();
        const double f = prof_.F(t);
        const double fc = prof_.Fcal(t);
        if (f == 0.0 && fc == 0.0) return;
        const Mat L = transport_.eval(glued, t);
        const double scale = 1.0 - 2.0 * prof_.C * fc;
        for (int a = 0; a < n - 1; ++a)
            for (int b = 0; b < n - 1; ++b) g[a][b] = scale * g[a][b] + 2.0 * f * L[a][b];
    }

    void validate_pd() const {
        const int n = dim();
        // sample the deformation zone; G_delta not positive definite means
        // delta is too large for this interface geometry
        const int sres = 33;
        gs_->for_y_grid(9, [&](Point y) {
            for (int js = 0; js <= sres; ++js) {
                Point p = y;
                p[n - 1] = prof_.delta * js / sres;
                const Mat g = value(p);
                if (sym_eigen(g, n).values[0] <= 1e-10)
                    throw DegenerateMetricError(
                        "deformed metric not positive definite (delta too large)", p);
            }
        });
    }

    const CollarGluedSpace* gs_;
    SmoothingProfile prof_;
    TransportTable transport_;
};

inline DeformedGluedMetric deform(const CollarGluedSpace& gs, const SmoothingProfile& prof) {
    return DeformedGluedMetric(gs, prof);
}

// sup over the interface grid of the tangential-block C^1 jump
inline double c1_matching_check(const DeformedGluedMetric& gd, int y_res = 33) {
    double sup = 0.0;
    const int n = gd.dim();
    gd.glued().for_y_grid(y_res, [&](Point y) {
        const Mat j = gd.c1_jump(y);
        for (int a = 0; a < n - 1; ++a)
            for (int b = 0; b < n - 1; ++b) sup = std::max(sup, std::abs(j[a][b]));
    });
    return sup;
}

// ---------------------------------------------------------------------------
// Mollification kernel: rho(z) ~ exp(-1/(1-|z|^2)) on the unit ball of R^n,
// sampled on a tensor Gauss-Legendre rule and normalized against the same
// rule, so constants mollify to themselves exactly.
// ---------------------------------------------------------------------------

class Mollifier {
  public:
    explicit Mollifier(int n, int nodes_per_axis = 32) : n_(n) {
        const GaussLegendre& gl = gauss_legendre(nodes_per_axis);
        std::array<int, kMaxDim> idx{};
        for (;;) {
            double w = 1.0;
            std::array<double, kMaxDim> z{};
            for (int i = 0; i < n; ++i) {
                z[i] = gl.nodes[static_cast<std::size_t>(idx[i])];
                w *= gl.weights[static_cast<std::size_t>(idx[i])];
            }
            double r2 = 0.0;
            for (int i = 0; i < n; ++i) r2 += z[i] * z[i];
            if (r2 < 1.0) {
                Node node;
                node.z = z;
                const double q = 1.0 - r2;
                node.rho = w * std::exp(-1.0 / q);
                for (int i = 0; i < n; ++i) {
                    const double du_i = -2.0 * z[i] / (q * q);
                    node.drho[i] = node.rho * du_i;
                    for (int j = 0; j <= i; ++j) {
                        const double du_j = -2.0 * z[j] / (q * q);
                        const double d2u =
                            -2.0 * (i == j ? 1.0 : 0.0) / (q * q) - 8.0 * z[i] * z[j] / (q * q * q);
                        node.d2rho[i][j] = node.d2rho[j][i] = node.rho * (du_i * du_j + d2u);
                    }
                }
                nodes_.push_back(node);
            }
            int c = 0;
            while (c < n && ++idx[c] == nodes_per_axis) idx[c++] = 0;
            if (c == n) break;
        }
        KahanSum mass;
        for (const Node& nd : nodes_) mass.add(nd.rho);
        const double inv = 1.0 / mass.value();
        for (Node& nd : nodes_) {
            nd.rho *= inv;
            for (int i = 0; i < n; ++i) {
                nd.drho[i] *= inv;
                for (int j = 0; j < n; ++j) nd.d2rho[i][j] *= inv;
            }
        }
        correct_moments();
    }

    struct Node {
        std::array<double, kMaxDim> z{};
        double rho = 0.0;
        std::array<double, kMaxDim> drho{};
        Mat d2rho{};
    };

    int dim() const { return n_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    // |z|-weighted kernel mass, used by tests against a quadrature oracle
    double abs_first_moment_1d() const {
        KahanSum s;
        for (const Node& nd : nodes_) s.add(std::abs(nd.z[0]) * nd.rho);
        return s.value();
    }

  private:
    // The bump kernel's derivatives are numerically hostile near |z| = 1 and
    // the tensor rule leaves ~1e-3 defects in the low moments.  Project those
    // defects out of the derivative kernels (corrections live in the span of
    // rho * polynomial, so parity-protected moments stay exact), after which
    // convolved first/second derivatives are exact on quadratic data.
    void correct_moments() {
        const int n = n_;
        // first-derivative kernels: want sum K_i z_j = -delta_ij
        double mu2[kMaxDim][kMaxDim] = {};  // sum w rho z_j z_k
        for (const Node& nd : nodes_)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) mu2[j][k] += nd.rho * nd.z[j] * nd.z[k];
        for (int i = 0; i < n; ++i) {
            double defect[kMaxDim] = {};
            for (const Node& nd : nodes_)
                for (int j = 0; j < n; ++j) defect[j] += nd.drho[i] * nd.z[j];
            defect[i] += 1.0;
            // K_i -= sum_j c_j rho z_j with mu2 c = defect
            Mat m{};
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) m[a][b] = mu2[a][b];
            const Mat minv = mat_inverse(m, n);
            double c[kMaxDim] = {};
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) c[a] += minv[a][b] * defect[b];
            for (Node& nd : nodes_) {
                double corr = 0.0;
                for (int j = 0; j < n; ++j) corr += c[j] * nd.z[j];
                nd.drho[i] -= corr * nd.rho;
            }
        }
        // second-derivative kernels: want sum K_ij z_k z_l = d_ik d_jl + d_il d_jk
        const int np = n * (n + 1) / 2;
        std::vector<double> q(static_cast<std::size_t>(np * np), 0.0);  // quartic rho moments
        auto pair_at = [&](int idx, int& a, int& b) {
            int c2 = 0;
            for (a = 0; a < n; ++a)
                for (b = a; b < n; ++b)
                    if (c2++ == idx) return;
        };
        for (int p = 0; p < np; ++p)
            for (int r = 0; r < np; ++r) {
                int a, b, c2, d2;
                pair_at(p, a, b);
                pair_at(r, c2, d2);
                double s = 0.0;
                for (const Node& nd : nodes_) s += nd.rho * nd.z[a] * nd.z[b] * nd.z[c2] * nd.z[d2];
                q[static_cast<std::size_t>(p * np + r)] = s;
            }
        // tiny dense solve (np <= 10)
        auto solve = [&](std::vector<double> m, std::vector<double> rhs) {
            const int sz = np;
            for (int col = 0; col < sz; ++col) {
                int piv = col;
                for (int row = col + 1; row < sz; ++row)
                    if (std::abs(m[static_cast<std::size_t>(row * sz + col)]) >
                        std::abs(m[static_cast<std::size_t>(piv * sz + col)]))
                        piv = row;
                for (int k = 0; k < sz; ++k)
                    std::swap(m[static_cast<std::size_t>(col * sz + k)],
                              m[static_cast<std::size_t>(piv * sz + k)]);
                std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
                const double d = m[static_cast<std::size_t>(col * sz + col)];
                for (int row = col + 1; row < sz; ++row) {
                    const double f = m[static_cast<std::size_t>(row * sz + col)] / d;
                    for (int k = col; k < sz; ++k)
                        m[static_cast<std::size_t>(row * sz + k)] -=
                            f * m[static_cast<std::size_t>(col * sz + k)];
                    rhs[static_cast<std::size_t>(row)] -= f * rhs[static_cast<std::size_t>(col)];
                }
            }
            std::vector<double> x(static_cast<std::size_t>(sz), 0.0);
            for (int row = sz - 1; row >= 0; --row) {
                double s = rhs[static_cast<std::size_t>(row)];
                for (int k = row + 1; k < sz; ++k)
                    s -= m[static_cast<std::size_t>(row * sz + k)] * x[static_cast<std::size_t>(k)];
                x[static_cast<std::size_t>(row)] = s / m[static_cast<std::size_t>(row * sz + row)];
            }
            return x;
        };
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                std::vector<double> defect(static_cast<std::size_t>(np), 0.0);
                for (int p = 0; p < np; ++p) {
                    int k, l;
                    pair_at(p, k, l);
                    double s = 0.0;
                    for (const Node& nd : nodes_) s += nd.d2rho[i][j] * nd.z[k] * nd.z[l];
                    const double target =
                        (i == k && j == l ? 1.0 : 0.0) + (i == l && j == k ? 1.0 : 0.0);
                    defect[static_cast<std::size_t>(p)] = s - target;
                }
                const std::vector<double> c = solve(q, defect);
                for (Node& nd : nodes_) {
                    double corr = 0.0;
                    for (int p = 0; p < np; ++p) {
                        int k, l;
                        pair_at(p, k, l);
                        corr += c[static_cast<std::size_t>(p)] * nd.z[k] * nd.z[l];
                    }
                    nd.d2rho[i][j] -= corr * nd.rho;
                    if (i != j) nd.d2rho[j][i] = nd.d2rho[i][j];
                }
            }
    }

    int n_;
    std::vector<Node> nodes_;
};

inline const Mollifier& shared_mollifier(int n) {
    static const Mollifier m1(1), m2(2), m3(3);
    switch (n) {
        case 1: return m1;
        case 2: return m2;
        case 3: return m3;
        default: throw ValidationError("mollification supported for 1..3 dimensions");
    }
}

// ---------------------------------------------------------------------------
// The smoothed metric g^delta: convolution of g_(delta) inside the collar
// band |t| <= delta + h, the glued metric exactly outside (kernel support).
// Jets come from kernel derivatives; the value at the center is subtracted
// before hitting the 1/h, 1/h^2 scalings to keep quadrature roundoff down.
// ---------------------------------------------------------------------------

class SmoothedMetric : public MetricEval {
  public:
    explicit SmoothedMetric(const DeformedGluedMetric& base)
        : base_(&base), h_(base.profile().h), moll_(&shared_mollifier(base.dim())) {
        if (h_ >= 0.5 * std::pow(base.profile().delta, 4))
            throw ValidationError("mollification width must satisfy h < delta^4 / 2");
        if (h_ >= std::min(base.glued().depth(0), base.glued().depth(1)) / 4)
            throw ValidationError("mollification width too large for the collar depth");
    }

    int dim() const override { return base_->dim(); }
    double width() const { return h_; }
    double band() const { return base_->profile().delta + h_; }

    void components(const Point& x, int order, Taylor* out) const override {
        const int n = dim();
        const double t = x[n - 1];
        if (std::abs(t) > band()) {
            base_->glued().glued_metric_jets(x, order, out);
            return;
        }
        const int nsym = sym_count(n);
        // center values for the roundoff-control subtraction
        const Mat center = base_->value(x);
        std::array<KahanSum, 10> s0;
        std::array<std::array<KahanSum, kMaxDim>, 10> s1;
        std::array<std::array<std::array<KahanSum, kMaxDim>, kMaxDim>, 10> s2;
        for (const Mollifier::Node& nd : moll_->nodes()) {
            Point p = x;
            for (int i = 0; i < n; ++i) p[i] -= h_ * nd.z[i];
            const Mat g = base_->value(p);
            for (int a = 0; a < n - 1; ++a)
                for (int b = a; b < n - 1; ++b) {
                    const int k = sym_index(n, a, b);
                    const double v = g[a][b];
                    const double dv = v - center[a][b];
                    s0[static_cast<std::size_t>(k)].add(nd.rho * v);
                    if (order >= 1)
                        for (int i = 0; i < n; ++i)
                            s1[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].add(
                                nd.drho[i] * dv);
                    if (order >= 2)
                        for (int i = 0; i < n; ++i)
                            for (int j = i; j < n; ++j)
                                s2[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                                  [static_cast<std::size_t>(j)]
                                      .add(nd.d2rho[i][j] * dv);
                }
        }
        for (int k = 0; k < nsym; ++k) out[k] = Taylor::constant(0.0, n, order);
        // normal row of the collar block is exactly constant
        out[static_cast<std::size_t>(sym_index(n, n - 1, n - 1))].v = 1.0;
        for (int a = 0; a < n - 1; ++a)
            for (int b = a; b < n - 1; ++b) {
                const auto k = static_cast<std::size_t>(sym_index(n, a, b));
                Taylor& tk = out[k];
                tk.v = s0[k].value();
                if (order >= 1)
                    for (int i = 0; i < n; ++i) tk.d1[i] = s1[k][static_cast<std::size_t>(i)].value() / h_;
                if (order >= 2)
                    for (int i = 0; i < n; ++i)
                        for (int j = i; j < n; ++j)
                            tk.d2[i][j] = tk.d2[j][i] =
                                s2[k][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                                    .value() /
                                (h_ * h_);
            }
    }

    Mat value(const Point& x) const {
        std::array<Taylor, 10> comp;
        components(x, 0, comp.data());
        const int n = dim();
        Mat g{};
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                g[i][j] = g[j][i] = comp[static_cast<std::size_t>(sym_index(n, i, j))].v;
        return g;
    }

  private:
    const DeformedGluedMetric* base_;
    double h_;
    const Mollifier* moll_;
};

inline SmoothedMetric mollify(const DeformedGluedMetric& gd) { return SmoothedMetric(gd); }

// ---------------------------------------------------------------------------
// Glued weight, mollified in t with the 1d kernel when its normal derivative
// jumps across the interface.  Tangential derivatives differentiate the side
// expressions (smooth); t-derivatives go through the kernel.
// ---------------------------------------------------------------------------

class SmoothedWeight : public ScalarEval {
  public:
    SmoothedWeight(const CollarGluedSpace& gs, double h)
        : gs_(&gs), h_(h), moll_(&shared_mollifier(1)) {
        // detect a C^1 break of the glued weight at t = 0
        double max_jump = 0.0;
        gs.for_y_grid(9, [&](Point y) {
            Point p = y;
            p[gs.dim() - 1] = 0.0;
            const Taylor w0 = taylor_eval(gs.side(0).weight, p, 1);
            const Taylor w1 = taylor_eval(gs.side(1).weight, p, 1);
            // glued d/dt at 0+: +d_s Phi_0; at 0-: -d_s Phi_1
            max_jump = std::max(max_jump,
                                std::abs(w0.d1[gs.dim() - 1] + w1.d1[gs.dim() - 1]));
        });
        active_ = max_jump > 1e-9;
    }

    bool active() const { return active_; }
    int dim() const override { return gs_->dim(); }

    Taylor eval(const Point& x, int order) const override {
        const int n = gs_->dim();
        const double t = x[n - 1];
        if (!active_ || std::abs(t) > h_) return gs_->glued_weight_jet(x, order);
        Taylor out = Taylor::constant(0.0, n, order);
        const Taylor center = gs_->glued_weight_jet(x, order);
        KahanSum v;
        std::array<KahanSum, kMaxDim> d1;
        std::array<std::array<KahanSum, kMaxDim>, kMaxDim> d2;
        KahanSum dt, dtt;
        std::array<KahanSum, kMaxDim> dyt;
        for (const Mollifier::Node& nd : moll_->nodes()) {
            Point p = x;
            p[n - 1] -= h_ * nd.z[0];
            const Taylor w = gs_->glued_weight_jet(p, order);
            v.add(nd.rho * w.v);
            if (order >= 1) {
                for (int i = 0; i < n - 1; ++i) d1[static_cast<std::size_t>(i)].add(nd.rho * w.d1[i]);
                dt.add(nd.drho[0] * (w.v - center.v));
            }
            if (order >= 2) {
                for (int i = 0; i < n - 1; ++i)
                    for (int j = i; j < n - 1; ++j)
                        d2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].add(
                            nd.rho * w.d2[i][j]);
                for (int i = 0; i < n - 1; ++i)
                    dyt[static_cast<std::size_t>(i)].add(nd.drho[0] * (w.d1[i] - center.d1[i]));
                dtt.add(nd.d2rho[0][0] * (w.v - center.v));
            }
        }
        out.v = v.value();
        if (order >= 1) {
            for (int i = 0; i < n - 1; ++i) out.d1[i] = d1[static_cast<std::size_t>(i)].value();
            out.d1[n - 1] = dt.value() / h_;
        }
        if (order >= 2) {
            for (int i = 0; i < n - 1; ++i)
                for (int j = i; j < n - 1; ++j)
                    out.d2[i][j] = out.d2[j][i] =
                        d2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value();
            for (int i = 0; i < n - 1; ++i)
                out.d2[i][n - 1] = out.d2[n - 1][i] = dyt[static_cast<std::size_t>(i)].value() / h_;
            out.d2[n - 1][n - 1] = dtt.value() / (h_ * h_);
        }
        return out;
    }

  private:
    const CollarGluedSpace* gs_;
    double h_;
    const Mollifier* moll_;
    bool active_ = false;
};

// ---------------------------------------------------------------------------
// The smoothing sweep: for each delta, deform + mollify, then record the
// uniform distance to the glued metric and the minimal Bakry-Emery eigenvalue
// over a collar grid that refines near the interface band.
// ---------------------------------------------------------------------------

struct SweepRow {
    double delta = 0.0;
    double sup_dist = 0.0;
    double min_eig = 0.0;
    double epsilon = 0.0;
    Point argmin{};
    std::string error;  // set when this row failed
};

struct SmoothingSweepOptions {
    int y_res = 9;
    int t_res = 21;       // coarse grid over the whole collar
    int t_fine_res = 41;  // fine grid over the interface band
    double C = 1.0;
    double h = -1.0;      // default delta^5
    int compat_y_res = 17;
};

inline std::vector<SweepRow> smoothing_sweep(const CollarGluedSpace& gs, double N, double K,
                                             const std::vector<double>& deltas,
                                             const SmoothingSweepOptions& opt = {}) {
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (deltas[i] >= deltas[i - 1])
            throw ValidationError("delta list must be strictly decreasing");
    const CompatibilityReport compat = compatibility_report(gs, opt.compat_y_res);
    if (!compat.pass)
        throw ValidationError("smoothing requires the compatibility conditions; report margins " +
                              format_double(compat.min_pi_eig) + ", " +
                              format_double(compat.min_margin));
    const int n = gs.dim();
    const bool const_weight =
        gs.side(0).weight.root()->kind == NodeKind::Num && gs.side(1).weight.root()->kind == NodeKind::Num;

    std::vector<SweepRow> rows;
    for (double delta : deltas) {
        SweepRow row;
        row.delta = delta;
        try {
            SmoothingProfile prof = SmoothingProfile::make(delta, opt.C, opt.h);
            const DeformedGluedMetric gd = deform(gs, prof);
            const SmoothedMetric gsm = mollify(gd);
            const SmoothedWeight weight(gs, gsm.width());

            // t samples: coarse over the collar (one-step margin at the free
            // faces) plus a fine band around the interface
            std::vector<double> ts;
            const double lo = -gs.depth(1), hi = gs.depth(0);
            const double step = (hi - lo) / (opt.t_res + 1);
            for (int i = 1; i <= opt.t_res; ++i) ts.push_back(lo + i * step);
            const double band = gsm.band() + gsm.width();
            for (int i = 0; i <= opt.t_fine_res; ++i)
                ts.push_back(-band + 2.0 * band * i / opt.t_fine_res);

            row.min_eig = std::numeric_limits<double>::infinity();
            gs.for_y_grid(opt.y_res, [&](Point y) {
                for (double t : ts) {
                    Point p = y;
                    p[n - 1] = t;
                    const MetricData d = metric_data(gsm, p, 2);
                    const Mat ref = gs.glued_metric_value(p);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            row.sup_dist = std::max(row.sup_dist, std::abs(d.g[i][j] - ref[i][j]));
                    const CurvatureResult curv = curvature_from(d);
                    double lam;
                    if (const_weight) {
                        lam = min_generalized_eig(curv.ricci.as_mat(), d.g, n);
                    } else {
                        const Taylor phi = weight.eval(p, 2);
                        const BakryEmeryResult be = bakry_emery_from(d, curv, phi, N);
                        lam = be.branch == BakryEmeryBranch::Regular
                                  ? min_generalized_eig(be.tensor.as_mat(), d.g, n)
                                  : -std::numeric_limits<double>::infinity();
                    }
                    if (lam < row.min_eig) {
                        row.min_eig = lam;
                        row.argmin = p;
                    }
                }
            });
            row.epsilon = K - row.min_eig;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gluecd
