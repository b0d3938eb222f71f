#pragma once

// Two weighted manifolds in collar (Fermi) presentation glued along the face
// x^n = 0.  Glued coordinates are (y, t) with t = +x^n on side 0 and
// t = -x^n on side 1; the interface Y sits at t = 0.

#include "gluecd/weighted.hpp"

namespace gluecd {

struct AssembleOptions {
    int y_res = 17;
    int s_res = 9;
    double tol = 1e-9;
};

class CollarGluedSpace {
  public:
    CollarGluedSpace(WeightedManifold s0, WeightedManifold s1, const AssembleOptions& opt)
        : sides_{std::move(s0), std::move(s1)} {
        n_ = sides_[0].dim();
        if (sides_[1].dim() != n_) throw ValidationError("glued sides must share the dimension");
        for (int s = 0; s < 2; ++s) {
            sides_[s].validate();
            depth_[s] = sides_[s].collar_depth();
        }
        validate_interface(opt);
    }

    int dim() const { return n_; }
    double depth(int side) const { return depth_[side]; }
    const WeightedManifold& side(int s) const { return sides_[s]; }
    Face glue_face(int s) const { return *sides_[s].glue_face(); }

    int side_of(double t) const { return t >= 0.0 ? 0 : 1; }

    Point side_point(const Point& glued) const {
        Point p = glued;
        p[n_ - 1] = std::abs(glued[n_ - 1]);
        return p;
    }

    bool inside(const Point& glued, double margin = 0.0) const {
        const double t = glued[n_ - 1];
        if (t < -depth_[1] - margin || t > depth_[0] + margin) return false;
        const MetricChart& c = sides_[side_of(t)].chart;
        for (int i = 0; i < n_ - 1; ++i)
            if (glued[i] < c.domain()[i].lo - margin || glued[i] > c.domain()[i].hi + margin)
                return false;
        return true;
    }

    // Component jets of the glued metric in glued coordinates.  Side 1 jets
    // are pulled back through t = -x^n (diagonal sign flip on the last axis).
    void glued_metric_jets(const Point& glued, int order, Taylor* out) const {
        const int s = side_of(glued[n_ - 1]);
        sides_[s].chart.components(side_point(glued), order, out);
        if (s == 1) flip_metric_jets(out, order);
    }

    Taylor glued_weight_jet(const Point& glued, int order) const {
        const int s = side_of(glued[n_ - 1]);
        Taylor t = taylor_eval(sides_[s].weight, side_point(glued), order);
        if (s == 1) flip_scalar_jet(t, order);
        return t;
    }

    Mat glued_metric_value(const Point& glued) const {
        std::array<Taylor, 10> comp;
        glued_metric_jets(glued, 0, comp.data());
        Mat g{};
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j)
                g[i][j] = g[j][i] = comp[static_cast<std::size_t>(sym_index(n_, i, j))].v;
        return g;
    }

  private:
    void flip_metric_jets(Taylor* out, int order) const {
        const int t_axis = n_ - 1;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                Taylor& c = out[static_cast<std::size_t>(sym_index(n_, i, j))];
                const double sij = (i == t_axis ? -1.0 : 1.0) * (j == t_axis ? -1.0 : 1.0);
                c.v *= sij;
                if (order >= 1)
                    for (int k = 0; k < n_; ++k) c.d1[k] *= sij * (k == t_axis ? -1.0 : 1.0);
                if (order >= 2)
                    for (int k = 0; k < n_; ++k)
                        for (int l = 0; l < n_; ++l)
                            c.d2[k][l] *= sij * (k == t_axis ? -1.0 : 1.0) * (l == t_axis ? -1.0 : 1.0);
            }
    }

    void flip_scalar_jet(Taylor& c, int order) const {
        const int t_axis = n_ - 1;
        if (order >= 1) c.d1[t_axis] = -c.d1[t_axis];
        if (order >= 2)
            for (int k = 0; k < n_; ++k) {
                if (k != t_axis) {
                    c.d2[k][t_axis] = -c.d2[k][t_axis];
                    c.d2[t_axis][k] = -c.d2[t_axis][k];
                }
            }
    }

    void validate_interface(const AssembleOptions& opt) {
        for (int s = 0; s < 2; ++s)
            for (int i = 0; i < n_ - 1; ++i) {
                const Interval a = sides_[0].chart.domain()[i];
                const Interval b = sides_[1].chart.domain()[i];
                if (a.lo != b.lo || a.hi != b.hi)
                    throw ValidationError("interface coordinate domains differ between sides");
            }
        // collar normalization g_nn = 1, g_na = 0 on a validation grid of each side
        for (int s = 0; s < 2; ++s) {
            for_y_grid(opt.y_res, [&](Point y) {
                for (int js = 0; js <= opt.s_res; ++js) {
                    Point p = y;
                    p[n_ - 1] = depth_[s] * js / opt.s_res;
                    const Mat g = sides_[s].chart.value(p);
                    if (std::abs(g[n_ - 1][n_ - 1] - 1.0) > opt.tol)
                        throw ValidationError("collar normalization violated: g_nn != 1 on side " +
                                              std::to_string(s));
                    for (int a = 0; a < n_ - 1; ++a)
                        if (std::abs(g[a][n_ - 1]) > opt.tol)
                            throw ValidationError(
                                "collar normalization violated: g_na != 0 on side " +
                                std::to_string(s));
                }
            });
        }
        // induced metric and weight agree on Y
        double metric_gap = 0.0, weight_gap = 0.0;
        for_y_grid(opt.y_res, [&](Point y) {
            y[n_ - 1] = 0.0;
            const Mat g0 = sides_[0].chart.value(y);
            const Mat g1 = sides_[1].chart.value(y);
            for (int a = 0; a < n_ - 1; ++a)
                for (int b = 0; b < n_ - 1; ++b)
                    metric_gap = std::max(metric_gap, std::abs(g0[a][b] - g1[a][b]));
            const double w0 = sides_[0].weight.value(y);
            const double w1 = sides_[1].weight.value(y);
            weight_gap = std::max(weight_gap, std::abs(w0 - w1));
            if (w0 <= 0.0 || w1 <= 0.0)
                throw ValidationError("weight must be positive on the interface");
        });
        if (metric_gap > opt.tol)
            throw ValidationError("interface metrics mismatch: sup gap " +
                                  format_double(metric_gap));
        if (weight_gap > opt.tol)
            throw ValidationError("interface weights mismatch: sup gap " +
                                  format_double(weight_gap));
    }

  public:
    // Uniform inclusive grid over the interface coordinates.
    void for_y_grid(int res, const std::function<void(Point)>& fn) const {
        std::array<int, kMaxDim> idx{};
        const int ny = n_ - 1;
        if (ny == 0) {
            fn(Point{});
            return;
        }
        for (;;) {
            Point p{};
            for (int i = 0; i < ny; ++i) {
                const Interval iv = sides_[0].chart.domain()[i];
                p[i] = res == 1 ? 0.5 * (iv.lo + iv.hi)
                                : iv.lo + (iv.hi - iv.lo) * idx[i] / (res - 1);
            }
            fn(p);
            int c = 0;
            while (c < ny && ++idx[c] == res) idx[c++] = 0;
            if (c == ny) break;
        }
    }

  private:
    std::array<WeightedManifold, 2> sides_;
    double depth_[2] = {0.0, 0.0};
    int n_ = 0;
};

inline CollarGluedSpace assemble(WeightedManifold side0, WeightedManifold side1,
                                 const AssembleOptions& opt = {}) {
    return CollarGluedSpace(std::move(side0), std::move(side1), opt);
}

// MetricEval view of the glued metric; correct away from t = 0 (the glued
// metric is only C^0 across the interface).
class GluedMetricEval : public MetricEval {
  public:
    explicit GluedMetricEval(const CollarGluedSpace& gs) : gs_(gs) {}
    int dim() const override { return gs_.dim(); }
    void components(const Point& x, int order, Taylor* out) const override {
        gs_.glued_metric_jets(x, order, out);
    }

  private:
    const CollarGluedSpace& gs_;
};

// ---------------------------------------------------------------------------
// Compatibility conditions on the interface: Pi_0 + Pi_1 >= 0 and
// tr Pi - <nu_0, grad log Phi_0> - <nu_1, grad log Phi_1> >= 0.
// ---------------------------------------------------------------------------

struct CompatibilityRow {
    Point y{};
    double pi_min_eig = 0.0;   // lambda_min(Pi_0 + Pi_1) w.r.t. g_Y
    double cond2_margin = 0.0; // tr Pi - sum <nu_i, grad log Phi_i>
    double h_sum = 0.0;        // H^{Phi_0} + H^{Phi_1}
};

struct CompatibilityReport {
    std::vector<CompatibilityRow> rows;
    double min_pi_eig = std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();
    double min_h_sum = std::numeric_limits<double>::infinity();
    double tol = -1e-8;
    bool pass = false;
};

inline CompatibilityReport compatibility_report(const CollarGluedSpace& gs, int y_res = 33) {
    CompatibilityReport rep;
    const int nf = gs.dim() - 1;
    gs.for_y_grid(y_res, [&](Point y) {
        const BoundaryGeometry b0 = boundary_geometry(gs.side(0), gs.glue_face(0), y);
        const BoundaryGeometry b1 = boundary_geometry(gs.side(1), gs.glue_face(1), y);
        CompatibilityRow row;
        row.y = y;
        if (nf > 0) {
            Mat pi{};
            for (int a = 0; a < nf; ++a)
                for (int b = 0; b < nf; ++b) pi[a][b] = b0.sff.bil(a, b) + b1.sff.bil(a, b);
            row.pi_min_eig = min_generalized_eig(pi, b0.face_metric, nf);
        }
        const double dlog0 = b0.tr_sff - b0.h_phi;
        const double dlog1 = b1.tr_sff - b1.h_phi;
        row.cond2_margin = b0.tr_sff + b1.tr_sff - dlog0 - dlog1;
        row.h_sum = b0.h_phi + b1.h_phi;
        rep.rows.push_back(row);
        rep.min_pi_eig = std::min(rep.min_pi_eig, row.pi_min_eig);
        rep.min_margin = std::min(rep.min_margin, row.cond2_margin);
        rep.min_h_sum = std::min(rep.min_h_sum, row.h_sum);
    });
    rep.pass = rep.min_pi_eig >= rep.tol && rep.min_margin >= rep.tol;
    return rep;
}

}  // namespace gluecd
