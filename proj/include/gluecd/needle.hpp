#pragma once

// 1D content: (K,N)-concavity of densities on intervals, 1D gluing, needle
// densities of glued spaces along the signed distance to the interface
// (matrix Jacobi equation), derivative-jump tests, the log-derivative /
// weighted-mean-curvature identity, and the tilted-field closed formula.
//
// Sign map (anchored by the doubled flat disk, h(t) = 1 - |t|):
//   d/dt+ log h(0) = -H^{Phi_0},   d/dt- log h(0) = +H^{Phi_1}.

#include "gluecd/distortion.hpp"
#include "gluecd/geodesic.hpp"

namespace gluecd {

struct MmInterval {
    double a = 0.0, b = 1.0;
    ScalarField phi;
    double K = 0.0;
    double N = 2.0;

    void validate() const {
        if (!(a < b)) throw ValidationError("interval must satisfy a < b");
        if (N <= 1.0) throw ValidationError("interval mm space needs N > 1");
        double mass = 0.0, minv = 0.0;
        for (int i = 0; i <= 64; ++i) {
            const double x = a + (b - a) * i / 64.0;
            const double v = phi.value(make_point(x));
            if (v < 0.0) throw ValidationError("density must be nonnegative");
            mass += v;
            minv = std::max(minv, v);
        }
        if (mass <= 0.0) throw ValidationError("density must have positive mass");
    }
};

// ---------------------------------------------------------------------------
// (K,N)-concavity along geodesics of [a,b]:
//   u(x_t) >= sigma^{(1-t)}_kappa(|x1-x0|) u(x0) + sigma^{(t)}_kappa(...) u(x1)
// checked on a deterministic Halton sample of triples (x0, x1, t).
// ---------------------------------------------------------------------------

struct KnReport {
    double max_violation = -std::numeric_limits<double>::infinity();
    std::array<double, 3> witness{};  // x0, x1, t
    bool pass = false;
};

inline KnReport kn_concavity_core(const std::function<double(double)>& u, double a, double b,
                                  double kappa, int samples, std::uint64_t seed = 0,
                                  double tol = 1e-9) {
    KnReport rep;
    for (int s = 0; s < samples; ++s) {
        const std::size_t idx = static_cast<std::size_t>(s) + seed;
        const double x0 = a + (b - a) * halton(idx, 2);
        const double x1 = a + (b - a) * halton(idx, 3);
        const double t = halton(idx, 5);
        const double theta = std::abs(x1 - x0);
        const double xt = x0 + t * (x1 - x0);
        const double s0 = sigma_kappa(kappa, 1.0 - t, theta);
        const double s1 = sigma_kappa(kappa, t, theta);
        const double u0 = u(x0), u1 = u(x1);
        double rhs;
        if (std::isinf(s0) || std::isinf(s1)) {
            rhs = (u0 > 0.0 || u1 > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
        } else {
            rhs = s0 * u0 + s1 * u1;
        }
        const double viol = rhs - u(xt);
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.witness = {x0, x1, t};
        }
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

inline KnReport kn_concavity_check(const MmInterval& mm, int samples = 4096,
                                   std::uint64_t seed = 0) {
    mm.validate();
    const double kappa = mm.K / (mm.N - 1.0);
    const double e = 1.0 / (mm.N - 1.0);
    auto u = [&](double x) {
        const double v = mm.phi.value(make_point(x));
        if (v < 0.0) throw EvalError("density must be nonnegative");
        return std::pow(v, e);
    };
    return kn_concavity_core(u, mm.a, mm.b, kappa, samples, seed);
}

// ---------------------------------------------------------------------------
// 1D gluing of two weighted intervals at a shared endpoint: each side must be
// (K,N)-concave and the concatenated u = Phi^{1/(N-1)} must satisfy the kink
// condition d^-u >= d^+u at the joint.
// ---------------------------------------------------------------------------

struct Glue1dReport {
    KnReport left;
    KnReport right;
    double d_minus = 0.0;  // left derivative of u at the joint
    double d_plus = 0.0;   // right derivative
    bool kink_ok = false;
    bool pass = false;
};

inline Glue1dReport glue_1d(const ScalarField& phi0, double a, double b, const ScalarField& phi1,
                            double b2, double c, double K, double N, int samples = 4096,
                            std::uint64_t seed = 0) {
    if (b != b2) throw ValidationError("the two intervals must share the gluing point");
    const double v0 = phi0.value(make_point(b));
    const double v1 = phi1.value(make_point(b));
    if (std::abs(v0 - v1) > 1e-9 || v0 <= 0.0)
        throw ValidationError("densities must agree and be positive at the gluing point");
    const double e = 1.0 / (N - 1.0);
    const double kappa = K / (N - 1.0);
    auto u0 = [&](double x) { return std::pow(phi0.value(make_point(x)), e); };
    auto u1 = [&](double x) { return std::pow(phi1.value(make_point(x)), e); };
    Glue1dReport rep;
    rep.left = kn_concavity_core(u0, a, b, kappa, samples, seed);
    rep.right = kn_concavity_core(u1, b, c, kappa, samples, seed);
    const double len = c - a;
    rep.d_minus = one_sided_derivative([&](double s) { return u0(b + s); }, u0(b), 1e-3 * len, -1);
    rep.d_plus = one_sided_derivative([&](double s) { return u1(b + s); }, u1(b), 1e-3 * len, +1);
    rep.kink_ok = rep.d_minus >= rep.d_plus - 1e-9;
    rep.pass = rep.left.pass && rep.right.pass && rep.kink_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// Needle densities.
// ---------------------------------------------------------------------------

struct NeedleDensity {
    enum class Provenance { Analytic, Disintegration, User };

    double t_min = -1.0, t_max = 1.0;  // t_min < 0 < t_max
    std::function<double(double)> h_plus;   // smooth evaluator for t >= 0
    std::function<double(double)> h_minus;  // smooth evaluator for t <= 0
    double d_plus0 = 0.0;   // one-sided derivatives of h at 0
    double d_minus0 = 0.0;
    Provenance provenance = Provenance::User;

    double eval(double t) const { return t >= 0.0 ? h_plus(t) : h_minus(t); }

    void validate() const {
        if (!(t_min < 0.0 && 0.0 < t_max)) throw ValidationError("needle range must contain 0");
        if (std::abs(h_plus(0.0) - h_minus(0.0)) > 1e-8)
            throw ValidationError("needle density discontinuous at 0");
        for (int i = 1; i < 64; ++i) {
            const double tp = t_max * i / 64.0, tm = t_min * i / 64.0;
            if (h_plus(tp) <= 0.0 || h_minus(tm) <= 0.0)
                throw ValidationError("needle density must be positive inside its interval");
        }
    }

    static NeedleDensity analytic(std::function<double(double)> f, double t_min, double t_max) {
        NeedleDensity nd;
        nd.t_min = t_min;
        nd.t_max = t_max;
        nd.h_plus = f;
        nd.h_minus = f;
        const double f0 = f(0.0);
        const double len = t_max - t_min;
        nd.d_plus0 = one_sided_derivative(f, f0, 1e-3 * len, +1);
        nd.d_minus0 = one_sided_derivative(f, f0, 1e-3 * len, -1);
        nd.provenance = Provenance::Analytic;
        return nd;
    }
};

namespace detail {

// Dense Jacobi-equation solution along one side's normal line: stores (J, J')
// at uniform steps for C^1 Hermite evaluation of det J.
struct JacobiLine {
    int nf = 0;  // n - 1
    double step = 0.0;
    std::vector<Mat> J, Jp;

    double det_at(double s) const {
        const double pos = s / step;
        const int k = std::min(static_cast<int>(pos), static_cast<int>(J.size()) - 2);
        const double u = pos - k;
        // cubic Hermite on each matrix entry
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
        const double h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u);
        const double h11 = u * u * (u - 1);
        Mat m{};
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b)
                m[a][b] = h00 * J[static_cast<std::size_t>(k)][a][b] +
                          h10 * step * Jp[static_cast<std::size_t>(k)][a][b] +
                          h01 * J[static_cast<std::size_t>(k) + 1][a][b] +
                          h11 * step * Jp[static_cast<std::size_t>(k) + 1][a][b];
        return nf == 0 ? 1.0 : mat_det(m, nf);
    }
};

// Orthonormal frame of the interface tangent space at y, by Gram-Schmidt over
// the coordinate directions (optionally seeded so the first vector points
// along a requested direction).  Frame vectors are coordinate components.
inline std::vector<std::array<double, kMaxDim>> face_frame(
    const Mat& g_face, int nf, const std::array<double, kMaxDim>* seed = nullptr) {
    std::vector<std::array<double, kMaxDim>> frame;
    auto inner = [&](const std::array<double, kMaxDim>& u, const std::array<double, kMaxDim>& v) {
        double s = 0.0;
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j) s += g_face[i][j] * u[i] * v[j];
        return s;
    };
    std::vector<std::array<double, kMaxDim>> candidates;
    if (seed) candidates.push_back(*seed);
    for (int k = 0; k < nf; ++k) {
        std::array<double, kMaxDim> e{};
        e[k] = 1.0;
        candidates.push_back(e);
    }
    for (auto v : candidates) {
        if (static_cast<int>(frame.size()) == nf) break;
        for (const auto& e : frame) {
            const double c = inner(v, e);
            for (int i = 0; i < nf; ++i) v[i] -= c * e[i];
        }
        const double norm = std::sqrt(inner(v, v));
        if (norm < 1e-10) continue;
        for (int i = 0; i < nf; ++i) v[i] /= norm;
        frame.push_back(v);
    }
    return frame;
}

// Solve J'' + R(., gamma')gamma' J = 0 along the normal line of one side,
// J(0) = I, J'(0) = -W (Weingarten of the side's inward normal).
inline JacobiLine solve_normal_jacobi(const WeightedManifold& side, const Point& y, double range,
                                      double base_step) {
    const int n = side.dim();
    const int nf = n - 1;
    const Face face = *side.glue_face();
    const BoundaryGeometry bg = boundary_geometry(side, face, y);

    const auto frame0 = face_frame(bg.face_metric, nf);
    // W in the orthonormal frame: W_ab = Pi(E_a, E_b)
    Mat W{};
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            double s = 0.0;
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j) s += bg.sff.bil(i, j) * frame0[static_cast<std::size_t>(a)][i] * frame0[static_cast<std::size_t>(b)][j];
            W[a][b] = s;
        }

    const int steps = std::max(16, static_cast<int>(std::ceil(range / base_step)));
    JacobiLine line;
    line.nf = nf;
    line.step = range / steps;
    line.J.reserve(static_cast<std::size_t>(steps) + 1);
    line.Jp.reserve(static_cast<std::size_t>(steps) + 1);

    // parallel frame along (y, s): E' = -Gamma(e_n) E; coordinate components
    std::vector<std::array<double, kMaxDim>> E(frame0);
    Mat J = identity_mat(nf);
    Mat Jp{};
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) Jp[a][b] = -W[a][b];
    line.J.push_back(J);
    line.Jp.push_back(Jp);

    struct Stage {
        std::vector<std::array<double, kMaxDim>> E;
        Mat J, Jp;
    };
    auto rhs = [&](double s, const Stage& st, Stage& d) {
        Point p = y;
        p[n - 1] = s;
        const MetricData md = metric_data(side.chart, p, 2);
        const Christoffels ch = christoffels_from(md);
        const CurvatureResult curv = curvature_from(md);
        d.E.assign(static_cast<std::size_t>(nf), {});
        for (int a = 0; a < nf; ++a)
            for (int k = 0; k < n; ++k) {
                double v = 0.0;
                for (int j = 0; j < n; ++j)
                    v += ch.gamma[k][n - 1][j] * st.E[static_cast<std::size_t>(a)][j];
                d.E[static_cast<std::size_t>(a)][k] = -v;
            }
        // R_ab = Riem(E_a, e_n, e_n, E_b)
        Mat R{};
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) {
                double v = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int l = 0; l < n; ++l)
                        v += curv.riemann.cur(i, n - 1, n - 1, l) *
                             st.E[static_cast<std::size_t>(a)][i] *
                             st.E[static_cast<std::size_t>(b)][l];
                R[a][b] = v;
            }
        d.J = st.Jp;
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) {
                double v = 0.0;
                for (int c = 0; c < nf; ++c) v += R[a][c] * st.J[c][b];
                d.Jp[a][b] = -v;
            }
    };
    auto advance = [&](const Stage& st, const Stage& d, double w) {
        Stage r = st;
        for (int a = 0; a < nf; ++a)
            for (int k = 0; k < n; ++k) r.E[static_cast<std::size_t>(a)][k] += w * d.E[static_cast<std::size_t>(a)][k];
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) {
                r.J[a][b] += w * d.J[a][b];
                r.Jp[a][b] += w * d.Jp[a][b];
            }
        return r;
    };

    Stage st{E, J, Jp};
    for (int k = 0; k < steps; ++k) {
        const double s = k * line.step;
        Stage k1, k2, k3, k4;
        rhs(s, st, k1);
        rhs(s + line.step / 2, advance(st, k1, line.step / 2), k2);
        rhs(s + line.step / 2, advance(st, k2, line.step / 2), k3);
        rhs(s + line.step, advance(st, k3, line.step), k4);
        Stage next = st;
        for (int a = 0; a < nf; ++a)
            for (int kk = 0; kk < n; ++kk)
                next.E[static_cast<std::size_t>(a)][kk] +=
                    line.step / 6.0 *
                    (k1.E[static_cast<std::size_t>(a)][kk] + 2 * k2.E[static_cast<std::size_t>(a)][kk] +
                     2 * k3.E[static_cast<std::size_t>(a)][kk] + k4.E[static_cast<std::size_t>(a)][kk]);
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) {
                next.J[a][b] += line.step / 6.0 *
                                (k1.J[a][b] + 2 * k2.J[a][b] + 2 * k3.J[a][b] + k4.J[a][b]);
                next.Jp[a][b] += line.step / 6.0 *
                                 (k1.Jp[a][b] + 2 * k2.Jp[a][b] + 2 * k3.Jp[a][b] + k4.Jp[a][b]);
            }
        st = next;
        line.J.push_back(st.J);
        line.Jp.push_back(st.Jp);
        const double det = nf == 0 ? 1.0 : mat_det(st.J, nf);
        if (det <= 1e-4)
            throw FocalPointError("focal point inside the needle range", (k + 1) * line.step);
    }
    return line;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Disintegration of the glued space along the signed distance to Y at an
// interface point: h(t) = det J(t) * Phi(gamma_y(t)) per side (the usual
// normalisation constant is skipped; every downstream check is scale
// invariant).
// ---------------------------------------------------------------------------

inline NeedleDensity disintegrate_signed_distance(const CollarGluedSpace& gs, const Point& y,
                                                  double t_min, double t_max) {
    if (!(t_min < 0.0 && 0.0 < t_max)) throw ValidationError("needle range must contain 0");
    if (t_max > gs.depth(0) || -t_min > gs.depth(1))
        throw ValidationError("needle range exceeds the collar depth");
    const double len = t_max - t_min;
    const double base_step = 1.25e-4 * len;

    auto line0 = std::make_shared<detail::JacobiLine>(
        detail::solve_normal_jacobi(gs.side(0), y, t_max, base_step));
    auto line1 = std::make_shared<detail::JacobiLine>(
        detail::solve_normal_jacobi(gs.side(1), y, -t_min, base_step));

    const ScalarField phi0 = gs.side(0).weight;
    const ScalarField phi1 = gs.side(1).weight;
    const int n = gs.dim();
    Point base = y;
    base[n - 1] = 0.0;

    NeedleDensity nd;
    nd.t_min = t_min;
    nd.t_max = t_max;
    nd.provenance = NeedleDensity::Provenance::Disintegration;
    nd.h_plus = [line0, phi0, base, n](double t) {
        Point p = base;
        p[n - 1] = t;
        return line0->det_at(t) * phi0.value(p);
    };
    nd.h_minus = [line1, phi1, base, n](double t) {
        Point p = base;
        p[n - 1] = -t;
        return line1->det_at(-t) * phi1.value(p);
    };
    nd.d_plus0 = one_sided_derivative(nd.h_plus, nd.h_plus(0.0), 1e-3 * len, +1);
    nd.d_minus0 = one_sided_derivative(nd.h_minus, nd.h_minus(0.0), 1e-3 * len, -1);
    return nd;
}

// ---------------------------------------------------------------------------
// Needle jump check: per-side (K,N)-concavity of h^{1/(N-1)} plus the
// derivative-kink condition at 0.
// ---------------------------------------------------------------------------

struct NeedleJumpReport {
    KnReport side_minus;
    KnReport side_plus;
    double d_minus = 0.0;  // left derivative of h^{1/(N-1)} at 0
    double d_plus = 0.0;
    bool kink_ok = false;
    bool pass = false;
};

inline NeedleJumpReport needle_jump_check(const NeedleDensity& nd, double K, double N,
                                          int samples = 2048) {
    if (N <= 1.0) throw ValidationError("needle jump check needs N > 1");
    const double e = 1.0 / (N - 1.0);
    const double kappa = K / (N - 1.0);
    auto u = [&](double t) { return std::pow(nd.eval(t), e); };
    NeedleJumpReport rep;
    rep.side_minus = kn_concavity_core(u, nd.t_min, 0.0, kappa, samples);
    rep.side_plus = kn_concavity_core(u, 0.0, nd.t_max, kappa, samples);
    const double len = nd.t_max - nd.t_min;
    rep.d_minus = one_sided_derivative(u, u(0.0), 1e-3 * len, -1);
    rep.d_plus = one_sided_derivative(u, u(0.0), 1e-3 * len, +1);
    rep.kink_ok = rep.d_minus >= rep.d_plus - 1e-9;
    rep.pass = rep.side_minus.pass && rep.side_plus.pass && rep.kink_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// One-sided log-derivatives of the disintegrated density against the weighted
// mean curvatures of the two sides.
// ---------------------------------------------------------------------------

struct LogDerivReport {
    double d_plus_log = 0.0;
    double d_minus_log = 0.0;
    double h_phi0 = 0.0;
    double h_phi1 = 0.0;
    double dev0 = 0.0;  // |d+ log h + H^{Phi_0}|
    double dev1 = 0.0;  // |d- log h - H^{Phi_1}|
    bool pass = false;
};

inline LogDerivReport logderiv_vs_meancurv(const CollarGluedSpace& gs, const Point& y,
                                           double tol = 1e-5) {
    const double range = 0.45 * std::min(gs.depth(0), gs.depth(1));
    const NeedleDensity nd = disintegrate_signed_distance(gs, y, -range, range);
    const double h0 = nd.eval(0.0);
    LogDerivReport rep;
    rep.d_plus_log = nd.d_plus0 / h0;
    rep.d_minus_log = nd.d_minus0 / h0;
    rep.h_phi0 = boundary_geometry(gs.side(0), gs.glue_face(0), y).h_phi;
    rep.h_phi1 = boundary_geometry(gs.side(1), gs.glue_face(1), y).h_phi;
    rep.dev0 = std::abs(rep.d_plus_log + rep.h_phi0);
    rep.dev1 = std::abs(rep.d_minus_log - rep.h_phi1);
    rep.pass = rep.dev0 <= tol && rep.dev1 <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Tilted-field needle: V = a e_1 + b nu_0 with a^2 + b^2 = 1.  The density
// along the tilted map T(x,t) = exp_x(t V) is h(t) = det[J_1..J_{n-1},
// gamma'] Phi, with Jacobi initial data given by nabla_{E_a} V.  The
// derivative jump d^- h(0) - d^+ h(0) is compared against the closed formula
//   [ b^2 tr(Pi_0+Pi_1) + a^2 (Pi_0+Pi_1)(e_1,e_1)
//     - b^2 (<nu_0, grad log Phi_0> + <nu_1, grad log Phi_1>) ] * Phi.
// ---------------------------------------------------------------------------

struct TiltedNeedleReport {
    double jump_numeric = 0.0;
    double jump_formula = 0.0;
    double rel_dev = 0.0;
    bool pass = false;
};

namespace detail {

// slope at 0+ of the signed tilted density on one side
inline double tilted_side_slope(const WeightedManifold& side, const Point& y, double a_tan,
                                double b_nor, const std::array<double, kMaxDim>& e1) {
    const int n = side.dim();
    const int nf = n - 1;
    const Face face = *side.glue_face();
    const BoundaryGeometry bg = boundary_geometry(side, face, y);
    const auto frame = face_frame(bg.face_metric, nf, &e1);

    // Pi in the orthonormal frame
    Mat Pi{};
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            double s = 0.0;
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j)
                    s += bg.sff.bil(i, j) * frame[static_cast<std::size_t>(a)][i] *
                         frame[static_cast<std::size_t>(b)][j];
            Pi[a][b] = s;
        }

    // state: geodesic (x, v), parallel frame E (n vectors), Jacobi fields in
    // frame components (eta, eta'); the frame starts as (E_1..E_{n-1}, nu)
    struct State {
        Point x{};
        Point v{};
        std::array<std::array<double, kMaxDim>, kMaxDim> E{};  // E[mu][coord]
        std::array<std::array<double, kMaxDim>, kMaxDim> eta{}, etap{};  // [a][mu]
    };
    State st;
    st.x = bg.base;
    // gamma'(0) = a_tan E_1 + b_nor nu in coordinates
    for (int i = 0; i < n; ++i) st.v[i] = b_nor * bg.normal[i];
    for (int i = 0; i < nf; ++i) st.v[i] += a_tan * frame[0][i];
    for (int mu = 0; mu < nf; ++mu)
        for (int i = 0; i < nf; ++i) st.E[static_cast<std::size_t>(mu)][i] = frame[static_cast<std::size_t>(mu)][i];
    for (int i = 0; i < n; ++i) st.E[static_cast<std::size_t>(nf)][i] = bg.normal[i];
    for (int a = 0; a < nf; ++a) {
        st.eta[static_cast<std::size_t>(a)][a] = 1.0;
        for (int c = 0; c < nf; ++c) st.etap[static_cast<std::size_t>(a)][c] = -b_nor * Pi[a][c];
        st.etap[static_cast<std::size_t>(a)][nf] = a_tan * Pi[a][0];
    }

    // frame components of gamma' are constant along the parallel transport
    std::array<double, kMaxDim> w{};
    w[0] = a_tan;
    w[nf] = b_nor;

    auto density = [&](const State& s) {
        // det of columns (eta_1 .. eta_{n-1}, w) in the orthonormal frame
        Mat m{};
        for (int a = 0; a < nf; ++a)
            for (int mu = 0; mu < n; ++mu) m[mu][a] = s.eta[static_cast<std::size_t>(a)][mu];
        for (int mu = 0; mu < n; ++mu) m[mu][nf] = w[mu];
        const double det = mat_det(m, n);
        return det * side.weight.value(s.x);
    };

    auto rhs = [&](const State& s, State& d) {
        const MetricData md = metric_data(side.chart, s.x, 2);
        const Christoffels ch = christoffels_from(md);
        const CurvatureResult curv = curvature_from(md);
        d.x = s.v;
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) acc += ch.gamma[k][i][j] * s.v[i] * s.v[j];
            d.v[k] = -acc;
        }
        for (int mu = 0; mu < n; ++mu)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        acc += ch.gamma[k][i][j] * s.v[i] * s.E[static_cast<std::size_t>(mu)][j];
                d.E[static_cast<std::size_t>(mu)][k] = -acc;
            }
        // R_frame[mu][nu] = Riem(E_mu, v, v, E_nu)
        Mat R{};
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k)
                            for (int l = 0; l < n; ++l)
                                acc += curv.riemann.cur(i, j, k, l) *
                                       s.E[static_cast<std::size_t>(mu)][i] * s.v[j] * s.v[k] *
                                       s.E[static_cast<std::size_t>(nu)][l];
                R[mu][nu] = acc;
            }
        for (int a = 0; a < nf; ++a)
            for (int mu = 0; mu < n; ++mu) {
                d.eta[static_cast<std::size_t>(a)][mu] = s.etap[static_cast<std::size_t>(a)][mu];
                double acc = 0.0;
                for (int nu = 0; nu < n; ++nu)
                    acc += R[mu][nu] * s.eta[static_cast<std::size_t>(a)][nu];
                d.etap[static_cast<std::size_t>(a)][mu] = -acc;
            }
    };
    auto advance = [&](const State& s, const State& d, double wstep) {
        State r = s;
        for (int i = 0; i < n; ++i) {
            r.x[i] += wstep * d.x[i];
            r.v[i] += wstep * d.v[i];
        }
        for (int mu = 0; mu < n; ++mu)
            for (int i = 0; i < n; ++i)
                r.E[static_cast<std::size_t>(mu)][i] += wstep * d.E[static_cast<std::size_t>(mu)][i];
        for (int a = 0; a < nf; ++a)
            for (int mu = 0; mu < n; ++mu) {
                r.eta[static_cast<std::size_t>(a)][mu] += wstep * d.eta[static_cast<std::size_t>(a)][mu];
                r.etap[static_cast<std::size_t>(a)][mu] += wstep * d.etap[static_cast<std::size_t>(a)][mu];
            }
        return r;
    };

    // integrate to just past the largest Richardson node (2h with h = 1e-3)
    const double base = 1.25e-4;
    const int steps = 17;
    std::vector<double> hval(static_cast<std::size_t>(steps) + 1);
    hval[0] = density(st);
    for (int k = 0; k < steps; ++k) {
        State k1, k2, k3, k4;
        rhs(st, k1);
        rhs(advance(st, k1, base / 2), k2);
        rhs(advance(st, k2, base / 2), k3);
        rhs(advance(st, k3, base), k4);
        State next = st;
        next = advance(next, k1, base / 6.0);
        next = advance(next, k2, base / 3.0);
        next = advance(next, k3, base / 3.0);
        next = advance(next, k4, base / 6.0);
        st = next;
        hval[static_cast<std::size_t>(k) + 1] = density(st);
    }
    auto f = [&](double s) {
        const double pos = s / base;
        const int k = static_cast<int>(pos + 0.5);
        return hval[static_cast<std::size_t>(k)];
    };
    return one_sided_derivative(f, hval[0], 1e-3, +1);
}

}  // namespace detail

inline TiltedNeedleReport tilted_needle_check(const CollarGluedSpace& gs, const Point& y,
                                              const std::array<double, kMaxDim>& v_tan, double b,
                                              double tol = 1e-3) {
    if (b < 0.0 || b > 1.0) throw ValidationError("tilt parameter b must lie in [0, 1]");
    const double a_tan = std::sqrt(std::max(0.0, 1.0 - b * b));
    const int nf = gs.dim() - 1;
    if (nf == 0 && b != 1.0)
        throw ValidationError("a 1d gluing only admits the normal field (b = 1)");

    const BoundaryGeometry b0 = boundary_geometry(gs.side(0), gs.glue_face(0), y);
    const BoundaryGeometry b1 = boundary_geometry(gs.side(1), gs.glue_face(1), y);

    // normalize the tangential direction in g_Y
    std::array<double, kMaxDim> e1 = v_tan;
    if (nf > 0) {
        double q = 0.0;
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j) q += b0.face_metric[i][j] * e1[i] * e1[j];
        if (q <= 0.0) {
            e1 = {};
            e1[0] = 1.0;
            q = b0.face_metric[0][0];
        }
        for (int i = 0; i < nf; ++i) e1[i] /= std::sqrt(q);
    }

    const double slope0 = detail::tilted_side_slope(gs.side(0), y, a_tan, b, e1);
    const double slope1 = detail::tilted_side_slope(gs.side(1), y, -a_tan, b, e1);

    TiltedNeedleReport rep;
    rep.jump_numeric = -slope1 - slope0;

    auto quad = [&](const BoundaryGeometry& bg) {
        double s = 0.0;
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j) s += bg.sff.bil(i, j) * e1[i] * e1[j];
        return s;
    };
    const double phi = gs.side(0).weight.value(b0.base);
    const double dlog0 = b0.tr_sff - b0.h_phi;
    const double dlog1 = b1.tr_sff - b1.h_phi;
    rep.jump_formula = (b * b * (b0.tr_sff + b1.tr_sff) + a_tan * a_tan * (quad(b0) + quad(b1)) -
                        b * b * (dlog0 + dlog1)) *
                       phi;
    rep.rel_dev = std::abs(rep.jump_numeric - rep.jump_formula) /
                  std::max(1.0, std::abs(rep.jump_formula));
    rep.pass = rep.rel_dev <= tol;
    return rep;
}

}  // namespace gluecd
