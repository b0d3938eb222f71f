#include <doctest.h>

#include "gluecd/smoothing.hpp"
#include "oracles.hpp"

using namespace gluecd;

namespace {

WeightedManifold collar_side(const char* g_yy, double depth, const char* weight = "1",
                             double N = 2) {
    std::array<Interval, kMaxDim> dom{};
    dom[0] = {0.0, 2.0 * M_PI};
    dom[1] = {0.0, depth};
    MetricChart chart(2, dom,
                      {parse_field(g_yy, 2), parse_field("0", 2), parse_field("1", 2)});
    return WeightedManifold{chart, parse_field(weight, 2), N,
                            {{1, true, FaceRole::Glue}, {1, false, FaceRole::Free}}};
}

CollarGluedSpace doubled_disk() {
    return assemble(collar_side("(1-x2)^2", 0.9), collar_side("(1-x2)^2", 0.9));
}
CollarGluedSpace doubled_annulus() {
    return assemble(collar_side("(1+x2)^2", 0.9), collar_side("(1+x2)^2", 0.9));
}
CollarGluedSpace doubled_hemisphere() {
    return assemble(collar_side("cos(x2)^2", 0.8), collar_side("cos(x2)^2", 0.8));
}

}  // namespace

TEST_CASE("assemble accepts matching collars and rejects mismatches") {
    CHECK_NOTHROW(doubled_disk());
    CHECK_NOTHROW(doubled_hemisphere());
    // boundary circles of different length cannot be identified
    CHECK_THROWS_AS(assemble(collar_side("(1-x2)^2", 0.9), collar_side("(1.3-x2)^2", 0.9)),
                    ValidationError);
    // weights must agree on the interface
    CHECK_THROWS_AS(assemble(collar_side("(1-x2)^2", 0.9),
                             collar_side("(1-x2)^2", 0.9, "1 + x2 + 0.5")),
                    ValidationError);
    // collar normalization: g_nn must be 1
    std::array<Interval, kMaxDim> dom{};
    dom[0] = {0.0, 2.0 * M_PI};
    dom[1] = {0.0, 0.9};
    MetricChart bad(2, dom,
                    {parse_field("(1-x2)^2", 2), parse_field("0", 2), parse_field("1 + x2^2", 2)});
    WeightedManifold side{bad, parse_field("1", 2), 2.0,
                          {{1, true, FaceRole::Glue}, {1, false, FaceRole::Free}}};
    CHECK_THROWS_AS(assemble(side, collar_side("(1-x2)^2", 0.9)), ValidationError);
}

TEST_CASE("glued metric evaluator picks sides and flips signs") {
    CollarGluedSpace gs = doubled_disk();
    // values: g_yy(t) = (1-|t|)^2
    for (double t : {-0.5, -0.1, 0.0, 0.2, 0.7}) {
        const Mat g = gs.glued_metric_value(make_point(1.0, t));
        CHECK(g[0][0] == doctest::Approx(std::pow(1.0 - std::abs(t), 2)).epsilon(1e-14));
        CHECK(g[1][1] == 1.0);
        CHECK(g[0][1] == 0.0);
    }
    // derivative of g_yy in t is odd across the interface
    std::array<Taylor, 10> comp;
    gs.glued_metric_jets(make_point(1.0, 0.25), 1, comp.data());
    const double dplus = comp[0].d1[1];
    gs.glued_metric_jets(make_point(1.0, -0.25), 1, comp.data());
    const double dminus = comp[0].d1[1];
    CHECK(dplus == doctest::Approx(-2.0 * 0.75));
    CHECK(dminus == doctest::Approx(+2.0 * 0.75));
}

TEST_CASE("compatibility: disk passes, hemisphere is the boundary case, annulus fails") {
    const CompatibilityReport disk = compatibility_report(doubled_disk(), 17);
    CHECK(disk.pass);
    CHECK(disk.min_pi_eig == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(disk.min_margin == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(disk.min_h_sum == doctest::Approx(2.0).epsilon(1e-9));

    const CompatibilityReport hemi = compatibility_report(doubled_hemisphere(), 17);
    CHECK(hemi.pass);
    CHECK(std::abs(hemi.min_pi_eig) <= 1e-10);
    CHECK(std::abs(hemi.min_margin) <= 1e-10);

    const CompatibilityReport ann = compatibility_report(doubled_annulus(), 17);
    CHECK_FALSE(ann.pass);
    CHECK(ann.min_pi_eig == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("deformation: profile basics") {
    SmoothingProfile p = SmoothingProfile::make(0.1);
    CHECK(p.F(0.0) == 0.0);
    CHECK(p.Fcal(0.0) == 0.0);
    CHECK(p.F(0.1) == 0.0);
    CHECK(p.F(0.2) == 0.0);
    CHECK(p.Fcal(0.0999) >= 0.0);
    CHECK(p.Fcal(0.1) == 0.0);
    CHECK(p.h == doctest::Approx(1e-5));
    // Fcal'(0) = 0: quadratic vanishing
    CHECK(p.Fcal(1e-6) <= 1e-10 * p.delta);
    // supremum of both profiles shrinks with delta
    double prev_f = 1e9, prev_fc = 1e9;
    for (double d : {0.3, 0.2, 0.1, 0.05}) {
        SmoothingProfile q = SmoothingProfile::make(d);
        double mf = 0.0, mfc = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double t = d * i / 1000.0;
            mf = std::max(mf, std::abs(q.F(t)));
            mfc = std::max(mfc, std::abs(q.Fcal(t)));
        }
        CHECK(mf < prev_f);
        CHECK(mfc < prev_fc);
        prev_f = mf;
        prev_fc = mfc;
    }
}

TEST_CASE("deformation of the doubled disk matches the hand-integrated transport") {
    CollarGluedSpace gs = doubled_disk();
    SmoothingProfile prof = SmoothingProfile::make(0.25, 1.0);
    DeformedGluedMetric gd = deform(gs, prof);
    // parallel transport of L along the inward radial lines:
    // dL/ds = 2 Gamma^y_{sy} L = -2 L/(1-s)  =>  L(s) = 2 (1-s)^2,
    // so the deformed block is (1-s)^2 (1 + 4 F(s) - 2 C Fcal(s)).
    for (double s : {0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.24}) {
        const Mat g = gd.value(make_point(2.0, s));
        const double expect =
            std::pow(1.0 - s, 2) * (1.0 + 4.0 * prof.F(s) - 2.0 * prof.C * prof.Fcal(s));
        CHECK(g[0][0] == doctest::Approx(expect).epsilon(1e-6));
        CHECK(g[1][1] == 1.0);  // normal direction untouched
        CHECK(g[0][1] == 0.0);
    }
    // side 1 untouched; on Y the metric is unchanged (F(0) = Fcal(0) = 0)
    CHECK(gd.value(make_point(2.0, -0.1))[0][0] == doctest::Approx(std::pow(0.9, 2)));
    CHECK(gd.value(make_point(2.0, 0.0))[0][0] == doctest::Approx(1.0));
}

TEST_CASE("deformation with L = 0 keeps only the Fcal term") {
    CollarGluedSpace gs = doubled_hemisphere();
    SmoothingProfile prof = SmoothingProfile::make(0.2, 1.5);
    DeformedGluedMetric gd = deform(gs, prof);
    for (double s : {0.02, 0.1, 0.18}) {
        const Mat g = gd.value(make_point(1.0, s));
        const double expect = std::pow(std::cos(s), 2) * (1.0 - 2.0 * prof.C * prof.Fcal(s));
        CHECK(g[0][0] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("trivial profile leaves the metric alone") {
    CollarGluedSpace gs = doubled_disk();
    SmoothingProfile prof = SmoothingProfile::make(0.2);
    prof.enable_F = false;
    prof.enable_Fcal = false;
    DeformedGluedMetric gd = deform(gs, prof);
    for (double s : {0.01, 0.1, 0.19}) {
        CHECK(gd.value(make_point(0.5, s))[0][0] ==
              doctest::Approx(std::pow(1.0 - s, 2)).epsilon(1e-15));
    }
}

TEST_CASE("overgrown deformation is rejected as not positive definite") {
    CollarGluedSpace gs = doubled_disk();
    SmoothingProfile prof = SmoothingProfile::make(0.3, 1e7);
    prof.fcal_pow = 2;  // exaggerate the Fcal amplitude as well
    CHECK_THROWS_AS(deform(gs, prof), DegenerateMetricError);
}

TEST_CASE("c1 matching: correct sign cancels the jump, wrong sign doubles it") {
    CollarGluedSpace gs = doubled_disk();

    SmoothingProfile good = SmoothingProfile::make(0.2);
    CHECK(c1_matching_check(deform(gs, good), 9) <= 1e-8);

    SmoothingProfile off = SmoothingProfile::make(0.2);
    off.enable_F = false;
    off.enable_Fcal = false;
    CHECK(c1_matching_check(deform(gs, off), 9) == doctest::Approx(4.0).epsilon(1e-9));

    SmoothingProfile wrong = SmoothingProfile::make(0.2);
    wrong.sign = -1;
    CHECK(c1_matching_check(deform(gs, wrong), 9) == doctest::Approx(8.0).epsilon(1e-9));

    // hemisphere: already C^1, stays C^1
    CollarGluedSpace hemi = doubled_hemisphere();
    CHECK(c1_matching_check(deform(hemi, good), 9) <= 1e-10);
    CHECK(c1_matching_check(deform(hemi, off), 9) <= 1e-10);
}

namespace {

CollarGluedSpace affine_glue(double slope0, double slope1) {
    char buf0[64], buf1[64];
    std::snprintf(buf0, sizeof(buf0), "1 + %.17g*x2", slope0);
    std::snprintf(buf1, sizeof(buf1), "1 + %.17g*x2", slope1);
    return assemble(collar_side(buf0, 0.5), collar_side(buf1, 0.5));
}

}  // namespace

TEST_CASE("mollifier kernel moments match the dense quadrature oracle") {
    // 1d: c_rho = int |z| rho / int rho with rho = exp(-1/(1-z^2))
    auto kern = [](double z) { return std::exp(-1.0 / (1.0 - z * z)); };
    const double mass =
        oracles::quad_dense([&](double z) { return kern(z); }, -0.999999, 0.999999, 20000);
    const double mom = oracles::quad_dense([&](double z) { return std::abs(z) * kern(z); },
                                           -0.999999, 0.999999, 20000);
    const double c_exact = mom / mass;
    const double c_quad = shared_mollifier(1).abs_first_moment_1d();
    CHECK(std::abs(c_quad - c_exact) <= 2e-3 * c_exact);
}

TEST_CASE("mollification reproduces piecewise-affine data") {
    // affine on both sides with a slope break at t = 0: |t|-type kink
    CollarGluedSpace gs = affine_glue(1.0, 1.0);  // glued g_yy = 1 + |t|
    SmoothingProfile prof = SmoothingProfile::make(0.3, 1.0, 1e-3);
    prof.enable_F = false;
    prof.enable_Fcal = false;
    DeformedGluedMetric gd = deform(gs, prof);
    SmoothedMetric gsm = mollify(gd);
    const double h = gsm.width();

    // away from the kink but inside the band: affine data convolves to itself
    for (double t : {0.05, -0.04, 0.19}) {
        const Mat g = gsm.value(make_point(1.0, t));
        CHECK(g[0][0] == doctest::Approx(1.0 + std::abs(t)).epsilon(1e-12));
    }
    // exactly outside the band: the glued metric, bit for bit
    {
        const Point p = make_point(1.0, gsm.band() + 1e-9);
        CHECK(gsm.value(p)[0][0] == gs.glued_metric_value(p)[0][0]);
    }
    // at the kink: value is 1 + h * c_rho with c_rho the 2d kernel abs moment
    auto radial = [](double r) { return std::exp(-1.0 / (1.0 - r * r)); };
    const double num =
        oracles::quad_dense([&](double r) { return r * r * radial(r); }, 0.0, 0.999999, 20000);
    const double den =
        oracles::quad_dense([&](double r) { return r * radial(r); }, 0.0, 0.999999, 20000);
    const double c_rho = (2.0 / M_PI) * num / den;
    const double got = (gsm.value(make_point(1.0, 0.0))[0][0] - 1.0) / h;
    CHECK(got == doctest::Approx(c_rho).epsilon(5e-3));
}

TEST_CASE("smoothed metric keeps the collar block exact") {
    CollarGluedSpace gs = doubled_disk();
    SmoothingProfile prof = SmoothingProfile::make(0.2);
    DeformedGluedMetric gd = deform(gs, prof);
    SmoothedMetric gsm = mollify(gd);
    for (double t : {-0.15, 0.0, 1e-4, 0.1}) {
        std::array<Taylor, 10> comp;
        gsm.components(make_point(0.3, t), 2, comp.data());
        CHECK(comp[static_cast<std::size_t>(sym_index(2, 1, 1))].v == 1.0);
        CHECK(comp[static_cast<std::size_t>(sym_index(2, 0, 1))].v == 0.0);
    }
}

TEST_CASE("smoothed derivatives of smooth regions match the chart jets") {
    CollarGluedSpace gs = doubled_hemisphere();
    SmoothingProfile prof = SmoothingProfile::make(0.1);
    prof.enable_F = false;
    prof.enable_Fcal = false;  // pure mollification of the (smooth) round metric
    DeformedGluedMetric gd = deform(gs, prof);
    SmoothedMetric gsm = mollify(gd);
    for (double t : {0.05, -0.03, 0.002}) {
        const Point p = make_point(1.0, t);
        std::array<Taylor, 10> a, b;
        gsm.components(p, 2, a.data());
        gs.glued_metric_jets(p, 2, b.data());
        // g_yy = cos^2 t is smooth across 0, so mollification only adds O(h^2)
        CHECK(std::abs(a[0].v - b[0].v) <= 1e-8);
        CHECK(std::abs(a[0].d1[1] - b[0].d1[1]) <= 1e-6);
        CHECK(std::abs(a[0].d2[1][1] - b[0].d2[1][1]) <= 1e-4);
    }
}

TEST_CASE("mollification width must fit under the deformation scale") {
    CollarGluedSpace gs = doubled_disk();
    SmoothingProfile prof = SmoothingProfile::make(0.2, 1.0, /*h=*/0.001);
    // h = 1e-3 > delta^4/2 = 8e-4: rejected
    CHECK_THROWS_AS(mollify(deform(gs, prof)), ValidationError);
}

TEST_CASE("smoothing sweep on the doubled disk: flat limit") {
    CollarGluedSpace gs = doubled_disk();
    SmoothingSweepOptions opt;
    opt.y_res = 3;
    opt.t_res = 9;
    opt.t_fine_res = 17;
    const std::vector<SweepRow> rows = smoothing_sweep(gs, 2.0, 0.0, {0.1, 0.05}, opt);
    REQUIRE(rows.size() == 2);
    for (const SweepRow& r : rows) CHECK(r.error.empty());
    // eps(delta) = -min_eig decreases toward 0 (acceptance pins the bounds)
    CHECK(rows[1].epsilon <= rows[0].epsilon + 1e-12);
    CHECK(rows[1].epsilon <= 0.1);
    CHECK(rows[1].min_eig >= -0.1);
    CHECK(rows[1].sup_dist <= rows[0].sup_dist + 1e-12);
}

TEST_CASE("smoothing sweep refuses incompatible gluings and bad delta lists") {
    CHECK_THROWS_AS(smoothing_sweep(doubled_annulus(), 2.0, 0.0, {0.1}), ValidationError);
    CHECK_THROWS_AS(smoothing_sweep(doubled_disk(), 2.0, 0.0, {0.1, 0.2}), ValidationError);
}

TEST_CASE("weighted smoothing sweeps exercise both weight branches") {
    SmoothingSweepOptions opt;
    opt.y_res = 3;
    opt.t_res = 7;
    opt.t_fine_res = 11;
    // C^1-matched weight (d Phi/ds = 0 on Y): the glued weight is used as-is.
    // This side has Ric^{Phi,3} >= -2/(1+s^2), so the smoothed family must
    // hold that bound up to eps rather than any fixed K.
    {
        CollarGluedSpace gs = assemble(collar_side("(1-x2)^2", 0.9, "1 + x2^2", 3),
                                       collar_side("(1-x2)^2", 0.9, "1 + x2^2", 3));
        CHECK_FALSE(SmoothedWeight(gs, 1e-5).active());
        const double side_min = ricci_bound_sweep(gs.side(0), 33).min_eig;
        CHECK(side_min == doctest::Approx(-2.0).epsilon(0.05));
        const std::vector<SweepRow> rows =
            smoothing_sweep(gs, 3.0, side_min, {0.1, 0.05}, opt);
        for (const SweepRow& r : rows) {
            CHECK(r.error.empty());
            CHECK(std::isfinite(r.min_eig));
        }
        CHECK(rows.back().min_eig >= side_min - 0.2);
    }
    // kinked weight (the boundary case H-margin = 0): the glued weight gets
    // mollified across the interface, and the Bakry-Emery term blows down
    // near t = 0 at the mollification scale; the sweep must stay finite,
    // error-free and deterministic
    {
        CollarGluedSpace gs = assemble(collar_side("(1-x2)^2", 0.9, "1 + x2", 3),
                                       collar_side("(1-x2)^2", 0.9, "1 + x2", 3));
        CHECK(SmoothedWeight(gs, 1e-5).active());
        const std::vector<SweepRow> a = smoothing_sweep(gs, 3.0, 0.0, {0.1}, opt);
        const std::vector<SweepRow> b = smoothing_sweep(gs, 3.0, 0.0, {0.1}, opt);
        REQUIRE(a.size() == 1);
        CHECK(a[0].error.empty());
        CHECK(std::isfinite(a[0].min_eig));
        CHECK(a[0].min_eig == b[0].min_eig);
        CHECK(a[0].sup_dist == b[0].sup_dist);
    }
}

TEST_CASE("trivial profile on a flat doubling: only mollification error remains") {
    // both sides genuinely flat (g_yy = 1), glued metric globally constant
    CollarGluedSpace gs = affine_glue(0.0, 0.0);
    SmoothingProfile prof = SmoothingProfile::make(0.1);
    prof.enable_F = false;
    prof.enable_Fcal = false;
    DeformedGluedMetric gd = deform(gs, prof);
    SmoothedMetric gsm = mollify(gd);
    double sup_dist = 0.0, worst_eig = 0.0;
    for (double t : {-0.12, -0.05, 0.0, 1e-5, 0.03, 0.1005, 0.2}) {
        const Point p = make_point(1.0, t);
        const MetricData d = metric_data(gsm, p, 2);
        const Mat ref = gs.glued_metric_value(p);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                sup_dist = std::max(sup_dist, std::abs(d.g[i][j] - ref[i][j]));
        const CurvatureResult c = curvature_from(d);
        worst_eig = std::max(worst_eig,
                             std::abs(min_generalized_eig(c.ricci.as_mat(), d.g, 2)));
    }
    // constant data convolves to itself; curvature deviates only by
    // quadrature roundoff in the mollified jets
    CHECK(sup_dist <= 1e-13);
    CHECK(worst_eig <= 1e-6);
}
