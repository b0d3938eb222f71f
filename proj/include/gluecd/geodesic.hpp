#pragma once

// Classical RK4 integration of the geodesic equation x'' = -Gamma(x)(x',x').
// On the glued C^0 metric the Christoffels jump at t = 0; a crossing is
// located by step bisection and the velocity is carried over unchanged
// (collar coordinates make the velocity components continuous across Y).

#include "gluecd/smoothing.hpp"

namespace gluecd {

struct GeodesicField {
    virtual ~GeodesicField() = default;
    virtual int dim() const = 0;
    virtual Christoffels christoffels(const Point& x) const = 0;
    virtual Mat metric_value(const Point& x) const = 0;
    virtual bool inside(const Point& x) const = 0;
    // index of the coordinate whose sign change means an interface crossing,
    // or -1 for smooth metrics
    virtual int crossing_axis() const { return -1; }
};

class ChartGeodesicField : public GeodesicField {
  public:
    explicit ChartGeodesicField(const MetricChart& chart) : chart_(&chart) {}
    int dim() const override { return chart_->dim(); }
    Christoffels christoffels(const Point& x) const override {
        return christoffels_from(metric_data(*chart_, x, 1));
    }
    Mat metric_value(const Point& x) const override { return chart_->value(x); }
    bool inside(const Point& x) const override { return chart_->inside(x); }

  private:
    const MetricChart* chart_;
};

class GluedGeodesicField : public GeodesicField {
  public:
    explicit GluedGeodesicField(const CollarGluedSpace& gs) : gs_(&gs) {}
    int dim() const override { return gs_->dim(); }
    Christoffels christoffels(const Point& x) const override {
        GluedMetricEval ev(*gs_);
        return christoffels_from(metric_data(ev, x, 1));
    }
    Mat metric_value(const Point& x) const override { return gs_->glued_metric_value(x); }
    bool inside(const Point& x) const override { return gs_->inside(x); }
    int crossing_axis() const override { return gs_->dim() - 1; }

  private:
    const CollarGluedSpace* gs_;
};

class SmoothedGeodesicField : public GeodesicField {
  public:
    explicit SmoothedGeodesicField(const SmoothedMetric& m) : m_(&m) {}
    int dim() const override { return m_->dim(); }
    Christoffels christoffels(const Point& x) const override {
        return christoffels_from(metric_data(*m_, x, 1));
    }
    Mat metric_value(const Point& x) const override { return m_->value(x); }
    bool inside(const Point& x) const override { return true; }  // caller bounds the run

  private:
    const SmoothedMetric* m_;
};

struct GeodesicSample {
    double t = 0.0;  // arc parameter
    Point x{};
    Point v{};
};

struct GeodesicResult {
    std::vector<GeodesicSample> samples;
    bool exited = false;   // left the chart before reaching the requested length
    int crossings = 0;
    double max_drift = 0.0;  // max relative |g(v,v)| drift within a side segment
};

namespace detail {

struct GeoState {
    Point x{};
    Point v{};
};

inline GeoState geo_rk4_step(const GeodesicField& f, const GeoState& s, double dt) {
    const int n = f.dim();
    auto acc = [&](const GeoState& st) {
        const Christoffels c = f.christoffels(st.x);
        GeoState d;
        d.x = st.v;
        for (int k = 0; k < n; ++k) {
            double a = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a += c.gamma[k][i][j] * st.v[i] * st.v[j];
            d.v[k] = -a;
        }
        return d;
    };
    auto advance = [&](const GeoState& st, const GeoState& d, double w) {
        GeoState r = st;
        for (int i = 0; i < n; ++i) {
            r.x[i] += w * d.x[i];
            r.v[i] += w * d.v[i];
        }
        return r;
    };
    const GeoState k1 = acc(s);
    const GeoState k2 = acc(advance(s, k1, dt / 2));
    const GeoState k3 = acc(advance(s, k2, dt / 2));
    const GeoState k4 = acc(advance(s, k3, dt));
    GeoState r = s;
    for (int i = 0; i < n; ++i) {
        r.x[i] += dt / 6.0 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
        r.v[i] += dt / 6.0 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
    }
    return r;
}

}  // namespace detail

inline GeodesicResult geodesic_integrate(const GeodesicField& field, const Point& x0,
                                         const Point& v0, double length, double step,
                                         double drift_tol = 1e-6) {
    const int n = field.dim();
    const int cross_axis = field.crossing_axis();
    GeodesicResult out;
    detail::GeoState s{x0, v0};
    if (!field.inside(s.x)) throw ValidationError("geodesic start point outside the chart");
    // a start exactly on the interface belongs to the side it moves into
    if (cross_axis >= 0 && s.x[cross_axis] == 0.0 && s.v[cross_axis] != 0.0)
        s.x[cross_axis] = std::copysign(1e-13, s.v[cross_axis]);

    auto speed2 = [&](const detail::GeoState& st) {
        const Mat g = field.metric_value(st.x);
        double e = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e += g[i][j] * st.v[i] * st.v[j];
        return e;
    };

    double t = 0.0;
    double segment_e0 = speed2(s);
    out.samples.push_back({t, s.x, s.v});
    while (t < length - 1e-15) {
        const double dt = std::min(step, length - t);
        detail::GeoState next = detail::geo_rk4_step(field, s, dt);
        double taken = dt;
        if (cross_axis >= 0 && s.x[cross_axis] != 0.0 &&
            next.x[cross_axis] * (s.x[cross_axis] > 0 ? 1.0 : -1.0) < 0.0) {
            // bisect the step length until we land just past the interface
            double lo = 0.0, hi = dt;
            detail::GeoState landed = next;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const detail::GeoState trial = detail::geo_rk4_step(field, s, mid);
                const bool crossed =
                    trial.x[cross_axis] * (s.x[cross_axis] > 0 ? 1.0 : -1.0) <= 0.0;
                if (crossed) {
                    hi = mid;
                    landed = trial;
                    if (std::abs(trial.x[cross_axis]) <= 1e-11) break;
                } else {
                    lo = mid;
                }
            }
            next = landed;
            taken = hi;
            ++out.crossings;
            segment_e0 = speed2(next);  // energy bookkeeping restarts per side
        }
        t += taken;
        s = next;
        if (!field.inside(s.x)) {
            out.exited = true;
            out.samples.push_back({t, s.x, s.v});
            break;
        }
        const double e = speed2(s);
        const double drift = std::abs(e - segment_e0) / std::max(1e-300, segment_e0);
        out.max_drift = std::max(out.max_drift, drift);
        if (drift > drift_tol * std::max(1.0, length))
            throw StepSizeError("geodesic energy drift " + format_double(drift) +
                                " exceeds tolerance; reduce the step size");
        out.samples.push_back({t, s.x, s.v});
    }
    return out;
}

// Length of a sampled path measured in a (possibly different) metric.
inline double path_length(const GeodesicField& field, const std::vector<GeodesicSample>& samples) {
    const int n = field.dim();
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        // midpoint rule on |gamma'|_g
        Point mid{};
        Point dv{};
        for (int k = 0; k < n; ++k) {
            mid[k] = 0.5 * (samples[i].x[k] + samples[i + 1].x[k]);
            dv[k] = samples[i + 1].x[k] - samples[i].x[k];
        }
        const Mat g = field.metric_value(mid);
        double q = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) q += g[a][b] * dv[a] * dv[b];
        len += std::sqrt(std::max(0.0, q));
    }
    return len;
}

}  // namespace gluecd
