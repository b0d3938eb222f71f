#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gluecd {

inline constexpr int kMaxDim = 4;

// Coordinates of a chart point; entries beyond the chart dimension are unused.
using Point = std::array<double, kMaxDim>;

inline Point make_point(double a = 0, double b = 0, double c = 0, double d = 0) {
    return Point{a, b, c, d};
}

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto the exit-status contract:
//   ValidationError/ParseError -> 2, failed mathematical check -> 1,
//   the numerical errors below -> 3.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

struct ValidationError : Error {
    using Error::Error;
};

// Evaluation hit a point where the expression is not defined/differentiable.
struct EvalError : Error {
    using Error::Error;
};

struct DegenerateMetricError : Error {
    Point where;
    DegenerateMetricError(const std::string& msg, const Point& p) : Error(msg), where(p) {}
};

struct FocalPointError : Error {
    double location;
    FocalPointError(const std::string& msg, double t) : Error(msg), location(t) {}
};

struct StepSizeError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic low-discrepancy sequences and a small deterministic RNG.
// ---------------------------------------------------------------------------

inline double halton(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index + 1;  // skip the 0 term
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// splitmix64, used where tests and sweeps need reproducible pseudo-random data
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// ---------------------------------------------------------------------------
// C-infinity smoothstep: eta == 1 on (-inf,0], eta == 0 on [1,inf),
// strictly decreasing in between.
// ---------------------------------------------------------------------------

inline double smooth_bump_psi(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }

inline double smoothstep(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    const double a = smooth_bump_psi(1.0 - u);
    const double b = smooth_bump_psi(u);
    return a / (a + b);
}

// \int_0^{min(x,1)} smoothstep(u) du, tabulated once on a fine grid.
inline double smoothstep_integral(double x) {
    static const std::vector<double> table = [] {
        constexpr int kCells = 4096;
        std::vector<double> acc(kCells + 1, 0.0);
        const double dx = 1.0 / kCells;
        for (int i = 0; i < kCells; ++i) {
            // Simpson on each cell
            const double x0 = i * dx, x1 = (i + 1) * dx;
            const double mid = 0.5 * (x0 + x1);
            acc[i + 1] = acc[i] + dx / 6.0 * (smoothstep(x0) + 4.0 * smoothstep(mid) + smoothstep(x1));
        }
        return acc;
    }();
    if (x <= 0.0) return 0.0;
    const int cells = static_cast<int>(table.size()) - 1;
    if (x >= 1.0) return table[cells];
    const double pos = x * cells;
    const int i = static_cast<int>(pos);
    const double frac = pos - i;
    // linear within a cell is plenty: the table is only used through profiles
    // whose adequacy is judged by the Ricci sweep
    return table[i] + frac * (table[i + 1] - table[i]);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration.
// ---------------------------------------------------------------------------

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::array<GaussLegendre, 65> cache{};
    GaussLegendre& gl = cache.at(static_cast<std::size_t>(n));
    if (!gl.nodes.empty()) return gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        gl.nodes[i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

// Composite Gauss-Legendre over [a,b].
inline double integrate_gl(const std::function<double(double)>& f, double a, double b,
                           int panels = 64, int order = 8) {
    const GaussLegendre& gl = gauss_legendre(order);
    const double w = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        for (int i = 0; i < order; ++i)
            sum += 0.5 * w * gl.weights[i] * f(lo + 0.5 * w * (gl.nodes[i] + 1.0));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// One-sided derivative at 0 of a per-side smooth function, by 3-point
// one-sided differences with two Richardson levels.  `h` is the largest step;
// nodes used are {h/4, h/2, h, 2h} on the chosen side.
// ---------------------------------------------------------------------------

inline double one_sided_derivative(const std::function<double(double)>& f, double f0, double h,
                                   int side /* +1 right, -1 left */) {
    auto d3 = [&](double step) {
        const double s = side * step;
        return side * (-3.0 * f0 + 4.0 * f(s) - f(2.0 * s)) / (2.0 * step);
    };
    const double d_h = d3(h);
    const double d_h2 = d3(h / 2);
    const double d_h4 = d3(h / 4);
    const double r1 = (4.0 * d_h2 - d_h) / 3.0;
    const double r2 = (4.0 * d_h4 - d_h2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

// Compensated accumulation; quadratures divide by h^2 afterwards, so summation
// roundoff has to stay near machine epsilon.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace gluecd
