#pragma once

// Truncated-Taylor forward propagation through expression trees: exact partial
// derivatives up to third order in up to four variables.  Symmetric slots are
// stored in full and written symmetrically, so second[i][j] == second[j][i]
// holds exactly by construction.

#include "gluecd/expr.hpp"

namespace gluecd {

struct Taylor {
    int n = 1;      // number of variables
    int order = 0;  // 0..3
    double v = 0.0;
    double d1[kMaxDim] = {};
    double d2[kMaxDim][kMaxDim] = {};
    double d3[kMaxDim][kMaxDim][kMaxDim] = {};

    static Taylor constant(double c, int n, int order) {
        Taylor t;
        t.n = n;
        t.order = order;
        t.v = c;
        return t;
    }
    static Taylor variable(double x, int i, int n, int order) {
        Taylor t = constant(x, n, order);
        if (order >= 1) t.d1[i] = 1.0;
        return t;
    }
};

namespace detail {

inline Taylor t_add(const Taylor& a, const Taylor& b) {
    Taylor r = a;
    r.v += b.v;
    if (r.order >= 1)
        for (int i = 0; i < r.n; ++i) r.d1[i] += b.d1[i];
    if (r.order >= 2)
        for (int i = 0; i < r.n; ++i)
            for (int j = 0; j < r.n; ++j) r.d2[i][j] += b.d2[i][j];
    if (r.order >= 3)
        for (int i = 0; i < r.n; ++i)
            for (int j = 0; j < r.n; ++j)
                for (int k = 0; k < r.n; ++k) r.d3[i][j][k] += b.d3[i][j][k];
    return r;
}

inline Taylor t_neg(const Taylor& a) {
    Taylor r = a;
    r.v = -r.v;
    for (int i = 0; i < r.n; ++i) r.d1[i] = -r.d1[i];
    for (int i = 0; i < r.n; ++i)
        for (int j = 0; j < r.n; ++j) r.d2[i][j] = -r.d2[i][j];
    for (int i = 0; i < r.n; ++i)
        for (int j = 0; j < r.n; ++j)
            for (int k = 0; k < r.n; ++k) r.d3[i][j][k] = -r.d3[i][j][k];
    return r;
}

inline Taylor t_sub(const Taylor& a, const Taylor& b) { return t_add(a, t_neg(b)); }

inline Taylor t_mul(const Taylor& a, const Taylor& b) {
    Taylor r = Taylor::constant(a.v * b.v, a.n, a.order);
    if (r.order >= 1)
        for (int i = 0; i < r.n; ++i) r.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
    if (r.order >= 2)
        for (int i = 0; i < r.n; ++i)
            for (int j = 0; j < r.n; ++j)
                r.d2[i][j] = a.d2[i][j] * b.v + a.d1[i] * b.d1[j] + a.d1[j] * b.d1[i] +
                             a.v * b.d2[i][j];
    if (r.order >= 3)
        for (int i = 0; i < r.n; ++i)
            for (int j = 0; j < r.n; ++j)
                for (int k = 0; k < r.n; ++k)
                    r.d3[i][j][k] = a.d3[i][j][k] * b.v + a.d2[i][j] * b.d1[k] +
                                    a.d2[i][k] * b.d1[j] + a.d2[j][k] * b.d1[i] +
                                    a.d1[i] * b.d2[j][k] + a.d1[j] * b.d2[i][k] +
                                    a.d1[k] * b.d2[i][j] + a.v * b.d3[i][j][k];
    return r;
}

// compose a scalar function with derivative values f0..f3 at u.v
inline Taylor t_compose(const Taylor& u, double f0, double f1, double f2, double f3) {
    Taylor r = Taylor::constant(f0, u.n, u.order);
    if (r.order >= 1)
        for (int i = 0; i < r.n; ++i) r.d1[i] = f1 * u.d1[i];
    if (r.order >= 2)
        for (int i = 0; i < r.n; ++i)
            for (int j = 0; j < r.n; ++j) r.d2[i][j] = f2 * u.d1[i] * u.d1[j] + f1 * u.d2[i][j];
    if (r.order >= 3)
        for (int i = 0; i < r.n; ++i)
            for (int j = 0; j < r.n; ++j)
                for (int k = 0; k < r.n; ++k)
                    r.d3[i][j][k] = f3 * u.d1[i] * u.d1[j] * u.d1[k] +
                                    f2 * (u.d2[i][j] * u.d1[k] + u.d2[i][k] * u.d1[j] +
                                          u.d2[j][k] * u.d1[i]) +
                                    f1 * u.d3[i][j][k];
    return r;
}

inline Taylor t_div(const Taylor& a, const Taylor& b) {
    if (b.v == 0.0) throw EvalError("division by zero");
    const double inv = 1.0 / b.v;
    return t_mul(a, t_compose(b, inv, -inv * inv, 2.0 * inv * inv * inv,
                              -6.0 * inv * inv * inv * inv));
}

// x^p for a constant real exponent.  Falling-factorial coefficients that are
// exactly zero suppress their term, so integer powers work at x == 0.
inline Taylor t_pow_const(const Taylor& u, double p) {
    const bool integral = p == std::floor(p);
    if (u.v < 0.0 && !integral) throw EvalError("negative base with non-integer exponent");
    double f[4] = {};
    double coef = 1.0;
    for (int k = 0; k <= u.order; ++k) {
        if (coef == 0.0) {
            f[k] = 0.0;
        } else {
            const double e = p - k;
            if (u.v == 0.0 && e < 0.0) throw EvalError("0 raised to a negative power");
            f[k] = coef * std::pow(u.v, e);
        }
        coef *= (p - k);
    }
    return t_compose(u, f[0], f[1], f[2], f[3]);
}

inline Taylor t_pow(const Taylor& a, const Taylor& b) {
    bool const_exp = true;
    for (int i = 0; i < b.n && const_exp; ++i) {
        if (b.d1[i] != 0.0) const_exp = false;
        for (int j = 0; j < b.n && const_exp; ++j) {
            if (b.d2[i][j] != 0.0) const_exp = false;
            for (int k = 0; k < b.n && const_exp; ++k)
                if (b.d3[i][j][k] != 0.0) const_exp = false;
        }
    }
    if (const_exp) return t_pow_const(a, b.v);
    if (a.v <= 0.0) throw EvalError("variable exponent requires positive base");
    // a^b = exp(b log a)
    const double la = std::log(a.v), inv = 1.0 / a.v;
    const Taylor loga = t_compose(a, la, inv, -inv * inv, 2.0 * inv * inv * inv);
    const Taylor prod = t_mul(b, loga);
    const double e = std::exp(prod.v);
    return t_compose(prod, e, e, e, e);
}

inline Taylor t_fun(FunKind f, const Taylor& u) {
    const double x = u.v;
    switch (f) {
        case FunKind::Sin: {
            const double s = std::sin(x), c = std::cos(x);
            return t_compose(u, s, c, -s, -c);
        }
        case FunKind::Cos: {
            const double s = std::sin(x), c = std::cos(x);
            return t_compose(u, c, -s, -c, s);
        }
        case FunKind::Tan: {
            const double t = std::tan(x), q = 1.0 + t * t;
            return t_compose(u, t, q, 2.0 * t * q, q * (2.0 + 6.0 * t * t));
        }
        case FunKind::Exp: {
            const double e = std::exp(x);
            return t_compose(u, e, e, e, e);
        }
        case FunKind::Log: {
            if (x <= 0.0) throw EvalError("log of non-positive value");
            const double inv = 1.0 / x;
            return t_compose(u, std::log(x), inv, -inv * inv, 2.0 * inv * inv * inv);
        }
        case FunKind::Sqrt: {
            if (x < 0.0) throw EvalError("sqrt of negative value");
            if (x == 0.0) {
                if (u.order >= 1) throw EvalError("sqrt not differentiable at 0");
                return Taylor::constant(0.0, u.n, u.order);
            }
            const double r = std::sqrt(x);
            return t_compose(u, r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x));
        }
        case FunKind::Sinh: {
            const double s = std::sinh(x), c = std::cosh(x);
            return t_compose(u, s, c, s, c);
        }
        case FunKind::Cosh: {
            const double s = std::sinh(x), c = std::cosh(x);
            return t_compose(u, c, s, c, s);
        }
    }
    throw Error("corrupt function node");
}

inline Taylor t_eval(const ExprNode& node, const Point& x, int n, int order) {
    switch (node.kind) {
        case NodeKind::Num: return Taylor::constant(node.num, n, order);
        case NodeKind::Coord:
            return Taylor::variable(x[static_cast<std::size_t>(node.coord)], node.coord, n, order);
        case NodeKind::Neg: return t_neg(t_eval(*node.a, x, n, order));
        case NodeKind::Add: return t_add(t_eval(*node.a, x, n, order), t_eval(*node.b, x, n, order));
        case NodeKind::Sub: return t_sub(t_eval(*node.a, x, n, order), t_eval(*node.b, x, n, order));
        case NodeKind::Mul: return t_mul(t_eval(*node.a, x, n, order), t_eval(*node.b, x, n, order));
        case NodeKind::Div: return t_div(t_eval(*node.a, x, n, order), t_eval(*node.b, x, n, order));
        case NodeKind::Pow: return t_pow(t_eval(*node.a, x, n, order), t_eval(*node.b, x, n, order));
        case NodeKind::Fun: return t_fun(node.fun, t_eval(*node.a, x, n, order));
    }
    throw Error("corrupt expression node");
}

}  // namespace detail

// Partial derivatives of a ScalarField at a point; third order is optional.
struct Jet {
    int n = 1;
    int order = 1;
    double value = 0.0;
    std::array<double, kMaxDim> first{};
    std::array<std::array<double, kMaxDim>, kMaxDim> second{};
    std::array<std::array<std::array<double, kMaxDim>, kMaxDim>, kMaxDim> third{};
};

inline Jet jet_from_taylor(const Taylor& t) {
    Jet j;
    j.n = t.n;
    j.order = t.order;
    j.value = t.v;
    for (int i = 0; i < t.n; ++i) {
        j.first[i] = t.d1[i];
        for (int k = 0; k < t.n; ++k) {
            j.second[i][k] = t.d2[i][k];
            for (int l = 0; l < t.n; ++l) j.third[i][k][l] = t.d3[i][k][l];
        }
    }
    return j;
}

inline Taylor taylor_eval(const ScalarField& f, const Point& x, int order) {
    return detail::t_eval(*f.root(), x, f.arity(), order);
}

inline Jet jet_eval(const ScalarField& f, const Point& x, int order) {
    if (order < 1 || order > 3) throw ValidationError("jet order must be 1, 2 or 3");
    return jet_from_taylor(taylor_eval(f, x, order));
}

// Taylor of u^p for constant p; used for weight powers like Phi^(1/(N-n)).
inline Taylor taylor_pow(const Taylor& u, double p) { return detail::t_pow_const(u, p); }
inline Taylor taylor_log(const Taylor& u) { return detail::t_fun(FunKind::Log, u); }

}  // namespace gluecd
