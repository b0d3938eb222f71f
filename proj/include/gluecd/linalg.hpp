#pragma once

// Dense linear algebra for n <= 4: enough for chart metrics and the small
// symmetric pencils the curvature checks produce.

#include <algorithm>
#include <limits>

#include "gluecd/common.hpp"

namespace gluecd {

using Mat = std::array<std::array<double, kMaxDim>, kMaxDim>;

inline Mat zero_mat() { return Mat{}; }

inline Mat identity_mat(int n) {
    Mat m{};
    for (int i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b, int n) {
    Mat r{};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += a[i][j] * b[j][k];
            r[i][k] = s;
        }
    return r;
}

inline double mat_det(const Mat& a, int n) {
    Mat m = a;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

inline Mat mat_inverse(const Mat& a, int n) {
    Mat m = a, inv = identity_mat(n);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) throw Error("singular matrix");
        if (piv != c) {
            std::swap(m[piv], m[c]);
            std::swap(inv[piv], inv[c]);
        }
        const double d = 1.0 / m[c][c];
        for (int k = 0; k < n; ++k) {
            m[c][k] *= d;
            inv[c][k] *= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = m[r][c];
            if (f == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                m[r][k] -= f * m[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

struct SymEig {
    int n;
    std::array<double, kMaxDim> values;          // ascending
    Mat vectors;                                 // columns vectors[.][k]
};

// Cyclic Jacobi; fixed sweep order keeps results bit-deterministic.
inline SymEig sym_eigen(const Mat& a_in, int n) {
    Mat a = a_in;
    Mat v = identity_mat(n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    SymEig e{n, {}, v};
    std::array<int, kMaxDim> idx{};
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a[idx[j]][idx[j]] < a[idx[i]][idx[i]]) std::swap(idx[i], idx[j]);
    Mat sorted{};
    for (int i = 0; i < n; ++i) {
        e.values[i] = a[idx[i]][idx[i]];
        for (int k = 0; k < n; ++k) sorted[k][i] = v[k][idx[i]];
    }
    e.vectors = sorted;
    return e;
}

inline void require_symmetric(const Mat& a, int n, const char* what) {
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a[i][j] - a[j][i]) > 1e-9 * std::max(1.0, scale))
                throw ValidationError(std::string(what) + ": matrix is not symmetric");
}

// g^{-1/2} for symmetric positive-definite g.
inline Mat sym_inv_sqrt(const Mat& g, int n) {
    const SymEig e = sym_eigen(g, n);
    if (e.values[0] <= 0.0) throw Error("matrix not positive definite");
    Mat r{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += e.vectors[i][k] * e.vectors[j][k] / std::sqrt(e.values[k]);
            r[i][j] = s;
        }
    return r;
}

// Smallest lambda with form(v,v) = lambda g(v,v): congruence by g^{-1/2}
// followed by a symmetric eigensolve.
inline double min_generalized_eig(const Mat& form, const Mat& g, int n) {
    require_symmetric(form, n, "min_generalized_eig(form)");
    require_symmetric(g, n, "min_generalized_eig(g)");
    const Mat w = sym_inv_sqrt(g, n);
    const Mat b = mat_mul(mat_mul(w, form, n), w, n);
    return sym_eigen(b, n).values[0];
}

inline double max_generalized_eig(const Mat& form, const Mat& g, int n) {
    require_symmetric(form, n, "max_generalized_eig(form)");
    require_symmetric(g, n, "max_generalized_eig(g)");
    const Mat w = sym_inv_sqrt(g, n);
    const Mat b = mat_mul(mat_mul(w, form, n), w, n);
    return sym_eigen(b, n).values[n - 1];
}

inline double condition_number_spd(const Mat& g, int n) {
    const SymEig e = sym_eigen(g, n);
    if (e.values[0] <= 0.0) return std::numeric_limits<double>::infinity();
    return e.values[n - 1] / e.values[0];
}

}  // namespace gluecd
