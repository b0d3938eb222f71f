#pragma once

// Distortion coefficients sigma^{(t)}_{K,N}(theta) and tau^{(t)}_{K,N}(theta)
// built from sin_kappa, the solution of v'' + kappa v = 0, v(0)=0, v'(0)=1.

#include "gluecd/common.hpp"

namespace gluecd {

inline double sin_kappa(double kappa, double x) {
    if (kappa > 0.0) {
        const double r = std::sqrt(kappa);
        return std::sin(r * x) / r;
    }
    if (kappa < 0.0) {
        const double r = std::sqrt(-kappa);
        return std::sinh(r * x) / r;
    }
    return x;
}

inline double pi_kappa(double kappa) {
    return kappa > 0.0 ? M_PI / std::sqrt(kappa) : std::numeric_limits<double>::infinity();
}

// sigma with the comparison parameter kappa given directly
inline double sigma_kappa(double kappa, double t, double theta) {
    if (theta == 0.0) return t;
    if (theta >= pi_kappa(kappa)) return std::numeric_limits<double>::infinity();
    return sin_kappa(kappa, t * theta) / sin_kappa(kappa, theta);
}

inline double sigma(double K, double N, double t, double theta) {
    if (N <= 0.0) throw ValidationError("sigma requires N > 0");
    return sigma_kappa(K / N, t, theta);
}

inline double tau(double K, double N, double t, double theta) {
    if (N < 1.0) throw ValidationError("tau requires N >= 1");
    if (N == 1.0) {
        // K > 0 collapses every positive-distance coefficient; keep continuity in t at theta = 0
        if (K > 0.0) return theta > 0.0 ? std::numeric_limits<double>::infinity() : t;
        return t;  // sigma_{K,0}^{1-1/1} = 1
    }
    const double s = sigma(K, N - 1.0, t, theta);
    if (std::isinf(s)) return s;
    return std::pow(t, 1.0 / N) * std::pow(s, 1.0 - 1.0 / N);
}

}  // namespace gluecd
