#pragma once

// Reference values computed without going through the library's solver
// paths: Boost's Bessel zeros, direct trigonometric/hyperbolic evaluation,
// and the closed-form upper bounds written out from scratch.

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

namespace oracle {

inline double bessel_zero(double nu) { return boost::math::cyl_bessel_j_zero(nu, 1); }

inline double sk(double kappa, double x)
{
    if (kappa > 0) return std::sin(std::sqrt(kappa) * x) / std::sqrt(kappa);
    if (kappa < 0) return std::sinh(std::sqrt(-kappa) * x) / std::sqrt(-kappa);
    return x;
}

inline double model_h(double K, double N, double x) { return std::pow(sk(K / (N - 1), x), N - 1); }

inline double diameter(double K, double N)
{
    return K > 0 ? std::numbers::pi * std::sqrt((N - 1) / K) : INFINITY;
}

/// Exact for K = 0 and for N = 3, an upper bound for every other (K, N).
inline double bound(double K, double N, double r0)
{
    const double pi2 = std::numbers::pi * std::numbers::pi;
    if (N == 3) return -K / 2 + pi2 / (r0 * r0);
    const double j = bessel_zero(N / 2 - 1);
    const double b = j * j / (r0 * r0);
    if (K == 0) return b;
    if (N < 3) return -N * K / 6 + b;
    const double s = sk(K / (N - 1), r0);
    return -(N - 1) * K / 4 + b + (N - 1) * (N - 3) / 4 * (1 / (s * s) - 1 / (r0 * r0));
}

/// K(N) for the warped compactification.
inline double kk_K(int D, int d, double Lambda, double sigma, double N)
{
    return Lambda - (N + d - 2) * sigma * sigma / ((D - 2) * (N - (D - d)));
}

inline double kk_closed_form(int D, int d, double Lambda, double sigma, double diam, int j, double N)
{
    const double K = kk_K(D, d, Lambda, sigma, N);
    const double r0 = diam / (2.0 * j);
    if (K > 0 && r0 >= diameter(K, N)) return INFINITY;
    return bound(K, N, r0);
}

/// Minimum of the closed-form KK objective over a logarithmic grid of
/// `points` nodes in (n, 1000 n].
inline double kk_dense_min(int D, int d, double Lambda, double sigma, double diam, int j, int points, double* argmin = nullptr)
{
    const double n = D - d;
    const double lo = std::log(n * (1 + 1e-6));
    const double hi = std::log(1000 * n);
    double best = INFINITY;
    for (int i = 0; i < points; ++i) {
        const double N = std::exp(lo + (hi - lo) * i / (points - 1));
        const double v = kk_closed_form(D, d, Lambda, sigma, diam, j, N);
        if (v < best) {
            best = v;
            if (argmin) *argmin = N;
        }
    }
    return best;
}

} // namespace oracle
