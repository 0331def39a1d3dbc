#pragma once

// Bessel functions of the first kind of real order nu > -1 and their first
// positive zero.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modeleig/errors.hpp"

namespace modeleig {

namespace detail {

inline constexpr double kRescale = 1e250;

inline void require_order(double nu)
{
    if (!(nu > -1.0) || !std::isfinite(nu)) throw DomainError("Bessel order must satisfy nu > -1");
}

/// Ascending series sum_k (-x^2/4)^k / (k! Gamma(nu+k+1)) times (x/2)^nu.
inline double bessel_j_series(double nu, double x)
{
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (nu + static_cast<double>(k)));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    // (x/2)^nu / Gamma(nu+1), assembled in logs to survive large orders.
    const double log_pref = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    const double sign = std::tgamma(nu + 1.0) < 0.0 ? -1.0 : 1.0;
    return sign * sum * std::exp(log_pref);
}

/// Starting offset for backward recurrence: far enough above max(nu, x)
/// that the dominant Y-type component has decayed below double precision.
inline int recurrence_offset(double nu, double x)
{
    const double top = std::max(nu, x) + 10.0 * std::cbrt(std::max(x, 1.0)) + 30.0;
    return static_cast<int>(std::ceil(top - nu)) + 1;
}

/// Miller backward recurrence with the Neumann-type normalization
///     sum_k (a+2k) Gamma(a+k)/k! J_{a+2k}(x) = (x/2)^a,   a = frac(nu).
inline double bessel_j_recurrence(double nu, double x)
{
    const double a = nu - std::floor(nu); // [0, 1)
    const int m = static_cast<int>(std::floor(nu)); // nu = a + m, m >= -1
    const int top = std::max(recurrence_offset(a, x), m + 2);

    double f_next = 0.0; // order a + k + 1
    double f = 1e-300;   // order a + k
    double norm = 0.0;
    double at_nu = 0.0;
    auto weight = [a](int k) {
        if (k == 0) return std::tgamma(a + 1.0);
        return (a + 2.0 * k) * std::exp(std::lgamma(a + k) - std::lgamma(k + 1.0));
    };
    for (int k = top; k >= 0; --k) {
        if (k % 2 == 0) norm += weight(k / 2) * f;
        if (k == m) at_nu = f;
        if (k == 0) break;
        const double f_prev = 2.0 * (a + k) / x * f - f_next;
        f_next = f;
        f = f_prev;
        if (std::abs(f) > kRescale) {
            f /= kRescale;
            f_next /= kRescale;
            norm /= kRescale;
            at_nu /= kRescale;
        }
    }
    if (m == -1) {
        // one more step down to order a - 1 = nu (f holds order a, f_next order a+1)
        at_nu = 2.0 * a / x * f - f_next;
    }
    return at_nu * std::exp(a * std::log(0.5 * x)) / norm;
}

/// Sign of J_nu(x) for 0 < x below the second zero, from an unnormalized
/// backward recurrence started where J_mu(x) > 0 for all higher orders.
inline int bessel_j_sign_below_second_zero(double nu, double x)
{
    const int top = recurrence_offset(nu, x);
    double f_next = 0.0;
    double f = 1.0;
    for (int k = top; k >= 1; --k) {
        const double f_prev = 2.0 * (nu + k) / x * f - f_next;
        f_next = f;
        f = f_prev;
        if (std::abs(f) > kRescale) {
            f /= kRescale;
            f_next /= kRescale;
        }
    }
    return f > 0.0 ? 1 : (f < 0.0 ? -1 : 0);
}

} // namespace detail

/// J_nu(x) for nu > -1 and x >= 0. Ascending series up to x = 12, backward
/// recurrence beyond.
inline double bessel_j(double nu, double x)
{
    detail::require_order(nu);
    if (x < 0.0) throw DomainError("bessel_j requires x >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (x <= 12.0) return detail::bessel_j_series(nu, x);
    return detail::bessel_j_recurrence(nu, x);
}

/// j_{nu,1}, the smallest positive zero of J_nu, by bisection on the sign of
/// J_nu. The initial bracket uses j_{nu,1} > nu and
/// j_{nu,1}^2 < (2nu+2)(nu+3), capped below the second zero for large nu.
inline double bessel_first_zero(double nu)
{
    detail::require_order(nu);
    auto sign = [nu](double x) { return detail::bessel_j_sign_below_second_zero(nu, x); };

    double hi = std::min(std::sqrt((2.0 * nu + 2.0) * (nu + 3.0)), nu + 2.5 * std::cbrt(std::max(nu, 1.0)) + 2.0);
    for (int i = 0; i < 64 && sign(hi) >= 0; ++i) hi += 0.1 * std::cbrt(std::max(nu, 1.0));
    if (sign(hi) >= 0) throw NonConvergenceError("could not bracket the first Bessel zero for nu = " + detail::format_number(nu));

    double lo = nu > 0.0 ? nu : 0.5 * hi;
    for (int i = 0; i < 200 && sign(lo) <= 0; ++i) lo *= 0.5;
    if (sign(lo) <= 0) throw NonConvergenceError("could not bracket the first Bessel zero for nu = " + detail::format_number(nu));

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sign(mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace modeleig
