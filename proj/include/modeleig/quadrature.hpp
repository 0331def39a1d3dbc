#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"

namespace modeleig {

/// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureRule gauss_legendre_rule(std::size_t n)
{
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Newton iteration on P_n starting from the Chebyshev guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

namespace detail {

struct KronrodEstimate {
    double value;
    double error;
    double l1;
};

/// 15-point Kronrod rule with its embedded 7-point Gauss rule on [a, b].
template <class F>
KronrodEstimate gauss_kronrod_15(const F& f, double a, double b)
{
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
        0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
        0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    const double fc = f(c);
    double kron = wk[7] * fc;
    double gauss = wg[3] * fc;
    double l1 = wk[7] * std::abs(fc);
    for (std::size_t i = 0; i < 7; ++i) {
        const double f1 = f(c - r * xk[i]);
        const double f2 = f(c + r * xk[i]);
        kron += wk[i] * (f1 + f2);
        l1 += wk[i] * (std::abs(f1) + std::abs(f2));
        if (i % 2 == 1) gauss += wg[i / 2] * (f1 + f2);
    }
    return {kron * r, std::abs((kron - gauss) * r), l1 * std::abs(r)};
}

} // namespace detail

struct IntegralOptions {
    double rel_tol = 1e-10;
    std::size_t max_intervals = 20000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integral of f over the union of
/// the cells of `partition` (increasing). The cell with the largest error
/// estimate is bisected until the summed estimate falls below rel_tol times
/// the integral of |f|. Bisection toward an endpoint where the weight
/// vanishes like theta^{N-1} grades the subdivision automatically.
template <class F>
double adaptive_integral(const F& f, std::span<const double> partition, IntegralOptions opts = {})
{
    struct Piece {
        double a, b, value, error, l1;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto evaluate = [&](double lo, double hi) {
        const detail::KronrodEstimate e = detail::gauss_kronrod_15(f, lo, hi);
        return Piece{lo, hi, e.value, e.error, e.l1};
    };
    std::priority_queue<Piece> queue;
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        if (!(partition[i + 1] > partition[i])) continue;
        const Piece p = evaluate(partition[i], partition[i + 1]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        queue.push(p);
    }
    const std::size_t budget = std::max(opts.max_intervals, 4 * queue.size());
    while (!queue.empty() && error > opts.rel_tol * l1 && queue.size() < budget) {
        const Piece worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break; // cannot split further
        queue.pop();
        const Piece left = evaluate(worst.a, mid);
        const Piece right = evaluate(mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        queue.push(left);
        queue.push(right);
    }
    // Re-sum to shed drift from the running updates.
    value = 0.0;
    error = 0.0;
    l1 = 0.0;
    for (; !queue.empty(); queue.pop()) {
        value += queue.top().value;
        error += queue.top().error;
        l1 += queue.top().l1;
    }
    if (!std::isfinite(value) || error > opts.rel_tol * l1 + 1e-300) {
        throw NonConvergenceError("adaptive quadrature did not reach relative tolerance " +
                                  detail::format_number(opts.rel_tol) + " on [" + detail::format_number(partition.front()) +
                                  ", " + detail::format_number(partition.back()) + "]");
    }
    return value;
}

template <class F>
double adaptive_integral(const F& f, double a, double b, IntegralOptions opts = {})
{
    if (a == b) return 0.0;
    const double ends[2] = {a, b};
    return adaptive_integral(f, std::span<const double>(ends), opts);
}

/// Integral of f(theta) h(theta) dtheta over [a, b].
template <class F>
double weighted_integral(const F& f, const Density& h, double a, double b, IntegralOptions opts = {})
{
    if (!(a >= 0.0 && b > a)) throw DomainError("weighted integral needs 0 <= a < b");
    if (b > h.right_endpoint()) throw DomainError("weighted integral extends beyond the density domain");
    return adaptive_integral([&](double x) { return f(x) * h(x); }, a, b, opts);
}

/// Same, with the integrand split at the given breakpoints (e.g. where f is
/// only piecewise smooth). Breakpoints outside (a, b) are ignored.
template <class F>
double weighted_integral(const F& f, const Density& h, double a, double b, std::span<const double> breakpoints,
                         IntegralOptions opts = {})
{
    if (!(a >= 0.0 && b > a)) throw DomainError("weighted integral needs 0 <= a < b");
    if (b > h.right_endpoint()) throw DomainError("weighted integral extends beyond the density domain");
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > cuts.back() && p < b) cuts.push_back(p);
    }
    cuts.push_back(b);
    return adaptive_integral([&](double x) { return f(x) * h(x); }, std::span<const double>(cuts), opts);
}

} // namespace modeleig
