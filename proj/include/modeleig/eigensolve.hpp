#pragma once

// First Dirichlet eigenpair of the weighted problem
//
//     -(h u')' = lambda h u   on (0, r0),   u(r0) = 0,
//
// with a natural condition at theta = 0, where the weight vanishes. Two
// independent routes: a conforming P1 finite-element discretization solved by
// shifted inverse iteration with Richardson extrapolation over nested grids,
// and a shooting method on phi'' + (log h)' phi' + lambda phi = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"
#include "modeleig/quadrature.hpp"

namespace modeleig {

struct GridSpec {
    enum class Grading { uniform, geometric };

    std::size_t node_count = 512;
    Grading grading = Grading::geometric;
    /// Ratio of the first cell width to the last one for geometric grading.
    double ratio = 0.9;

    GridSpec refined() const
    {
        GridSpec g = *this;
        g.node_count = 2 * (node_count - 1) + 1;
        return g;
    }
};

/// Nodes on [a, b] following the grid specification. Grids produced from
/// `spec` and `spec.refined()` are nested.
inline std::vector<double> make_grid(const GridSpec& spec, double a, double b)
{
    if (spec.node_count < 16) throw InvalidInputError("grid needs at least 16 nodes");
    if (!(b > a)) throw DomainError("grid interval is empty");
    const std::size_t n = spec.node_count - 1;
    std::vector<double> nodes(spec.node_count);
    const bool graded = spec.grading == GridSpec::Grading::geometric && spec.ratio != 1.0;
    if (graded && !(spec.ratio > 0.0 && spec.ratio < 1.0)) throw InvalidInputError("geometric grading ratio must lie in (0,1)");
    const double gamma = graded ? -std::log(spec.ratio) : 0.0;
    const double denom = graded ? std::expm1(gamma) : 1.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        const double u = graded ? std::expm1(gamma * s) / denom : s;
        nodes[i] = a + (b - a) * u;
    }
    nodes.front() = a;
    nodes.back() = b;
    return nodes;
}

/// Symmetric tridiagonal matrix: diag[i], off[i] couples i and i+1.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }

    std::vector<double> multiply(const std::vector<double>& x) const
    {
        const std::size_t n = diag.size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = diag[i] * x[i];
            if (i > 0) v += off[i - 1] * x[i - 1];
            if (i + 1 < n) v += off[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }
};

/// Discrete generalized eigensystem A u = lambda B u over hat functions.
/// Unknowns are the values at nodes[0 .. n-2]; the last node carries the
/// Dirichlet condition.
struct WeightedProblem {
    std::vector<double> nodes;
    SymTridiagonal stiffness;
    SymTridiagonal mass;
    double log_scale = 0.0; // weights were multiplied by exp(-log_scale)
    /// Element stiffness k_e between node e and e+1 (the last one couples to
    /// the Dirichlet node). Filled when the stiffness is a pure weighted
    /// Laplacian; enables the cancellation-free elimination below.
    std::vector<double> conductance;
};

namespace detail {

inline double dimension_hint(const Density& h)
{
    if (const auto* m = h.as_model()) return m->N;
    if (const auto* s = h.as_sampled(); s && s->dimension) return *s->dimension;
    return 2.0;
}

} // namespace detail

/// Left end of the numerically relevant support of h on [0, r0]: the largest
/// leading stretch on which h falls below exp(-C) times its maximum. The cut
/// C grows with N so that the discarded part of phi^2 h stays negligible
/// against double precision; it is zero for ordinary parameters.
inline double effective_support_start(const Density& h, double r0)
{
    constexpr std::size_t samples = 4096;
    const double N = detail::dimension_hint(h);
    const double nu = std::max(N / 2.0 - 1.0, 1.0);
    const double cut = std::clamp(20.0 * std::cbrt(nu), 100.0, 700.0);
    std::vector<double> logs(samples);
    double lmax = -kInf;
    for (std::size_t k = 0; k < samples; ++k) {
        logs[k] = h.log_value(r0 * static_cast<double>(k + 1) / static_cast<double>(samples));
        lmax = std::max(lmax, logs[k]);
    }
    double start = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        if (logs[k] > lmax - cut) break;
        start = r0 * static_cast<double>(k + 1) / static_cast<double>(samples);
    }
    return start;
}

inline void validate_eigen_inputs(const Density& h, double r0)
{
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("radius r0 must be positive and finite");
    if (const auto* m = h.as_model(); m && m->K > 0.0 && r0 >= max_diameter(m->K, m->N)) {
        throw DomainError("radius r0 must be smaller than D_{K,N} = " + detail::format_number(max_diameter(m->K, m->N)));
    }
    if (r0 > h.right_endpoint()) throw DomainError("radius r0 exceeds the density domain");
    if (h.has_interior_zero(r0)) throw DomainError("density vanishes inside (0, r0); the solver does not split domains");
}

/// Assemble stiffness (int h psi_i' psi_j') and mass (int h psi_i psi_j)
/// matrices over the grid. Element integrals use 8-point Gauss-Legendre.
inline WeightedProblem assemble_weighted_problem(const Density& h, double r0, const GridSpec& grid,
                                                 std::optional<double> support_start = std::nullopt)
{
    validate_eigen_inputs(h, r0);
    const double a = support_start ? *support_start : effective_support_start(h, r0);
    WeightedProblem p;
    p.nodes = make_grid(grid, a, r0);
    const std::size_t elements = p.nodes.size() - 1;

    static const QuadratureRule rule = gauss_legendre_rule(8);
    const std::size_t q = rule.nodes.size();
    std::vector<double> logw(elements * q);
    double lmax = -kInf;
    for (std::size_t e = 0; e < elements; ++e) {
        const double x0 = p.nodes[e];
        const double w = p.nodes[e + 1] - x0;
        for (std::size_t k = 0; k < q; ++k) {
            const double l = h.log_value(x0 + w * rule.nodes[k]);
            logw[e * q + k] = l;
            lmax = std::max(lmax, l);
        }
    }
    if (!std::isfinite(lmax)) throw DomainError("density vanishes on the whole interval");
    p.log_scale = lmax;

    const std::size_t n = elements; // unknowns: nodes 0..elements-1
    p.stiffness.diag.assign(n, 0.0);
    p.stiffness.off.assign(n > 0 ? n - 1 : 0, 0.0);
    p.mass.diag.assign(n, 0.0);
    p.mass.off.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t e = 0; e < elements; ++e) {
        const double w = p.nodes[e + 1] - p.nodes[e];
        double total = 0.0;
        double m00 = 0.0;
        double m01 = 0.0;
        double m11 = 0.0;
        auto accumulate = [&](double s, double wt) {
            total += wt;
            m00 += wt * (1.0 - s) * (1.0 - s);
            m01 += wt * (1.0 - s) * s;
            m11 += wt * s * s;
        };
        if (e == 0 && a == 0.0) {
            // h ~ theta^{N-1} is not polynomial at the origin: split the first
            // element geometrically toward 0 so the quadrature error does not
            // dominate the O(width^2) discretization error.
            double right = 1.0;
            for (int piece = 0; piece < 80; ++piece) {
                const double left = 0.5 * right;
                for (std::size_t k = 0; k < q; ++k) {
                    const double s = left + (right - left) * rule.nodes[k];
                    accumulate(s, rule.weights[k] * (right - left) * std::exp(h.log_value(w * s) - lmax) * w);
                }
                right = left;
            }
        } else {
            for (std::size_t k = 0; k < q; ++k) {
                accumulate(rule.nodes[k], rule.weights[k] * std::exp(logw[e * q + k] - lmax) * w);
            }
        }
        const double k = total / (w * w);
        p.conductance.push_back(k);
        p.stiffness.diag[e] += k;
        p.mass.diag[e] += m00;
        if (e + 1 < n) {
            p.stiffness.diag[e + 1] += k;
            p.stiffness.off[e] -= k;
            p.mass.diag[e + 1] += m11;
            p.mass.off[e] += m01;
        }
    }
    return p;
}

/// Liouville form of the model problem on a truncated interval [a, r0]:
/// u = phi sqrt(h) solves -u'' + V u = lambda u with
///     V = ((N-1)^2 c^2 - 2(N-1)) / (4 s^2),   s = s_kappa, c = c_kappa.
/// For large N, phi carries a factor close to theta^{-(N-1)/2} that P1 elements
/// resolve poorly, while u varies only on the much wider transition scale.
/// Both ends are Dirichlet; the mass of u^2 near a is negligible by the
/// choice of a. Unknowns are the values at nodes[1 .. n-2].
inline WeightedProblem assemble_liouville_problem(double K, double N, double r0, const GridSpec& grid, double a)
{
    if (!(a > 0.0)) throw DomainError("Liouville form needs a truncated interval");
    const double kappa = K / (N - 1.0);
    auto potential = [&](double t) {
        const double cot = cot_kappa(kappa, t);
        const double inv_s2 = std::exp(-2.0 * log_s_kappa(kappa, t));
        return 0.25 * (N - 1.0) * (N - 1.0) * cot * cot - 0.5 * (N - 1.0) * inv_s2;
    };
    WeightedProblem p;
    p.nodes = make_grid(grid, a, r0);
    const std::size_t elements = p.nodes.size() - 1;
    const std::size_t n = elements - 1; // interior nodes 1..elements-1
    static const QuadratureRule rule = gauss_legendre_rule(8);
    p.stiffness.diag.assign(n, 0.0);
    p.stiffness.off.assign(n - 1, 0.0);
    p.mass.diag.assign(n, 0.0);
    p.mass.off.assign(n - 1, 0.0);
    for (std::size_t e = 0; e < elements; ++e) {
        const double x0 = p.nodes[e];
        const double w = p.nodes[e + 1] - x0;
        double v00 = 0.0;
        double v01 = 0.0;
        double v11 = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double s = rule.nodes[k];
            const double wt = rule.weights[k] * w;
            const double v = potential(x0 + w * s);
            v00 += wt * v * (1.0 - s) * (1.0 - s);
            v01 += wt * v * (1.0 - s) * s;
            v11 += wt * v * s * s;
        }
        const double m00 = w / 3.0;
        const double m01 = w / 6.0;
        // local node e -> unknown e-1, node e+1 -> unknown e
        if (e >= 1) {
            p.stiffness.diag[e - 1] += 1.0 / w + v00;
            p.mass.diag[e - 1] += m00;
        }
        if (e + 1 <= n) {
            p.stiffness.diag[e] += 1.0 / w + v11;
            p.mass.diag[e] += m00;
        }
        if (e >= 1 && e + 1 <= n) {
            p.stiffness.off[e - 1] += -1.0 / w + v01;
            p.mass.off[e - 1] += m01;
        }
    }
    return p;
}

namespace detail {

inline double dot(const std::vector<double>& x, const std::vector<double>& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Pivots of the LDL^T factorization of A - sigma B. With conductances the
/// pivots are formed as k_i + s_i, where the Schur complement s_i of the
/// left part obeys
///     s_i = (k_{i-1} s_{i-1} - sigma b (2 k_{i-1} + sigma b)) / (k_{i-1} + s_{i-1}) - sigma m_ii.
/// That avoids the O(k) cancellation of the plain recursion, which swamps
/// lambda_1 when it is tiny against the stiffness scale (r0 close to the
/// model diameter, say).
inline std::vector<double> shifted_pivots(const WeightedProblem& p, double sigma)
{
    const auto& A = p.stiffness;
    const auto& B = p.mass;
    const std::size_t n = A.size();
    std::vector<double> d(n);
    if (p.conductance.size() == n) {
        const auto& k = p.conductance;
        double schur = -sigma * B.diag[0];
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) {
                const double sb = sigma * B.off[i - 1];
                const double denom = k[i - 1] + schur;
                schur = (k[i - 1] * schur - sb * (2.0 * k[i - 1] + sb)) / denom - sigma * B.diag[i];
            }
            d[i] = k[i] + schur;
            if (d[i] == 0.0) {
                d[i] = -1e-300;
                schur = d[i] - k[i];
            }
        }
        return d;
    }
    d[0] = A.diag[0] - sigma * B.diag[0];
    for (std::size_t i = 0;; ++i) {
        if (d[i] == 0.0) d[i] = -1e-300;
        if (i + 1 >= n) break;
        const double e = A.off[i] - sigma * B.off[i];
        d[i + 1] = (A.diag[i + 1] - sigma * B.diag[i + 1]) - e * e / d[i];
    }
    return d;
}

/// Solve (A - sigma B) x = rhs with the pivots above.
inline std::vector<double> solve_shifted(const WeightedProblem& p, double sigma, std::vector<double> rhs)
{
    const std::size_t n = rhs.size();
    const std::vector<double> d = shifted_pivots(p, sigma);
    auto coupling = [&](std::size_t i) { return p.stiffness.off[i] - sigma * p.mass.off[i]; };
    for (std::size_t i = 1; i < n; ++i) rhs[i] -= coupling(i - 1) * rhs[i - 1] / d[i - 1];
    rhs[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - coupling(i) * rhs[i + 1]) / d[i];
    for (double v : rhs) {
        if (!std::isfinite(v)) throw NonConvergenceError("singular shifted system in inverse iteration");
    }
    return rhs;
}

/// x^T A x, as a sum of squared differences when conductances are known.
inline double energy(const WeightedProblem& p, const std::vector<double>& x)
{
    const std::size_t n = x.size();
    if (p.conductance.size() != n) return dot(x, p.stiffness.multiply(x));
    double s = p.conductance[n - 1] * x[n - 1] * x[n - 1];
    for (std::size_t i = 0; i + 1 < n; ++i) s += p.conductance[i] * (x[i] - x[i + 1]) * (x[i] - x[i + 1]);
    return s;
}

} // namespace detail

struct DiscreteEigenpair {
    double lambda = 0.0;
    std::vector<double> vector; // B-normalized, positive
    std::size_t iterations = 0;
};

/// Number of eigenvalues of (A, B) below sigma: negative pivots of the
/// factorization of A - sigma B (Sylvester's law of inertia).
inline std::size_t eigenvalues_below(const WeightedProblem& p, double sigma)
{
    const std::vector<double> d = detail::shifted_pivots(p, sigma);
    return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](double v) { return v < 0.0; }));
}

/// Smallest generalized eigenpair of (A, B). A Sturm-count bisection isolates
/// the first eigenvalue from below, then inverse iteration with that fixed
/// shift converges fast even when the spectral gap is relatively small.
inline DiscreteEigenpair smallest_generalized_eigenpair(const WeightedProblem& p, std::size_t max_iterations = 200)
{
    const std::size_t n = p.stiffness.size();
    if (n == 0) throw InvalidInputError("empty eigenproblem");

    std::vector<double> x(n, 1.0);
    auto rayleigh = [&](const std::vector<double>& v) {
        return detail::energy(p, v) / detail::dot(v, p.mass.multiply(v));
    };
    double hi = rayleigh(x);
    for (int k = 0; k < 2; ++k) {
        x = detail::solve_shifted(p, 0.0, p.mass.multiply(x));
        hi = std::min(hi, rayleigh(x));
    }
    // Guard against a quotient that rounding pushed below lambda_1.
    hi *= 1.0 + 1e-12;
    for (int k = 0; k < 64 && eigenvalues_below(p, hi) == 0; ++k) hi *= 2.0;
    double lo = 0.0;
    if (eigenvalues_below(p, hi) == 0) throw NonConvergenceError("Sturm count found no eigenvalue below the Rayleigh quotient");
    for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eigenvalues_below(p, mid) == 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double sigma = lo;

    double rho = 0.0;
    double prev = kInf;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        const std::vector<double> bx = p.mass.multiply(x);
        std::vector<double> y = detail::solve_shifted(p, sigma, bx);
        // Quotient of the shifted inverse: no cancellation, unlike y^T A y.
        const double mu = detail::dot(y, bx) / detail::dot(x, bx);
        rho = sigma + 1.0 / mu;
        const double norm = std::sqrt(detail::dot(y, p.mass.multiply(y)));
        for (double& v : y) v /= norm;
        x = std::move(y);
        const double change = std::abs(rho - prev);
        if (it >= 1 && (change <= 1e-13 * std::abs(rho) || (it >= 10 && change <= 1e-11 * std::abs(rho)))) {
            // The first eigenvector has one sign; x[0] alone may be rounding noise.
            if (std::accumulate(x.begin(), x.end(), 0.0) < 0.0) {
                for (double& v : x) v = -v;
            }
            return {rho, std::move(x), it + 1};
        }
        prev = rho;
    }
    throw NonConvergenceError("inverse iteration did not converge (last change " + detail::format_number(std::abs(rho - prev) / std::abs(rho)) + ", shift " + detail::format_number(sigma) + ")");
}

enum class EigenMethod { matrix, shooting };

inline const char* to_string(EigenMethod m) { return m == EigenMethod::matrix ? "matrix" : "shooting"; }

struct EigenSolution {
    double lambda = 0.0;
    std::vector<double> grid;
    std::vector<double> phi;  // sup-normalized, nonnegative
    std::vector<double> dphi;
    EigenMethod method = EigenMethod::matrix;
    std::vector<double> refinement_history; // raw estimate per level (matrix) or bracket midpoints (shooting)
    std::vector<double> extrapolated_history;
    double flux_residual = 0.0;
    double support_start = 0.0;
    double r0 = 0.0;
};

namespace detail {

/// First-derivative weights at x0 for the given stencil (derivative of the
/// Lagrange interpolant).
inline std::vector<double> derivative_weights(double x0, const std::vector<double>& x)
{
    const std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            if (m == k) continue;
            double prod = 1.0 / (x[k] - x[m]);
            for (std::size_t l = 0; l < n; ++l) {
                if (l == k || l == m) continue;
                prod *= (x0 - x[l]) / (x[k] - x[l]);
            }
            sum += prod;
        }
        w[k] = sum;
    }
    return w;
}

/// Five-point finite-difference derivative of samples on a nonuniform grid.
inline std::vector<double> differentiate(const std::vector<double>& x, const std::vector<double>& f)
{
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    const std::size_t width = std::min<std::size_t>(5, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
        lo = std::min(lo, n - width);
        std::vector<double> xs(x.begin() + lo, x.begin() + lo + width);
        const auto w = derivative_weights(x[i], xs);
        double s = 0.0;
        for (std::size_t k = 0; k < width; ++k) s += w[k] * f[lo + k];
        d[i] = s;
    }
    return d;
}

inline double hermite_value(double t, double w, double f0, double f1, double d0, double d1)
{
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * w * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * w * d1;
}

inline double hermite_derivative(double t, double w, double f0, double f1, double d0, double d1)
{
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f0 + (-6 * t2 + 6 * t) * f1) / w + (3 * t2 - 4 * t + 1) * d0 + (3 * t2 - 2 * t) * d1;
}

} // namespace detail

/// Continuous eigenfunction: cubic Hermite interpolation of (phi, phi') and
/// zero extension beyond r0.
class Eigenfunction {
  public:
    explicit Eigenfunction(const EigenSolution& sol) : sol_(&sol) {}

    double lambda() const { return sol_->lambda; }
    const std::vector<double>& breakpoints() const { return sol_->grid; }

    double value(double theta) const { return eval(theta, false); }
    double derivative(double theta) const { return eval(theta, true); }

  private:
    double eval(double theta, bool deriv) const
    {
        const auto& g = sol_->grid;
        if (theta >= g.back()) return 0.0;
        if (theta < g.front()) throw DomainError("eigenfunction evaluated below its computed support");
        auto it = std::upper_bound(g.begin(), g.end(), theta);
        const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
        const double w = g[i + 1] - g[i];
        const double t = (theta - g[i]) / w;
        const auto& f = sol_->phi;
        const auto& d = sol_->dphi;
        return deriv ? detail::hermite_derivative(t, w, f[i], f[i + 1], d[i], d[i + 1])
                     : detail::hermite_value(t, w, f[i], f[i + 1], d[i], d[i + 1]);
    }

    const EigenSolution* sol_;
};

/// Normalized defect of the integrated equation
///     phi'(theta) h(theta) + lambda int_0^theta phi h = 0,
/// maximized over grid nodes and divided by lambda int_0^{r0} phi h.
inline double flux_identity_residual(const EigenSolution& sol, const Density& h)
{
    static const QuadratureRule rule = gauss_legendre_rule(8);
    const auto& g = sol.grid;
    const std::size_t n = g.size();
    const std::size_t q = rule.nodes.size();
    // Work with h / max h: model weights overflow double for large N.
    std::vector<double> lq((n - 1) * q);
    std::vector<double> hv(n);
    double lmax = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        hv[i] = h.log_value(g[i]);
        lmax = std::max(lmax, hv[i]);
        if (i + 1 == n) break;
        for (std::size_t k = 0; k < q; ++k) {
            lq[i * q + k] = h.log_value(g[i] + (g[i + 1] - g[i]) * rule.nodes[k]);
            lmax = std::max(lmax, lq[i * q + k]);
        }
    }
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double w = g[i + 1] - g[i];
        double s = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const double t = rule.nodes[k];
            const double phi = detail::hermite_value(t, w, sol.phi[i], sol.phi[i + 1], sol.dphi[i], sol.dphi[i + 1]);
            s += rule.weights[k] * phi * std::exp(lq[i * q + k] - lmax);
        }
        cumulative[i + 1] = cumulative[i] + s * w;
    }
    const double total = sol.lambda * cumulative.back();
    if (!(total > 0.0) || !std::isfinite(total)) return kInf;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::abs(sol.dphi[i] * std::exp(hv[i] - lmax) + sol.lambda * cumulative[i]) / total;
        worst = std::isnan(r) ? kInf : std::max(worst, r);
    }
    return worst;
}

struct EigenOptions {
    GridSpec grid{};
    std::size_t max_refinements = 4;
};

namespace detail {

inline void require_tolerance(double tol)
{
    if (!(tol > 1e-12 && tol < 1e-3)) throw InvalidInputError("solver tolerance must lie in (1e-12, 1e-3)");
}

inline void normalize_sup(std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    for (double& x : v) x /= m;
}

} // namespace detail

/// First Dirichlet eigenpair by the finite-element route. The grid is doubled
/// until two successive Richardson-extrapolated estimates agree to `tol`
/// relatively; the eigenfunction is the extrapolated nodal vector.
inline EigenSolution first_dirichlet_eigen(const Density& h, double r0, double tol = 1e-8, EigenOptions opts = {})
{
    detail::require_tolerance(tol);
    validate_eigen_inputs(h, r0);
    const double start = effective_support_start(h, r0);

    EigenSolution sol;
    sol.method = EigenMethod::matrix;
    sol.r0 = r0;
    sol.support_start = start;

    // Large-N model spaces are truncated; they are solved in Liouville form.
    const auto* model = h.as_model();
    const bool liouville = model != nullptr && start > 0.0;

    // Full nodal vectors including the Dirichlet nodes.
    auto solve_level = [&](const GridSpec& spec, std::vector<double>& nodes, std::vector<double>& full) {
        WeightedProblem p = liouville ? assemble_liouville_problem(model->K, model->N, r0, spec, start)
                                      : assemble_weighted_problem(h, r0, spec, start);
        DiscreteEigenpair pair = smallest_generalized_eigenpair(p);
        full.assign(p.nodes.size(), 0.0);
        std::copy(pair.vector.begin(), pair.vector.end(), full.begin() + (liouville ? 1 : 0));
        nodes = std::move(p.nodes);
        return pair.lambda;
    };

    GridSpec spec = opts.grid;
    std::vector<double> coarse_nodes;
    std::vector<double> coarse_vec;
    std::vector<double> fine_vec;
    std::vector<double> fine_nodes;
    bool converged = false;
    for (std::size_t level = 0; level <= opts.max_refinements; ++level, spec = spec.refined()) {
        coarse_nodes = std::move(fine_nodes);
        coarse_vec = std::move(fine_vec);
        sol.refinement_history.push_back(solve_level(spec, fine_nodes, fine_vec));
        if (level >= 1) {
            const auto& raw = sol.refinement_history;
            sol.extrapolated_history.push_back((4.0 * raw[level] - raw[level - 1]) / 3.0);
        }
        const auto& ext = sol.extrapolated_history;
        if (ext.size() >= 2) {
            const double a = ext[ext.size() - 1];
            const double b = ext[ext.size() - 2];
            if (std::abs(a - b) <= tol * std::abs(a)) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        throw NonConvergenceError("grid refinement budget exhausted before reaching relative tolerance " + detail::format_number(tol));
    }
    sol.lambda = sol.extrapolated_history.back();

    // Extrapolate the nodal vector on the coarse grid of the last pair. Both
    // vectors are B-normalized, so they agree to O(width^2) without rescaling.
    std::vector<double> phi(coarse_nodes.size(), 0.0);
    for (std::size_t i = 0; i < coarse_nodes.size(); ++i) {
        // At rounding level (deep in the cut region) the two levels disagree
        // in sign; keep the fine value there.
        const double ext = (4.0 * fine_vec[2 * i] - coarse_vec[i]) / 3.0;
        phi[i] = ext > 0.0 ? ext : std::max(fine_vec[2 * i], 0.0);
    }
    if (liouville) {
        // phi = u / sqrt(h) and phi' = (u' - u (log h)'/2) / sqrt(h), with the
        // derivative taken on the smooth u. Scales are handled in logs; the
        // Dirichlet node at the cut is replaced by log-linear extrapolation.
        const std::vector<double> du = detail::differentiate(coarse_nodes, phi);
        const std::size_t m = phi.size();
        std::vector<double> half_log_h(m);
        double top = -kInf;
        for (std::size_t i = 0; i < m; ++i) {
            half_log_h[i] = 0.5 * h.log_value(coarse_nodes[i]);
            if (i > 0 && phi[i] > 0.0) top = std::max(top, std::log(phi[i]) - half_log_h[i]);
        }
        std::vector<double> out(m, 0.0);
        std::vector<double> dout(m, 0.0);
        for (std::size_t i = 1; i < m; ++i) {
            const double f = std::exp(-half_log_h[i] - top);
            out[i] = phi[i] * f;
            dout[i] = (du[i] - phi[i] * h.log_derivative(coarse_nodes[i]) * 0.5) * f;
        }
        if (out[1] > 0.0 && out[2] > 0.0) {
            out[0] = out[1] * out[1] / out[2];
            dout[0] = dout[1] * out[0] / out[1];
        } else {
            out[0] = out[1];
            dout[0] = dout[1];
        }
        const double peak = std::max(out[0], 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            out[i] /= peak;
            dout[i] /= peak;
        }
        sol.grid = std::move(coarse_nodes);
        sol.phi = std::move(out);
        sol.dphi = std::move(dout);
        sol.phi.back() = 0.0;
    } else {
        detail::normalize_sup(phi);
        sol.grid = std::move(coarse_nodes);
        sol.dphi = detail::differentiate(sol.grid, phi);
        sol.phi = std::move(phi);
    }
    sol.flux_residual = flux_identity_residual(sol, h);
    return sol;
}

// ---------------------------------------------------------------------------
// Shooting
// ---------------------------------------------------------------------------

namespace detail {

using OdeState = std::array<double, 2>;

struct ShootingStart {
    double theta = 0.0;
    OdeState state{1.0, 0.0};
};

inline ShootingStart shooting_start(const Density& h, double r0, double support_start, double lambda)
{
    if (support_start > 0.0) return {support_start, {1.0, 0.0}};
    // phi(eps) = 1, phi'(eps) = -lambda eps / N_loc, the leading term of the
    // flux identity for h ~ c theta^{N_loc - 1}.
    const double eps = r0 * 1e-6;
    const double n_loc = 1.0 + eps * h.log_derivative(eps);
    return {eps, {1.0, -lambda * eps / n_loc}};
}

/// Integrate phi'' + (log h)' phi' + lambda phi = 0 from `from` to `to`. The
/// equation is linear, so the state is renormalized after every step and the
/// removed factor accumulated in log_scale; this keeps the tolerances
/// meaningful when phi changes by hundreds of orders of magnitude. Internally
/// the second component is phi' / sqrt(lambda), which puts both components on
/// the same scale for the error control even when lambda is tiny.
inline void integrate_eigen_ode(const Density& h, double lambda, double from, OdeState& state, double to,
                                double& log_scale, int* sign_changes = nullptr)
{
    namespace odeint = boost::numeric::odeint;
    const double freq = std::sqrt(std::max(lambda, 1e-300));
    auto rhs = [&](const OdeState& y, OdeState& dy, double theta) {
        dy[0] = freq * y[1];
        dy[1] = -h.log_derivative(theta) * y[1] - freq * y[0];
    };
    // Cash-Karp has no first-same-as-last cache, so rescaling between steps is safe.
    auto stepper = odeint::make_controlled(1e-13, 1e-12, odeint::runge_kutta_cash_karp54<OdeState>());
    OdeState y{state[0], state[1] / freq};
    double t = from;
    double dt = (to - from) * 1e-3;
    for (std::size_t attempts = 0; t < to; ++attempts) {
        if (attempts > 2000000) throw StiffnessError("shooting integrator exceeded its step budget");
        if (t + dt > to) dt = to - t;
        const double before = y[0];
        if (stepper.try_step(rhs, y, t, dt) == odeint::success) {
            if (sign_changes && ((before > 0.0 && y[0] <= 0.0) || (before < 0.0 && y[0] >= 0.0))) ++*sign_changes;
            const double m = std::max(std::abs(y[0]), std::abs(y[1]));
            if (m > 0.0 && std::isfinite(m)) {
                y[0] /= m;
                y[1] /= m;
                log_scale += std::log(m);
            }
            if (to - t <= 1e-15 * std::abs(to)) break;
        } else if (dt < 1e-15 * std::max(std::abs(t), 1e-300)) {
            throw StiffnessError("step control failed in the shooting integrator near theta = " + detail::format_number(t));
        }
    }
    state = {y[0], y[1] * freq};
}

/// Number of zeros of phi on (0, r0], counting a nonpositive end value. By
/// Sturm oscillation this equals the number of eigenvalues <= lambda.
inline int shoot_to_end(const Density& h, double r0, double support_start, double lambda)
{
    ShootingStart s = shooting_start(h, r0, support_start, lambda);
    double log_scale = 0.0;
    int zeros = 0;
    integrate_eigen_ode(h, lambda, s.theta, s.state, r0, log_scale, &zeros);
    return zeros;
}

} // namespace detail

/// Eigenvalue by bisection on the zero count of phi: the first eigenvalue is
/// where phi first acquires a zero in (0, r0]. The bracket must satisfy
/// lambda_1 in (lo, hi].
inline double shoot_eigen(const Density& h, double r0, std::pair<double, double> bracket, double tol = 1e-8,
                          std::vector<double>* history = nullptr, std::optional<double> support_start = std::nullopt)
{
    detail::require_tolerance(tol);
    validate_eigen_inputs(h, r0);
    auto [lo, hi] = bracket;
    if (!(lo > 0.0 && hi > lo)) throw BracketError("shooting bracket must satisfy 0 < lo < hi");
    const double start = support_start ? *support_start : effective_support_start(h, r0);
    auto below = [&](double lambda) { return detail::shoot_to_end(h, r0, start, lambda) == 0; };
    if (!below(lo) || below(hi)) {
        throw BracketError("shooting bracket [" + detail::format_number(lo) + ", " + detail::format_number(hi) +
                           "] does not enclose the first eigenvalue");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-3 * tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (history) history->push_back(mid);
        if (below(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Shooting route packaged as an EigenSolution. The bracket comes from the
/// finite-element estimate widened by 10% on each side unless supplied.
inline EigenSolution shooting_dirichlet_eigen(const Density& h, double r0, double tol = 1e-8,
                                              std::optional<std::pair<double, double>> bracket = std::nullopt,
                                              GridSpec grid = {})
{
    detail::require_tolerance(tol);
    validate_eigen_inputs(h, r0);
    EigenSolution sol;
    sol.method = EigenMethod::shooting;
    sol.r0 = r0;
    if (!bracket) {
        const EigenSolution guess = first_dirichlet_eigen(h, r0, std::max(tol, 1e-6));
        bracket = std::make_pair(0.9 * guess.lambda, 1.1 * guess.lambda);
        sol.support_start = guess.support_start;
    } else {
        sol.support_start = effective_support_start(h, r0);
    }
    sol.lambda = shoot_eigen(h, r0, *bracket, tol, &sol.refinement_history, sol.support_start);

    sol.grid = make_grid(grid, sol.support_start, r0);
    sol.phi.assign(sol.grid.size(), 0.0);
    sol.dphi.assign(sol.grid.size(), 0.0);
    detail::ShootingStart s = detail::shooting_start(h, r0, sol.support_start, sol.lambda);
    // Values are carried as (mantissa, log scale) and normalized at the end.
    std::vector<double> logs(sol.grid.size(), 0.0);
    double log_scale = 0.0;
    std::size_t i = 0;
    if (sol.grid[0] < s.theta) {
        // theta = 0: the regular solution is flat there.
        sol.phi[0] = s.state[0];
        sol.dphi[0] = 0.0;
        i = 1;
    }
    double at = s.theta;
    for (; i < sol.grid.size(); ++i) {
        if (sol.grid[i] > at) {
            detail::integrate_eigen_ode(h, sol.lambda, at, s.state, sol.grid[i], log_scale);
            at = sol.grid[i];
        }
        sol.phi[i] = s.state[0];
        sol.dphi[i] = s.state[1];
        logs[i] = log_scale;
    }
    double top = -kInf;
    for (std::size_t k = 0; k < sol.phi.size(); ++k) {
        if (sol.phi[k] != 0.0) top = std::max(top, logs[k] + std::log(std::abs(sol.phi[k])));
    }
    for (std::size_t k = 0; k < sol.phi.size(); ++k) {
        const double f = std::exp(logs[k] - top);
        sol.phi[k] *= f;
        sol.dphi[k] *= f;
    }
    sol.phi.back() = 0.0;
    sol.flux_residual = flux_identity_residual(sol, h);
    return sol;
}

} // namespace modeleig
