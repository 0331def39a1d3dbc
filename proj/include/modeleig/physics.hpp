#pragma once

// Spin-2 Kaluza-Klein mass bounds for warped compactifications. The internal
// space with warp gradient bounded by sigma_w behaves as a CD(K(N), N) space
// for every N > n = D - d, so m_j^2 <= lambda_{K(N), N, diam/(2j)} for all such
// N and the bound may be minimized over N.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modeleig/bounds.hpp"
#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"

namespace modeleig {

struct CompactificationSpec {
    int D = 10;          // total dimension
    int d = 4;           // spacetime dimension
    double Lambda = 0.0; // cosmological constant
    double sigma_w = 0.0; // sup |grad f|
    double diam = 1.0;   // diameter of the internal space

    int internal_dimension() const { return D - d; }

    void validate() const
    {
        if (!(d >= 1 && D > d)) throw DomainError("compactification needs D > d >= 1");
        if (D <= 2) throw DomainError("compactification needs D > 2");
        if (!std::isfinite(Lambda)) throw DomainError("Lambda must be finite");
        if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w)) throw DomainError("sigma_w must be finite and nonnegative");
        if (!(diam > 0.0) || !std::isfinite(diam)) throw DomainError("diameter must be positive and finite");
    }
};

/// K(N) = Lambda - (N + d - 2) sigma_w^2 / ((D - 2)(N - D + d)).
inline double kk_curvature(const CompactificationSpec& spec, double N)
{
    spec.validate();
    const double n = spec.internal_dimension();
    if (!(N > n) || !std::isfinite(N)) throw DomainError("synthetic dimension must satisfy N > D - d");
    const double s2 = spec.sigma_w * spec.sigma_w;
    if (s2 == 0.0) return spec.Lambda;
    return spec.Lambda - (N + spec.d - 2.0) * s2 / ((spec.D - 2.0) * (N - n));
}

struct KkEvaluation {
    double value = 0.0;
    bool exact = true;
    double K = 0.0;
};

/// lambda_{K(N), N, diam/(2j)} by the requested method.
inline KkEvaluation kk_mass_bound_at(const CompactificationSpec& spec, int j, double N,
                                     BoundMethod method = BoundMethod::solver, double tol = 1e-8)
{
    if (j < 1) throw DomainError("mode index j must be a positive integer");
    const double K = kk_curvature(spec, N);
    const double r0 = spec.diam / (2.0 * j);
    if (K > 0.0 && r0 >= max_diameter(K, N)) {
        throw DomainError("diam/(2j) reaches D_{K(N),N}; N = " + detail::format_number(N) + " is infeasible");
    }
    if (method == BoundMethod::closed_form) {
        const BoundValue b = closed_form_bound(K, N, r0);
        return {b.value, b.exact, K};
    }
    return {model_eigenvalue(K, N, r0, tol), true, K};
}

struct KkSearch {
    std::size_t grid_points = 200;
    double golden_rel_tol = 1e-6;
    bool keep_profile = false;
    double solver_tol = 1e-8;
};

struct KkBoundResult {
    int j = 1;
    double N_star = 0.0;
    double K_star = 0.0;
    double bound = 0.0;
    bool exact = false;
    BoundMethod method = BoundMethod::solver;
    bool bracketed = true;
    std::string diagnostic;
    std::vector<std::pair<double, double>> profile; // (N, bound(N)); +inf where infeasible
};

namespace detail {

inline double kk_objective(const CompactificationSpec& spec, int j, double N, BoundMethod method, double tol)
{
    const double K = kk_curvature(spec, N);
    const double r0 = spec.diam / (2.0 * j);
    if (K > 0.0 && r0 >= max_diameter(K, N)) return kInf;
    return kk_mass_bound_at(spec, j, N, method, tol).value;
}

} // namespace detail

/// Minimize the bound over N in (D-d, 1000 (D-d)]: logarithmic grid scan from
/// D-d+1e-3 to bracket the minimum, then golden-section search in log N.
/// Infeasible N (K(N) > 0 with diam/(2j) >= D_{K,N}) count as +infinity.
inline KkBoundResult kk_mass_bound_optimal(const CompactificationSpec& spec, int j,
                                           BoundMethod method = BoundMethod::closed_form, KkSearch search = {})
{
    spec.validate();
    if (j < 1) throw DomainError("mode index j must be a positive integer");
    if (search.grid_points < 3) throw InvalidInputError("N grid needs at least 3 points");
    if (!(search.golden_rel_tol > 0.0)) throw InvalidInputError("golden-section tolerance must be positive");

    const double n = spec.internal_dimension();
    const double lo = std::log(n + 1e-3);
    const double hi = std::log(1e3 * n);
    const std::size_t m = search.grid_points;
    auto objective = [&](double logN) { return detail::kk_objective(spec, j, std::exp(logN), method, search.solver_tol); };

    std::vector<double> xs(m);
    std::vector<double> fs(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
        fs[i] = objective(xs[i]);
    }

    KkBoundResult result;
    result.j = j;
    result.method = method;
    if (search.keep_profile) {
        for (std::size_t i = 0; i < m; ++i) result.profile.emplace_back(std::exp(xs[i]), fs[i]);
    }
    const std::size_t best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    if (!std::isfinite(fs[best])) throw DomainError("no feasible N in the scanned range");

    double x_star = xs[best];
    double f_star = fs[best];
    if (best == 0 || best + 1 == m) {
        result.bracketed = false;
        result.diagnostic = std::string("objective is monotone over the scanned N range; minimum at the ") +
                            (best == 0 ? "lower" : "upper") + " end";
    } else {
        // Golden-section search on [x_{best-1}, x_{best+1}] in log N.
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = xs[best - 1];
        double b = xs[best + 1];
        double c = b - g * (b - a);
        double e = a + g * (b - a);
        double fc = objective(c);
        double fe = objective(e);
        // Relative tolerance on N translates to absolute tolerance on log N.
        while (b - a > search.golden_rel_tol) {
            if (fc <= fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - g * (b - a);
                fc = objective(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + g * (b - a);
                fe = objective(e);
            }
        }
        const double x = 0.5 * (a + b);
        const double fx = objective(x);
        if (fx < f_star) {
            x_star = x;
            f_star = fx;
        }
    }
    result.N_star = std::exp(x_star);
    const KkEvaluation at = kk_mass_bound_at(spec, j, result.N_star, method, search.solver_tol);
    result.K_star = at.K;
    result.bound = at.value;
    result.exact = at.exact;
    return result;
}

/// Weighted Laplacian Delta_f psi = -psi'' - f' psi' (positive convention, so
/// the model eigenfunction with f = log h gives lambda psi) at the interior
/// nodes of a nonuniform 1-D grid, by three-point differences.
inline std::vector<double> weighted_laplacian_apply(const std::vector<double>& psi, const std::vector<double>& f,
                                                    const std::vector<double>& grid)
{
    if (psi.size() != grid.size() || f.size() != grid.size()) {
        throw InvalidInputError("psi, f and grid must have the same number of samples");
    }
    if (grid.size() < 3) throw InvalidInputError("weighted Laplacian needs at least 3 grid nodes");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw MonotonicityError("grid not strictly increasing at node " + std::to_string(i));
    }
    std::vector<double> out(grid.size() - 2);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double hm = grid[i] - grid[i - 1];
        const double hp = grid[i + 1] - grid[i];
        // Three-point weights for the first and second derivative.
        const double a = -hp / (hm * (hm + hp));
        const double b = (hp - hm) / (hm * hp);
        const double c = hm / (hp * (hm + hp));
        const double d1psi = a * psi[i - 1] + b * psi[i] + c * psi[i + 1];
        const double d1f = a * f[i - 1] + b * f[i] + c * f[i + 1];
        const double d2psi = 2.0 * (hm * psi[i + 1] - (hm + hp) * psi[i] + hp * psi[i - 1]) / (hm * hp * (hm + hp));
        out[i - 1] = -d2psi - d1f * d1psi;
    }
    return out;
}

} // namespace modeleig
