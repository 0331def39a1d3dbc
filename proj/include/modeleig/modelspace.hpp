#pragma once

// Coefficient functions of the one-dimensional model spaces, the model
// densities h_{K,N}, general densities on an interval, and a brute-force
// validator for the one-dimensional CD(K,N) inequality.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "modeleig/errors.hpp"

namespace modeleig {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

// Below this value of |kappa| * theta^2 the trigonometric/hyperbolic branches
// are replaced by their Taylor series in kappa.
inline constexpr double kSeriesSwitch = 1e-8;

inline void require_dimension(double N)
{
    if (!(N > 1.0) || !std::isfinite(N)) {
        throw DomainError("dimension parameter N must satisfy N > 1 (got " + detail::format_number(N) + ")");
    }
}

} // namespace detail

/// Generalized sine: sin(sqrt(k) t)/sqrt(k), t, or sinh(sqrt(-k) t)/sqrt(-k).
inline double s_kappa(double kappa, double theta)
{
    const double x = kappa * theta * theta;
    if (std::abs(x) < detail::kSeriesSwitch) {
        return theta * (1.0 - x / 6.0 + x * x / 120.0);
    }
    if (kappa > 0.0) {
        const double r = std::sqrt(kappa);
        return std::sin(r * theta) / r;
    }
    const double r = std::sqrt(-kappa);
    return std::sinh(r * theta) / r;
}

/// Derivative of s_kappa with respect to theta (the generalized cosine).
inline double c_kappa(double kappa, double theta)
{
    const double x = kappa * theta * theta;
    if (std::abs(x) < detail::kSeriesSwitch) {
        return 1.0 - x / 2.0 + x * x / 24.0;
    }
    if (kappa > 0.0) {
        return std::cos(std::sqrt(kappa) * theta);
    }
    return std::cosh(std::sqrt(-kappa) * theta);
}

/// log s_kappa(theta), finite where s_kappa itself would overflow.
inline double log_s_kappa(double kappa, double theta)
{
    if (kappa < 0.0) {
        const double r = std::sqrt(-kappa);
        const double x = r * theta;
        if (x > 20.0) return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x)) - std::log(r);
    }
    return std::log(s_kappa(kappa, theta));
}

/// c_kappa / s_kappa, finite where both overflow.
inline double cot_kappa(double kappa, double theta)
{
    if (kappa < 0.0) {
        const double r = std::sqrt(-kappa);
        const double x = r * theta;
        if (x > 20.0) return r / std::tanh(x);
    }
    return c_kappa(kappa, theta) / s_kappa(kappa, theta);
}

/// theta - s_kappa(theta) without cancellation for small kappa*theta^2.
inline double theta_minus_s_kappa(double kappa, double theta)
{
    const double x = kappa * theta * theta;
    if (std::abs(x) < 0.1) {
        // theta * sum_{k>=1} (-1)^{k+1} x^k / (2k+1)!
        double term = theta;
        double sum = 0.0;
        for (int k = 1; k < 30; ++k) {
            term *= -x / static_cast<double>((2 * k) * (2 * k + 1));
            sum -= term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return theta - s_kappa(kappa, theta);
}

/// sigma_kappa^{(t)}(theta) = s_kappa(t theta) / s_kappa(theta), with value t at theta = 0.
inline double sigma_coeff(double kappa, double t, double theta)
{
    if (kappa > 0.0 && theta >= std::numbers::pi / std::sqrt(kappa)) {
        throw DomainError("sigma coefficient undefined at or beyond pi/sqrt(kappa)");
    }
    if (theta == 0.0) return t;
    if (t == 0.0) return 0.0;
    if (t == 1.0) return 1.0;
    return s_kappa(kappa, t * theta) / s_kappa(kappa, theta);
}

/// Model diameter D_{K,N}: pi sqrt((N-1)/K) for K > 0, infinite otherwise.
inline double max_diameter(double K, double N)
{
    detail::require_dimension(N);
    if (K > 0.0) return std::numbers::pi * std::sqrt((N - 1.0) / K);
    return kInf;
}

/// tau_{K,N}^{(t)}(theta); +infinity at or beyond D_{K,N}, zero for t = 0.
inline double tau_coeff(double K, double N, double t, double theta)
{
    detail::require_dimension(N);
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("tau coefficient requires t in [0,1]");
    if (t == 0.0) return 0.0;
    if (theta >= max_diameter(K, N)) return kInf;
    const double sigma = sigma_coeff(K / (N - 1.0), t, theta);
    return std::pow(t, 1.0 / N) * std::pow(sigma, (N - 1.0) / N);
}

/// Model density h_{K,N}(theta) = s_{K/(N-1)}(theta)^{N-1}.
inline double model_density(double K, double N, double theta)
{
    detail::require_dimension(N);
    if (theta < 0.0) throw DomainError("model density evaluated at negative theta");
    const double D = max_diameter(K, N);
    if (theta > D) throw DomainError("model density evaluated beyond the model diameter");
    if (theta == 0.0 || theta == D) return 0.0;
    return std::pow(s_kappa(K / (N - 1.0), theta), N - 1.0);
}

/// Natural logarithm of h_{K,N}; -infinity at the zeros.
inline double log_model_density(double K, double N, double theta)
{
    detail::require_dimension(N);
    const double D = max_diameter(K, N);
    if (theta < 0.0 || theta > D) throw DomainError("model density evaluated outside [0, D_{K,N}]");
    if (theta == 0.0 || theta == D) return -kInf;
    return (N - 1.0) * log_s_kappa(K / (N - 1.0), theta);
}

/// (log h_{K,N})'(theta) = (N-1) c_kappa / s_kappa.
inline double model_log_derivative(double K, double N, double theta)
{
    return (N - 1.0) * cot_kappa(K / (N - 1.0), theta);
}

/// A nonnegative weight h on [0, right_endpoint]; the measure is h times length.
///
/// Either the closed-form model density (times a positive scale) or a sampled
/// profile. Sampled profiles interpolate h^{1/(N-1)} piecewise linearly once a
/// dimension is bound; unbound profiles interpolate h itself.
class Density {
  public:
    struct Model {
        double K;
        double N;
    };
    struct Sampled {
        std::vector<double> theta;
        std::vector<double> h;
        std::optional<double> dimension;
        std::vector<double> root; // h^{1/(N-1)} (or h when no dimension is bound)
    };

    static Density model(double K, double N, double scale = 1.0)
    {
        detail::require_dimension(N);
        if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("density scale must be positive");
        Density d;
        d.kind_ = Model{K, N};
        d.scale_ = scale;
        return d;
    }

    static Density sampled(std::vector<double> theta, std::vector<double> h,
                           std::optional<double> dimension = std::nullopt)
    {
        if (theta.size() != h.size()) throw InvalidInputError("sampled density: grid and values differ in length");
        if (theta.size() < 2) throw InvalidInputError("sampled density needs at least 2 nodes");
        if (theta.front() != 0.0) throw InvalidInputError("sampled density grid must start at theta = 0");
        for (std::size_t i = 1; i < theta.size(); ++i) {
            if (!(theta[i] > theta[i - 1])) {
                throw MonotonicityError("sampled density grid not strictly increasing at node " + std::to_string(i));
            }
        }
        bool any_positive = false;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (!(h[i] >= 0.0) || !std::isfinite(h[i])) {
                throw NegativeValueError("sampled density value at node " + std::to_string(i) + " is negative or not finite");
            }
            any_positive = any_positive || h[i] > 0.0;
        }
        if (!any_positive) throw InvalidInputError("sampled density vanishes identically");
        if (dimension) detail::require_dimension(*dimension);
        Density d;
        Sampled s{std::move(theta), std::move(h), dimension, {}};
        rebuild_root(s);
        d.kind_ = std::move(s);
        return d;
    }

    /// Constant density c on [0, length].
    static Density constant(double c, double length)
    {
        if (!(c > 0.0)) throw DomainError("constant density must be positive");
        return sampled({0.0, length}, {c, c});
    }

    bool is_model() const { return std::holds_alternative<Model>(kind_); }
    const Model* as_model() const { return std::get_if<Model>(&kind_); }
    const Sampled* as_sampled() const { return std::get_if<Sampled>(&kind_); }
    double scale() const { return scale_; }

    /// Copy with the interpolation dimension set (no-op for model densities
    /// and for profiles that already carry one).
    Density bound_to(double N) const
    {
        Density d = *this;
        if (auto* s = std::get_if<Sampled>(&d.kind_); s && !s->dimension) {
            detail::require_dimension(N);
            s->dimension = N;
            rebuild_root(*s);
        }
        return d;
    }

    double right_endpoint() const
    {
        if (const auto* m = as_model()) return max_diameter(m->K, m->N);
        return as_sampled()->theta.back();
    }

    double operator()(double theta) const
    {
        if (const auto* m = as_model()) return scale_ * model_density(m->K, m->N, theta);
        const auto& s = *as_sampled();
        return scale_ * std::pow(root_at(s, theta), root_power(s));
    }

    double log_value(double theta) const
    {
        if (const auto* m = as_model()) return std::log(scale_) + log_model_density(m->K, m->N, theta);
        const auto& s = *as_sampled();
        const double g = root_at(s, theta);
        if (g <= 0.0) return -kInf;
        return std::log(scale_) + root_power(s) * std::log(g);
    }

    /// (log h)'(theta) in the interior of the support.
    double log_derivative(double theta) const
    {
        if (const auto* m = as_model()) return model_log_derivative(m->K, m->N, theta);
        const auto& s = *as_sampled();
        const std::size_t i = segment(s, theta);
        const double slope = (s.root[i + 1] - s.root[i]) / (s.theta[i + 1] - s.theta[i]);
        return root_power(s) * slope / root_at(s, theta);
    }

    /// True if the density vanishes at some node strictly inside (0, b).
    bool has_interior_zero(double b) const
    {
        if (const auto* m = as_model()) return b > max_diameter(m->K, m->N);
        const auto& s = *as_sampled();
        for (std::size_t i = 1; i < s.theta.size(); ++i) {
            if (s.theta[i] < b && s.h[i] == 0.0) return true;
        }
        return false;
    }

  private:
    static double root_power(const Sampled& s) { return s.dimension ? *s.dimension - 1.0 : 1.0; }

    static void rebuild_root(Sampled& s)
    {
        s.root.resize(s.h.size());
        const double p = root_power(s);
        for (std::size_t i = 0; i < s.h.size(); ++i) s.root[i] = p == 1.0 ? s.h[i] : std::pow(s.h[i], 1.0 / p);
    }

    static std::size_t segment(const Sampled& s, double theta)
    {
        if (theta < 0.0 || theta > s.theta.back()) throw DomainError("sampled density evaluated outside its grid");
        auto it = std::upper_bound(s.theta.begin(), s.theta.end(), theta);
        std::size_t i = static_cast<std::size_t>(it - s.theta.begin());
        i = i == 0 ? 0 : i - 1;
        return std::min(i, s.theta.size() - 2);
    }

    static double root_at(const Sampled& s, double theta)
    {
        const std::size_t i = segment(s, theta);
        const double w = (theta - s.theta[i]) / (s.theta[i + 1] - s.theta[i]);
        if (w == 0.0) return s.root[i];
        if (w == 1.0) return s.root[i + 1];
        return (1.0 - w) * s.root[i] + w * s.root[i + 1];
    }

    std::variant<Model, Sampled> kind_{Model{0.0, 2.0}};
    double scale_ = 1.0;
};

// ---------------------------------------------------------------------------
// CD(K,N) density validator
// ---------------------------------------------------------------------------

struct CdLattice {
    std::size_t theta_count = 64;
    std::size_t t_count = 17;
};

struct CdWitness {
    double theta0 = 0.0;
    double theta1 = 0.0;
    double t = 0.0;
};

struct CdCheckReport {
    bool satisfied = true;
    double worst_violation = 0.0; // most negative slack found (0 when none)
    CdWitness witness;
    std::size_t triples_checked = 0;
};

/// Slack of the CD(K,N) inequality at one triple, measured on g = h^{1/(N-1)}:
/// g((1-t) a + t b) - sigma^{(1-t)}(|b-a|) g(a) - sigma^{(t)}(|b-a|) g(b).
template <class RootFn>
double cd_slack(const RootFn& g, double K, double N, double a, double b, double t)
{
    const double kappa = K / (N - 1.0);
    const double dist = std::abs(b - a);
    const double mid = (1.0 - t) * a + t * b;
    return g(mid) - sigma_coeff(kappa, 1.0 - t, dist) * g(a) - sigma_coeff(kappa, t, dist) * g(b);
}

/// Brute-force scan of the CD(K,N) inequality over a lattice of triples in
/// [lo, hi]. Theta nodes are interior lattice points; t includes 0, 1/2, 1.
/// Slack is normalized by the largest value of h^{1/(N-1)} on the lattice, so
/// the verdict is invariant under h -> c h.
inline CdCheckReport check_cd_density(const Density& density, double K, double N, double lo, double hi,
                                      CdLattice lattice = {}, double tolerance = 1e-9)
{
    detail::require_dimension(N);
    if (!(lo >= 0.0 && hi > lo)) throw DomainError("CD check interval must satisfy 0 <= lo < hi");
    if (hi > density.right_endpoint()) throw DomainError("CD check interval exceeds the density domain");
    if (K > 0.0 && hi - lo >= max_diameter(K, N)) {
        throw DomainError("CD check interval length reaches D_{K,N}; sigma coefficients are undefined");
    }
    if (lattice.theta_count < 2 || lattice.t_count < 3) throw InvalidInputError("CD lattice too coarse");

    const Density h = density.bound_to(N);
    const std::size_t n = lattice.theta_count;
    std::vector<double> nodes(n);
    std::vector<double> roots(n);
    double root_max = 0.0;
    const double inv_power = 1.0 / (N - 1.0);
    auto root = [&](double x) { return std::pow(h(x), inv_power); };
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(n + 1);
        roots[i] = root(nodes[i]);
        root_max = std::max(root_max, roots[i]);
    }
    if (!(root_max > 0.0)) throw InvalidInputError("density vanishes on the whole CD check lattice");

    std::vector<double> ts(lattice.t_count);
    for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = static_cast<double>(k) / static_cast<double>(ts.size() - 1);

    const double kappa = K / (N - 1.0);
    CdCheckReport report;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = nodes[i];
            const double b = nodes[j];
            const double dist = std::abs(b - a);
            for (double t : ts) {
                const double mid = (1.0 - t) * a + t * b;
                const double g_mid = t == 0.0 ? roots[i] : (t == 1.0 ? roots[j] : root(mid));
                const double rhs = sigma_coeff(kappa, 1.0 - t, dist) * roots[i] + sigma_coeff(kappa, t, dist) * roots[j];
                const double slack = (g_mid - rhs) / root_max;
                ++report.triples_checked;
                if (slack < report.worst_violation) {
                    report.worst_violation = slack;
                    report.witness = {a, b, t};
                }
            }
        }
    }
    report.satisfied = report.worst_violation >= -tolerance;
    return report;
}

} // namespace modeleig
