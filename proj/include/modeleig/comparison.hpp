#pragma once

// One-dimensional comparison inequality
//
//     int_0^theta (phi')^2 h  <=  lambda int_0^theta phi^2 h,
//
// where (lambda, phi) is the first Dirichlet eigenpair of the MODEL density on
// [0, r0] and h is any CD(K,N) density defined on [0, r0]. Equality at
// theta = r0 characterizes h = c h_{K,N}.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

#include "modeleig/eigensolve.hpp"
#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"
#include "modeleig/quadrature.hpp"

namespace modeleig {

struct ComparisonOptions {
    double solver_tol = 1e-10;
    IntegralOptions quadrature{};
    /// Skip the CD(K,N) pre-check (negative testing only).
    bool waive_cd_check = false;
    CdLattice lattice{};
    /// Looser than the validator default: piecewise-linear interpolation of
    /// a convex h^{1/(N-1)} (K < 0) violates the condition at O(spacing^2).
    double cd_tol = 1e-6;

    /// 2 * solver tolerance + 10 * quadrature tolerance.
    double composed_tolerance() const { return 2.0 * solver_tol + 10.0 * quadrature.rel_tol; }
};

struct ComparisonReport {
    double theta = 0.0;
    double lhs = 0.0; // int_0^theta (phi')^2 dm
    double rhs = 0.0; // lambda int_0^theta phi^2 dm
    double gap = 0.0; // rhs - lhs
    double relative_gap = 0.0;
    double lambda = 0.0;
    double tolerance = 0.0;
};

struct RigidityVerdict {
    bool rigid = false;
    std::optional<double> fitted_c;
    double max_relative_density_deviation = 0.0;
    double relative_gap = 0.0;
};

/// Model eigenpair reused across several theta or densities with the same
/// (K, N, r0).
class ModelEigenpair {
  public:
    ModelEigenpair(double K, double N, double r0, double tol = 1e-10)
        : K_(K), N_(N), r0_(r0), solution_(first_dirichlet_eigen(Density::model(K, N), r0, tol))
    {
        if (solution_.support_start > 0.0) {
            throw InvalidInputError("comparison needs the model eigenfunction on all of [0, r0]; N is too large");
        }
    }

    double K() const { return K_; }
    double N() const { return N_; }
    double r0() const { return r0_; }
    double lambda() const { return solution_.lambda; }
    const EigenSolution& solution() const { return solution_; }
    Eigenfunction eigenfunction() const { return Eigenfunction(solution_); }

  private:
    double K_;
    double N_;
    double r0_;
    EigenSolution solution_;
};

namespace detail {

inline void require_comparison_inputs(const Density& h, double K, double N, double r0)
{
    require_dimension(N);
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("radius r0 must be positive and finite");
    if (K > 0.0 && r0 >= max_diameter(K, N)) throw DomainError("radius r0 must be smaller than D_{K,N}");
    if (h.right_endpoint() < r0) throw DomainError("density must be defined on all of [0, r0]");
}

} // namespace detail

/// Evaluate both sides of the inequality against h at theta, using a
/// precomputed model eigenpair. The CD pre-check is the caller's business.
inline ComparisonReport comparison_residual(const Density& h, const ModelEigenpair& model, double theta,
                                            const IntegralOptions& quad = {})
{
    if (!(theta > 0.0 && theta <= model.r0())) throw DomainError("theta must lie in (0, r0]");
    const Density hb = h.bound_to(model.N());
    const Eigenfunction phi = model.eigenfunction();
    const std::span<const double> breaks(phi.breakpoints());

    ComparisonReport r;
    r.theta = theta;
    r.lambda = model.lambda();
    r.lhs = weighted_integral(
        [&](double x) {
            const double d = phi.derivative(x);
            return d * d;
        },
        hb, 0.0, theta, breaks, quad);
    const double mass = weighted_integral(
        [&](double x) {
            const double v = phi.value(x);
            return v * v;
        },
        hb, 0.0, theta, breaks, quad);
    r.rhs = r.lambda * mass;
    r.gap = r.rhs - r.lhs;
    r.relative_gap = r.rhs > 0.0 ? r.gap / r.rhs : 0.0;
    return r;
}

/// Full operation: CD pre-check on [0, r0] (unless waived), model eigenpair,
/// both integrals.
inline ComparisonReport comparison_residual(const Density& h, double K, double N, double r0, double theta,
                                            const ComparisonOptions& opts = {})
{
    detail::require_comparison_inputs(h, K, N, r0);
    if (!(theta > 0.0 && theta <= r0)) throw DomainError("theta must lie in (0, r0]");
    if (!opts.waive_cd_check) {
        const CdCheckReport cd = check_cd_density(h, K, N, 0.0, r0, opts.lattice, opts.cd_tol);
        if (!cd.satisfied) {
            throw CdConditionError("density violates CD(" + detail::format_number(K) + ", " + detail::format_number(N) +
                                   ") with slack " + detail::format_number(cd.worst_violation) + " at (" +
                                   detail::format_number(cd.witness.theta0) + ", " +
                                   detail::format_number(cd.witness.theta1) + ", t=" +
                                   detail::format_number(cd.witness.t) + ")");
        }
    }
    const ModelEigenpair model(K, N, r0, opts.solver_tol);
    ComparisonReport r = comparison_residual(h, model, theta, opts.quadrature);
    r.tolerance = opts.composed_tolerance();
    return r;
}

/// Fit h ~ c h_{K,N} on 200 midpoints of (0, r0) and combine with the gap at
/// theta = r0. c is the least-squares fit of the pointwise ratios; the
/// deviation is max |ratio / c - 1|.
inline RigidityVerdict rigidity_check(const Density& h, double K, double N, double r0, double tol = 1e-6,
                                      const ComparisonOptions& opts = {})
{
    const ComparisonReport gap = comparison_residual(h, K, N, r0, r0, opts);
    const Density hb = h.bound_to(N);

    constexpr int samples = 200;
    std::vector<double> ratios;
    ratios.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double x = r0 * (i + 0.5) / samples;
        const double lm = log_model_density(K, N, x);
        const double lh = hb.log_value(x);
        if (!std::isfinite(lh)) {
            ratios.push_back(0.0);
            continue;
        }
        ratios.push_back(std::exp(lh - lm));
    }
    double c = 0.0;
    for (double v : ratios) c += v;
    c /= samples;

    RigidityVerdict v;
    v.relative_gap = gap.relative_gap;
    if (!(c > 0.0) || !std::isfinite(c)) {
        v.max_relative_density_deviation = kInf;
        return v;
    }
    v.fitted_c = c;
    for (double r : ratios) v.max_relative_density_deviation = std::max(v.max_relative_density_deviation, std::abs(r / c - 1.0));
    v.rigid = v.max_relative_density_deviation <= tol && std::abs(gap.relative_gap) <= tol;
    return v;
}

} // namespace modeleig
