#pragma once

// Closed-form values and upper bounds for lambda_{K,N,r0}, the Neumann bound
// on compact spaces of finite diameter, and the essential-spectrum window.

#include <cmath>
#include <numbers>
#include <string>

#include "modeleig/bessel.hpp"
#include "modeleig/eigensolve.hpp"
#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"

namespace modeleig {

enum class FormulaTag { bessel_k0, exact_n3, upper_n_lt_3, upper_n_gt_3 };

inline const char* to_string(FormulaTag t)
{
    switch (t) {
    case FormulaTag::bessel_k0: return "bessel_k0";
    case FormulaTag::exact_n3: return "exact_n3";
    case FormulaTag::upper_n_lt_3: return "upper_n_lt_3";
    case FormulaTag::upper_n_gt_3: return "upper_n_gt_3";
    }
    return "unknown";
}

struct BoundValue {
    double value = 0.0;
    bool exact = false;
    FormulaTag formula = FormulaTag::bessel_k0;
};

enum class BoundMethod { solver, closed_form };

inline const char* to_string(BoundMethod m) { return m == BoundMethod::solver ? "solver" : "closed_form"; }

/// Closed-form evaluation of lambda_{K,N,r0}: exact for K = 0 (Bessel zero)
/// and N = 3, an upper bound otherwise.
inline BoundValue closed_form_bound(double K, double N, double r0)
{
    detail::require_dimension(N);
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("radius r0 must be positive and finite");
    if (K > 0.0 && r0 >= max_diameter(K, N)) throw DomainError("radius r0 must be smaller than D_{K,N}");

    if (N == 3.0 && K != 0.0) {
        return {-0.5 * K + std::numbers::pi * std::numbers::pi / (r0 * r0), true, FormulaTag::exact_n3};
    }
    const double j = bessel_first_zero(N / 2.0 - 1.0);
    const double bessel_term = j * j / (r0 * r0);
    if (K == 0.0) return {bessel_term, true, FormulaTag::bessel_k0};
    if (N < 3.0) return {-N * K / 6.0 + bessel_term, false, FormulaTag::upper_n_lt_3};

    // 1/s^2 - 1/r0^2 = (r0 - s)(r0 + s) / (s^2 r0^2), free of cancellation.
    const double kappa = K / (N - 1.0);
    const double s = s_kappa(kappa, r0);
    const double diff = theta_minus_s_kappa(kappa, r0) * (r0 + s) / (s * s * r0 * r0);
    const double value = -0.25 * (N - 1.0) * K + bessel_term + 0.25 * (N - 1.0) * (N - 3.0) * diff;
    return {value, false, FormulaTag::upper_n_gt_3};
}

/// lambda_{K,N,r0} for the model density by the finite-element solver.
inline double model_eigenvalue(double K, double N, double r0, double tol = 1e-8)
{
    return first_dirichlet_eigen(Density::model(K, N), r0, tol).lambda;
}

/// Upper bound on the j-th Neumann eigenvalue of a space with finite diameter
/// `diam`: lambda_{K,N,diam/(2j)}.
inline double neumann_upper_bound(double K, double N, double diam, int j, BoundMethod method = BoundMethod::solver,
                                  double tol = 1e-8)
{
    detail::require_dimension(N);
    if (!(diam > 0.0) || !std::isfinite(diam)) throw DomainError("diameter must be positive and finite");
    if (j < 1) throw DomainError("Neumann mode index j must be a positive integer");
    const double r0 = diam / (2.0 * j);
    if (K > 0.0 && r0 >= max_diameter(K, N)) throw DomainError("diam/(2j) must be smaller than D_{K,N}");
    if (method == BoundMethod::closed_form) return closed_form_bound(K, N, r0).value;
    return model_eigenvalue(K, N, r0, tol);
}

/// Right end -(N-1)K/4 of the window [0, -(N-1)K/4] that meets the essential
/// spectrum of a non-compact space with K <= 0 and N >= 3.
inline double essential_spectrum_threshold(double K, double N)
{
    if (!std::isfinite(K) || !std::isfinite(N)) throw DomainError("K and N must be finite");
    if (K > 0.0) throw HypothesisError("essential-spectrum window requires K <= 0 (got K = " + detail::format_number(K) + ")");
    if (N < 3.0) throw HypothesisError("essential-spectrum window requires N >= 3 (got N = " + detail::format_number(N) + ")");
    const double threshold = -(N - 1.0) * K / 4.0;
    return threshold == 0.0 ? 0.0 : threshold;
}

} // namespace modeleig
