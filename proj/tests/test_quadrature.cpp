#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "modeleig/modelspace.hpp"
#include "modeleig/quadrature.hpp"
#include "oracles.hpp"

using namespace modeleig;

TEST(GaussLegendre, IntegratesPolynomialsExactly)
{
    const QuadratureRule q = gauss_legendre_rule(8);
    double s = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 14);
    EXPECT_NEAR(s, 1.0 / 15.0, 1e-15);
}

TEST(Adaptive, SmoothAndSingularIntegrands)
{
    EXPECT_NEAR(adaptive_integral([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-12);
    EXPECT_NEAR(adaptive_integral([](double x) { return std::sqrt(x); }, 0.0, 1.0), 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(adaptive_integral([](double x) { return std::log(x); }, 0.0, 1.0), -1.0, 1e-9);
}

TEST(Adaptive, PartitionWithKink)
{
    const std::vector<double> cuts{-1.0, 1.0 / 3.0, 2.0};
    const double v = adaptive_integral([](double x) { return std::abs(x - 1.0 / 3.0); }, std::span<const double>(cuts));
    const double a = 4.0 / 3.0;
    const double b = 5.0 / 3.0;
    EXPECT_NEAR(v, 0.5 * (a * a + b * b), 1e-13);
}

TEST(Adaptive, BudgetExhaustionIsReported)
{
    IntegralOptions o;
    o.rel_tol = 1e-14;
    o.max_intervals = 2;
    EXPECT_THROW(adaptive_integral([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, o),
                 NonConvergenceError);
}

TEST(Weighted, ModelMass)
{
    // int_0^1 x^2 (sinh x)^2 dx against a composite Simpson reference.
    const Density h = Density::model(-2.0, 3.0);
    const double v = weighted_integral([](double x) { return x * x; }, h, 0.0, 1.0);
    const int n = 20000;
    double ref = 0;
    for (int i = 0; i <= n; ++i) {
        const double x = double(i) / n;
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        ref += w * x * x * oracle::model_h(-2.0, 3.0, x);
    }
    ref /= 3.0 * n;
    EXPECT_NEAR(v / ref, 1.0, 1e-11);
}

TEST(Weighted, SampledWithBreakpoints)
{
    const Density h = Density::sampled({0.0, 0.5, 1.0}, {0.0, 1.0, 1.0});
    const std::vector<double> breaks{0.25, 0.5, 0.75};
    // Unbound profile is interpolated linearly: int = 1/4 + 1/2.
    EXPECT_NEAR(weighted_integral([](double) { return 1.0; }, h, 0.0, 1.0, std::span<const double>(breaks)), 0.75, 1e-14);
}
