#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "modeleig/eigensolve.hpp"
#include "oracles.hpp"

using namespace modeleig;

namespace {

Eigen::MatrixXd dense(const SymTridiagonal& m)
{
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = m.diag[i];
        if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = m.off[i];
    }
    return a;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Grid, GeometricGridsAreNested)
{
    GridSpec g;
    g.node_count = 33;
    const auto coarse = make_grid(g, 0.0, 2.0);
    const auto fine = make_grid(g.refined(), 0.0, 2.0);
    ASSERT_EQ(fine.size(), 65u);
    for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_NEAR(fine[2 * i], coarse[i], 1e-15);
    EXPECT_LT(coarse[1] - coarse[0], coarse[32] - coarse[31]);
    EXPECT_THROW(make_grid(g, 1.0, 1.0), DomainError);
}

TEST(Generalized, MatchesDenseSolver)
{
    for (double K : {-2.0, 0.0, 1.0}) {
        GridSpec g;
        g.node_count = 40;
        const WeightedProblem p = assemble_weighted_problem(Density::model(K, 4.0), 1.0, g);
        const DiscreteEigenpair e = smallest_generalized_eigenpair(p);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense(p.stiffness), dense(p.mass));
        ASSERT_EQ(ref.info(), Eigen::Success);
        EXPECT_LT(rel(e.lambda, ref.eigenvalues()(0)), 1e-10) << "K=" << K;
        EXPECT_EQ(eigenvalues_below(p, 0.5 * (ref.eigenvalues()(0) + ref.eigenvalues()(1))), 1u);
        EXPECT_EQ(eigenvalues_below(p, 0.5 * ref.eigenvalues()(0)), 0u);
    }
}

TEST(FirstDirichlet, ExactForNEqualsThree)
{
    for (double K : {-4.0, -1.0, 0.0, 1.0}) {
        const double r0 = K > 0 ? 0.9 * max_diameter(K, 3.0) : 1.3;
        const EigenSolution s = first_dirichlet_eigen(Density::model(K, 3.0), r0, 1e-9);
        const double exact = -K / 2 + std::numbers::pi * std::numbers::pi / (r0 * r0);
        EXPECT_LT(rel(s.lambda, exact), 1e-8) << "K=" << K;
    }
}

TEST(FirstDirichlet, BesselZerosAtZeroCurvature)
{
    for (double N : {1.3, 2.0, 4.0, 6.5}) {
        const double r0 = 0.8;
        const double j = oracle::bessel_zero(N / 2 - 1);
        const EigenSolution s = first_dirichlet_eigen(Density::model(0.0, N), r0, 1e-9);
        EXPECT_LT(rel(s.lambda, j * j / (r0 * r0)), 1e-8) << "N=" << N;
    }
}

TEST(FirstDirichlet, EigenfunctionShape)
{
    const Density h = Density::model(-1.0, 4.0);
    const EigenSolution s = first_dirichlet_eigen(h, 1.0, 1e-9);
    EXPECT_EQ(*std::max_element(s.phi.begin(), s.phi.end()), 1.0);
    EXPECT_GE(*std::min_element(s.phi.begin(), s.phi.end()), 0.0);
    EXPECT_EQ(s.phi.back(), 0.0);
    EXPECT_LT(s.dphi.back(), 0.0);
    EXPECT_LT(s.flux_residual, 1e-6);
    EXPECT_EQ(s.method, EigenMethod::matrix);
    EXPECT_GE(s.refinement_history.size(), 2u);
    const Eigenfunction f(s);
    EXPECT_EQ(f.value(1.0), 0.0);
    EXPECT_EQ(f.value(1.5), 0.0);
    EXPECT_NEAR(f.value(s.grid[7]), s.phi[7], 1e-15);
}

TEST(FirstDirichlet, SampledDensityMatchesModel)
{
    std::vector<double> t;
    std::vector<double> v;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(1.2 * i / 400.0);
        v.push_back(oracle::model_h(-1.0, 3.0, t.back()));
    }
    const Density h = Density::sampled(t, v, 3.0);
    const double exact = 0.5 + std::numbers::pi * std::numbers::pi / 1.44;
    EXPECT_LT(rel(first_dirichlet_eigen(h, 1.2, 1e-8).lambda, exact), 1e-4);
}

TEST(FirstDirichlet, LargeDimensionUsesSupportCut)
{
    const EigenSolution s = first_dirichlet_eigen(Density::model(-1.0, 20000.0), 1.0, 1e-8);
    EXPECT_GT(s.support_start, 0.0);
    // For huge N the closed-form bound is sharp to many digits.
    const double b = oracle::bound(-1.0, 20000.0, 1.0);
    EXPECT_LE(s.lambda, b * (1 + 1e-8));
    EXPECT_LT(rel(s.lambda, b), 1e-4);
}

// On the half-sphere r0 = D/2 the first eigenfunction is cos(sqrt(kappa) r),
// so lambda = kappa N with kappa = K/(N-1).
TEST(FirstDirichlet, HemisphereValue)
{
    for (double N : {4.0, 7.5, 1000.0}) {
        const double K = 0.5;
        const EigenSolution s = first_dirichlet_eigen(Density::model(K, N), 0.5 * oracle::diameter(K, N), 1e-10);
        EXPECT_LT(rel(s.lambda, K * N / (N - 1.0)), 1e-8) << "N=" << N;
        for (std::size_t i = 0; i < s.phi.size(); ++i) {
            ASSERT_TRUE(std::isfinite(s.phi[i]) && std::isfinite(s.dphi[i])) << "N=" << N << " node " << i;
        }
    }
}

TEST(FirstDirichlet, Preconditions)
{
    EXPECT_THROW(first_dirichlet_eigen(Density::model(1.0, 3.0), 10.0), DomainError);
    EXPECT_THROW(first_dirichlet_eigen(Density::model(0.0, 3.0), -1.0), DomainError);
    EXPECT_THROW(first_dirichlet_eigen(Density::model(0.0, 3.0), 1.0, 0.0), InvalidInputError);
    EXPECT_THROW(first_dirichlet_eigen(Density::constant(1.0, 1.0), 2.0), DomainError);
    EXPECT_THROW(first_dirichlet_eigen(Density::sampled({0, 0.5, 1}, {1, 0, 1}), 1.0), DomainError);
}

TEST(Shooting, AgreesWithMatrix)
{
    for (auto [K, N, r0] : {std::tuple{-2.0, 2.5, 1.0}, {0.5, 5.0, 2.0}, {0.0, 1.4, 0.6}, {-0.5, 9.0, 3.0}}) {
        const Density h = Density::model(K, N);
        const double a = first_dirichlet_eigen(h, r0, 1e-10).lambda;
        const EigenSolution b = shooting_dirichlet_eigen(h, r0, 1e-10);
        EXPECT_EQ(b.method, EigenMethod::shooting);
        EXPECT_LT(rel(a, b.lambda), 1e-7) << K << " " << N << " " << r0;
    }
}

TEST(Shooting, BracketMustStraddle)
{
    const Density h = Density::model(0.0, 3.0);
    EXPECT_THROW(shoot_eigen(h, 1.0, {20.0, 30.0}), BracketError);
    EXPECT_NEAR(shoot_eigen(h, 1.0, {5.0, 15.0}, 1e-10), std::numbers::pi * std::numbers::pi, 1e-8);
}

TEST(Monotonicity, DecreasingInRadius)
{
    double prev = INFINITY;
    for (double r0 : {0.3, 0.6, 0.9, 1.2}) {
        const double l = first_dirichlet_eigen(Density::model(-1.0, 5.0), r0).lambda;
        EXPECT_LT(l, prev);
        prev = l;
    }
}
