#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "modeleig/modelspace.hpp"
#include "oracles.hpp"

using namespace modeleig;

TEST(SKappa, MatchesTrigAndHyperbolicForms)
{
    for (double kappa : {-3.0, -0.5, 0.0, 0.25, 2.0}) {
        for (double x : {1e-6, 0.1, 0.7, 1.5}) {
            if (kappa > 0 && x * std::sqrt(kappa) >= std::numbers::pi) continue;
            EXPECT_NEAR(s_kappa(kappa, x), oracle::sk(kappa, x), 1e-14 * std::max(1.0, std::abs(oracle::sk(kappa, x))));
        }
    }
}

TEST(SKappa, ContinuousAcrossZeroCurvature)
{
    const double x = 0.8;
    EXPECT_NEAR(s_kappa(1e-12, x), x, 1e-12);
    EXPECT_NEAR(s_kappa(-1e-12, x), x, 1e-12);
    EXPECT_NEAR(c_kappa(1e-12, x), 1.0, 1e-12);
}

TEST(SKappa, LogFormSurvivesOverflow)
{
    // sinh(1000)/1 overflows; its logarithm does not.
    EXPECT_FALSE(std::isfinite(std::sinh(1000.0)));
    EXPECT_NEAR(log_s_kappa(-1.0, 1000.0), 1000.0 - std::log(2.0), 1e-12);
    EXPECT_NEAR(cot_kappa(-1.0, 1000.0), 1.0, 1e-15);
    EXPECT_NEAR(log_s_kappa(-2.0, 0.3), std::log(oracle::sk(-2.0, 0.3)), 1e-14);
}

TEST(ThetaMinusS, NoCancellationForSmallArguments)
{
    // theta - sinh(theta) = -theta^3/6 - theta^5/120 - ...
    const double x = 1e-4;
    EXPECT_NEAR(theta_minus_s_kappa(-1.0, x) / (-x * x * x / 6), 1.0, 1e-7);
    EXPECT_NEAR(theta_minus_s_kappa(1.0, 1.0), 1.0 - std::sin(1.0), 1e-15);
}

TEST(Coefficients, SigmaAndTau)
{
    const double kappa = 0.5;
    const double theta = 1.2;
    for (double t : {0.0, 0.3, 0.5, 1.0}) {
        const double expect = t == 0 ? 0 : oracle::sk(kappa, t * theta) / oracle::sk(kappa, theta);
        EXPECT_NEAR(sigma_coeff(kappa, t, theta), expect, 1e-15);
    }
    EXPECT_DOUBLE_EQ(sigma_coeff(-1.0, 0.4, 0.0), 0.4);
    EXPECT_THROW(sigma_coeff(1.0, 0.5, std::numbers::pi), DomainError);

    const double K = -2.0;
    const double N = 4.0;
    const double s = oracle::sk(K / 3, 0.4 * 0.9) / oracle::sk(K / 3, 0.9);
    EXPECT_NEAR(tau_coeff(K, N, 0.4, 0.9), std::pow(0.4, 0.25) * std::pow(s, 0.75), 1e-15);
    EXPECT_EQ(tau_coeff(K, N, 0.0, 0.9), 0.0);
    EXPECT_TRUE(std::isinf(tau_coeff(3.0, 4.0, 0.5, max_diameter(3.0, 4.0))));
    EXPECT_THROW(tau_coeff(K, N, 1.5, 0.9), DomainError);
}

TEST(ModelDensity, Values)
{
    EXPECT_DOUBLE_EQ(max_diameter(3.0, 4.0), std::numbers::pi);
    EXPECT_TRUE(std::isinf(max_diameter(0.0, 4.0)));
    EXPECT_TRUE(std::isinf(max_diameter(-1.0, 4.0)));
    EXPECT_DOUBLE_EQ(model_density(0.0, 3.0, 0.5), 0.25);
    EXPECT_EQ(model_density(3.0, 4.0, std::numbers::pi), 0.0);
    for (double K : {-4.0, -1.0, 0.0, 1.0}) {
        for (double N : {1.5, 3.0, 7.5}) {
            for (double x : {0.1, 0.6, 1.1}) {
                if (x >= oracle::diameter(K, N)) continue;
                const double ref = oracle::model_h(K, N, x);
                EXPECT_NEAR(model_density(K, N, x) / ref, 1.0, 1e-13);
                EXPECT_NEAR(log_model_density(K, N, x), std::log(ref), 1e-12);
                const double e = 1e-6;
                const double fd = (std::log(oracle::model_h(K, N, x + e)) - std::log(oracle::model_h(K, N, x - e))) / (2 * e);
                EXPECT_NEAR(model_log_derivative(K, N, x), fd, 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST(ModelDensity, Preconditions)
{
    EXPECT_THROW(model_density(0.0, 1.0, 0.5), DomainError);
    EXPECT_THROW(model_density(0.0, 0.5, 0.5), DomainError);
    EXPECT_THROW(model_density(0.0, 3.0, -0.1), DomainError);
    EXPECT_THROW(model_density(1.0, 2.0, 4.0), DomainError);
}

TEST(Density, SampledConstruction)
{
    const Density d = Density::sampled({0.0, 0.5, 1.0}, {0.0, 0.25, 1.0});
    ASSERT_NE(d.as_sampled(), nullptr);
    EXPECT_EQ(d.as_sampled()->theta.size(), 3u);
    EXPECT_DOUBLE_EQ(d.right_endpoint(), 1.0);
    EXPECT_DOUBLE_EQ(d(0.5), 0.25);
    EXPECT_DOUBLE_EQ(d(1.0), 1.0);
    EXPECT_THROW(Density::sampled({0.0, 1.0, 0.5}, {1, 1, 1}), MonotonicityError);
    EXPECT_THROW(Density::sampled({0.0, 1.0}, {1, -1}), NegativeValueError);
    EXPECT_THROW(Density::sampled({0.0, 1.0}, {1}), InvalidInputError);
    EXPECT_THROW(Density::sampled({0.0, 1.0}, {0, 0}), InvalidInputError);
    EXPECT_THROW(Density::constant(-1.0, 1.0), DomainError);
}

TEST(Density, BoundInterpolationIsLinearInRoot)
{
    // With N = 3, h^{1/2} is interpolated linearly: h = x^2 is reproduced exactly.
    const Density d = Density::sampled({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}).bound_to(3.0);
    EXPECT_NEAR(d(0.5), 0.25, 1e-15);
    EXPECT_NEAR(d(1.5), 2.25, 1e-15);
}

TEST(Density, ModelScale)
{
    const Density d = Density::model(-1.0, 4.0, 2.5);
    EXPECT_NEAR(d(0.7), 2.5 * oracle::model_h(-1.0, 4.0, 0.7), 1e-14);
    EXPECT_THROW(Density::model(-1.0, 4.0, 0.0), DomainError);
}

TEST(CdCheck, ModelSatisfiesItsOwnCondition)
{
    for (double K : {-3.0, 0.0, 1.0}) {
        const double N = 4.0;
        const double hi = K > 0 ? 0.9 * max_diameter(K, N) : 2.0;
        const CdCheckReport r = check_cd_density(Density::model(K, N), K, N, 0.0, hi);
        EXPECT_TRUE(r.satisfied) << "K=" << K << " slack " << r.worst_violation;
        EXPECT_GT(r.triples_checked, 0u);
    }
}

TEST(CdCheck, LargerCurvatureModelSatisfiesWeakerCondition)
{
    const CdCheckReport r = check_cd_density(Density::model(1.0, 3.0), -1.0, 3.0, 0.0, 2.0);
    EXPECT_TRUE(r.satisfied);
}

TEST(CdCheck, SmallerCurvatureModelViolatesWithWitness)
{
    const double lo = 0.0;
    const double hi = 1.5;
    const CdCheckReport r = check_cd_density(Density::model(-2.0, 3.0), 1.0, 3.0, lo, hi);
    EXPECT_FALSE(r.satisfied);
    EXPECT_LT(r.worst_violation, 0.0);
    EXPECT_GE(r.witness.theta0, lo);
    EXPECT_LE(r.witness.theta1, hi);
    EXPECT_GT(r.witness.t, 0.0);
    EXPECT_LT(r.witness.t, 1.0);
}

TEST(CdCheck, ConstantDensityIsCdZeroN)
{
    EXPECT_TRUE(check_cd_density(Density::constant(3.0, 2.0), 0.0, 5.0, 0.0, 2.0).satisfied);
    EXPECT_FALSE(check_cd_density(Density::constant(3.0, 2.0), 1.0, 5.0, 0.0, 2.0).satisfied);
}

TEST(CdCheck, RejectsIntervalBeyondModelDiameter)
{
    EXPECT_THROW(check_cd_density(Density::model(1.0, 3.0), 1.0, 3.0, 0.0, 5.0), DomainError);
}
