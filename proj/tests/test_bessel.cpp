#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "modeleig/bessel.hpp"
#include "oracles.hpp"

using namespace modeleig;

TEST(BesselJ, MatchesBoost)
{
    for (double nu : {-0.75, -0.25, 0.0, 0.5, 1.0, 3.3, 9.5}) {
        for (double x : {0.05, 0.9, 3.0, 11.9, 12.1, 25.0, 60.0}) {
            const double ref = boost::math::cyl_bessel_j(nu, x);
            EXPECT_NEAR(bessel_j(nu, x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << "nu=" << nu << " x=" << x;
        }
    }
}

TEST(BesselJ, Origin)
{
    EXPECT_EQ(bessel_j(0.0, 0.0), 1.0);
    EXPECT_EQ(bessel_j(2.0, 0.0), 0.0);
    EXPECT_TRUE(std::isinf(bessel_j(-0.5, 0.0)));
    EXPECT_THROW(bessel_j(-1.0, 1.0), DomainError);
    EXPECT_THROW(bessel_j(0.5, -1.0), DomainError);
}

TEST(BesselZero, HalfOrderIsPi) { EXPECT_NEAR(bessel_first_zero(0.5), std::numbers::pi, 1e-12); }

TEST(BesselZero, MatchesBoost)
{
    for (double nu = -0.95; nu <= 40.0; nu += 0.35) {
        const double ref = oracle::bessel_zero(nu);
        EXPECT_NEAR(bessel_first_zero(nu) / ref, 1.0, 1e-12) << "nu=" << nu;
    }
}

TEST(BesselZero, SquaredBelowQuadraticEnvelope)
{
    for (double N = 1.05; N <= 20.0; N += 0.25) {
        const double j = bessel_first_zero(N / 2 - 1);
        EXPECT_LT(j * j, N * (2 + N / 2));
    }
}

TEST(BesselZero, RejectsOrderAtMinusOne) { EXPECT_THROW(bessel_first_zero(-1.0), DomainError); }
