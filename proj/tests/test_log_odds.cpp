#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "labelgrid/log_odds.hpp"

using namespace labelgrid;

TEST_CASE("logit reference values")
{
    CHECK(logit(0.5) == 0.0);
    // ln(7/3) and ln(9), 30-digit mpmath values
    CHECK(logit(0.7) == doctest::Approx(0.847297860387203613710).epsilon(1e-14));
    CHECK(logit(0.9) == doctest::Approx(2.197224577336219382790).epsilon(1e-14));
}

TEST_CASE("logit rejects probabilities outside the open unit interval")
{
    CHECK_THROWS_AS(logit(0.0), std::domain_error);
    CHECK_THROWS_AS(logit(1.0), std::domain_error);
    CHECK_THROWS_AS(logit(-0.1), std::domain_error);
    CHECK_THROWS_AS(logit(std::nan("")), std::domain_error);
}

TEST_CASE("probability reference values")
{
    CHECK(probability(0.0) == 0.5);
    CHECK(probability(2.1972245773362194) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(probability(-2.1972245773362194) == doctest::Approx(0.1).epsilon(1e-13));
    CHECK_THROWS_AS(probability(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(probability(std::nan("")), std::domain_error);
}

TEST_CASE("logit and probability are inverse and antisymmetric")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(1e-3, 1.0 - 1e-3);
    for (int i = 0; i < 10000; ++i) {
        const double p = dist(rng);
        CHECK(std::abs(probability(logit(p)) - p) <= 1e-12);
        CHECK(std::abs(logit(1.0 - p) + logit(p)) <= 1e-12);
    }
    CHECK(logit(0.3) == -logit(0.7));
}

TEST_CASE("probability is antisymmetric around 0.5")
{
    for (double l = -30.0; l <= 30.0; l += 0.37)
        CHECK(std::abs(probability(-l) - (1.0 - probability(l))) <= 1e-15);
}

TEST_CASE("clamp helpers")
{
    CHECK(clamp_probability(0.0, 0.001) == 0.001);
    CHECK(clamp_probability(1.0, 0.001) == 0.999);
    CHECK(clamp_probability(0.3, 0.001) == 0.3);
    CHECK(clamp_log_odds(5.0, 3.5) == 3.5);
    CHECK(clamp_log_odds(-5.0, 3.5) == -3.5);
    CHECK(clamp_log_odds(1.0, std::numeric_limits<double>::infinity()) == 1.0);
}
