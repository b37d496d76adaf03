#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "seedscope/bounds.hpp"

using namespace seedscope::bounds;

TEST_SUITE("bounds") {
  TEST_CASE("two-sample threshold against high-precision values") {
    // mpmath, 30 digits: sqrt(ln(2/0.01)/8000), sqrt(ln(40)/458), sqrt(ln(e/0.05)/457).
    CHECK(std::abs(two_sample_threshold(8000, 0.01) - 0.02573498923291992723) < 1e-15);
    CHECK(std::abs(two_sample_threshold(458, 0.05) - 0.08974587429076522581) < 1e-15);
    CHECK(std::abs(two_sample_threshold(457, 0.05) - 0.09350613166982986769) < 1e-15);
    CHECK(two_sample_threshold(DkwConfig{8000, 3, 0.01}) == two_sample_threshold(8000, 0.01));
  }

  TEST_CASE("constant switches at 458") {
    CHECK(two_sample_constant(457) == std::numbers::e);
    CHECK(two_sample_constant(458) == 2.0);
    CHECK(two_sample_constant(1) == std::numbers::e);
    CHECK(DkwConfig{458, 1, 0.05}.constant() == 2.0);
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(two_sample_threshold(100, 1.0), std::domain_error);
    CHECK_THROWS_AS(two_sample_threshold(100, 0.0), std::domain_error);
    CHECK_THROWS_AS(two_sample_threshold(0, 0.5), std::domain_error);
    CHECK_THROWS_AS(one_sample_radius(10, 1.5), std::domain_error);
    CHECK_THROWS_AS(reference_deviation_epsilon(0, 10, 0.1), std::domain_error);
    CHECK_THROWS_AS(reference_deviation_epsilon(1, 10, 0.0), std::domain_error);
    CHECK_THROWS_AS(candidate_deviation_confidence(1, 457, 0.1, 0.1), std::domain_error);
    CHECK_THROWS_AS(l1_bound({1.0, 0, 0, 0, 1}, 10, 1), std::domain_error);
    CHECK_THROWS_AS(l1_bound({0.1, -1, 0, 0, 1}, 10, 1), std::domain_error);
  }

  TEST_CASE("threshold monotonicity") {
    double previous = two_sample_threshold(1, 0.05);
    for (std::size_t n = 2; n < 5000; ++n) {
      const double current = two_sample_threshold(n, 0.05);
      REQUIRE(current < previous);
      previous = current;
    }
    double looser = two_sample_threshold(1000, 0.5);
    for (double eps = 0.25; eps > 1e-12; eps /= 2) {
      const double tighter = two_sample_threshold(1000, eps);
      REQUIRE(tighter > looser);
      looser = tighter;
    }
  }

  TEST_CASE("one-sample radius and tail") {
    CHECK(std::abs(one_sample_radius(500, 0.05) - 0.06073614619083051686) < 1e-15);
    const auto tail = one_sample_tail(500, one_sample_radius(500, 0.05));
    CHECK(tail.raw == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(one_sample_tail(1, 1e-9).reported == 1.0);
    CHECK(one_sample_tail(1, 1e-9).raw > 1.0);
  }

  TEST_CASE("reference deviation epsilon") {
    const auto e = reference_deviation_epsilon(800, 8000, 0.05);
    CHECK(e.raw == doctest::Approx(1600.0 * std::exp(-40.0)).epsilon(1e-13));
    CHECK(e.raw == doctest::Approx(6.797e-15).epsilon(1e-3));
    const auto vacuous = reference_deviation_epsilon(1, 10, 1e-12);
    CHECK(vacuous.reported == 1.0);
    CHECK(vacuous.raw == doctest::Approx(2.0));
    for (std::size_t m : {1u, 3u, 50u}) {
      CHECK(reference_deviation_epsilon(2 * m, 300, 0.07).raw ==
            2.0 * reference_deviation_epsilon(m, 300, 0.07).raw);
    }
  }

  TEST_CASE("candidate deviation confidence") {
    const auto c = candidate_deviation_confidence(800, 8000, 0.05, 0.05);
    const double expected_gap = 1600.0 * std::exp(-40.0) + 2.0 * std::exp(-20.0);
    CHECK(1.0 - c.raw == doctest::Approx(expected_gap).epsilon(1e-6));
    CHECK(expected_gap == doctest::Approx(4.122e-9).epsilon(1e-3));
    const auto floor = candidate_deviation_confidence(800, 500, 1e-6, 1e-6);
    CHECK(floor.raw < 0.0);
    CHECK(floor.reported == 0.0);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 458; n < 3000; n += 37) {
      const double value = candidate_deviation_confidence(20, n, 0.05, 0.05).raw;
      REQUIRE(value >= previous);
      previous = value;
    }
  }

  TEST_CASE("L1 bound") {
    const auto b = l1_bound({0.05, 0.01, 0.01, 0.01, 16.0}, 8000, 800);
    CHECK(b.nu == doctest::Approx(0.53).epsilon(1e-15));
    CHECK(b.failure.raw == doctest::Approx(2.0 * std::exp(-1.6) + 1600.0 * std::exp(-1.6)));
    CHECK(b.failure.reported == 1.0);
    CHECK(l1_bound({0.2, 0, 0, 0, 16.0}, 10, 1).nu == 0.2);
    const double base = l1_bound({0.1, 0.02, 0.01, 0.03, 5.0}, 100, 2).nu;
    CHECK(l1_bound({0.3, 0.02, 0.01, 0.03, 5.0}, 100, 2).nu - base ==
          doctest::Approx(0.2).epsilon(1e-14));
  }
}
