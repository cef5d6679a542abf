#include <doctest.h>

#include "tracelens/error.hpp"
#include "tracelens/error_model.hpp"

using namespace tracelens;

TEST_CASE("poisson helpers") {
  CHECK(poisson_cdf(3.0, 1) == doctest::Approx(0.1991483).epsilon(1e-6));
  CHECK(poisson_pmf(2.0, 0) == doctest::Approx(0.1353352832).epsilon(1e-9));
  for (double lambda : {0.25, 1.0, 7.5, 30.0}) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) sum += poisson_pmf(lambda, i);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (std::uint64_t j : {0u, 1u, 5u, 20u}) {
      CHECK(poisson_cdf(lambda, j) + poisson_upper_tail(lambda, j + 1) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(poisson_upper_tail(4.0, 0) == 1.0);
}

TEST_CASE("false negative probabilities") {
  const double fn[][2] = {{3, 0.19915}, {5, 0.12465}, {10, 0.067086},
                          {15, 0.018002}, {20, 0.010812}, {30, 0.0019475}};
  for (const auto& row : fn) {
    CHECK(false_negative_prob(row[0]) == doctest::Approx(row[1]).epsilon(1e-3));
  }
  CHECK(report_threshold(3) == 1);
  CHECK(report_threshold(10) == 5);
}

TEST_CASE("significant false positive probabilities") {
  CHECK(sig_false_positive_prob(3) == doctest::Approx(0.17336).epsilon(1e-3));
  CHECK(sig_false_positive_prob(10) == doctest::Approx(0.04202).epsilon(1e-3));
  CHECK(sig_false_positive_prob(15) == doctest::Approx(0.037621).epsilon(1e-3));
  CHECK(sig_false_positive_prob(20) == doctest::Approx(0.013695).epsilon(1e-3));
  CHECK(sig_false_positive_prob_inclusive(20) == doctest::Approx(0.031828).epsilon(1e-3));
  CHECK(sig_false_positive_prob_inclusive(30) == doctest::Approx(0.010260).epsilon(1e-3));
  // Odd C: both conventions give the same event.
  CHECK(sig_false_positive_prob(5) == sig_false_positive_prob_inclusive(5));
}

TEST_CASE("recommend_C") {
  CHECK(recommend_C(0.2) == 3);
  // FN is not monotone in C; C = 9 already gives 0.055.
  CHECK(recommend_C(0.07) == 9);
  CHECK(recommend_C(0.999) == 1);
  CHECK_THROWS_AS(recommend_C(0.0), Error);
}

TEST_CASE("error_table") {
  const std::vector<double> cs{3, 10};
  const auto rows = error_table(cs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].oversampling == 10);
  CHECK(rows[1].fn_prob == false_negative_prob(10));
  CHECK(rows[1].sfp_prob == sig_false_positive_prob(10));
}
