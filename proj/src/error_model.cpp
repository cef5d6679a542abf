#include "tracelens/error_model.hpp"

#include <algorithm>
#include <cmath>

#include "tracelens/error.hpp"

namespace tracelens {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::invalid_argument, "Poisson mean must be positive and finite");
  }
}

double log_pmf(double lambda, std::uint64_t i) {
  const double k = static_cast<double>(i);
  return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
}

void check_oversampling(double oversampling) {
  if (!(oversampling >= 1.0) || !std::isfinite(oversampling)) {
    throw Error(ErrorCode::invalid_argument, "C must be a finite number >= 1");
  }
}

}  // namespace

double poisson_pmf(double lambda, std::uint64_t i) {
  check_lambda(lambda);
  return std::exp(log_pmf(lambda, i));
}

double poisson_cdf(double lambda, std::uint64_t j) {
  check_lambda(lambda);
  if (static_cast<double>(j) > lambda) return 1.0 - poisson_upper_tail(lambda, j + 1);
  double sum = 0.0;
  for (std::uint64_t i = 0; i <= j; ++i) sum += std::exp(log_pmf(lambda, i));
  return std::min(sum, 1.0);
}

double poisson_upper_tail(double lambda, std::uint64_t j) {
  check_lambda(lambda);
  if (j == 0) return 1.0;
  if (static_cast<double>(j) <= lambda) return 1.0 - poisson_cdf(lambda, j - 1);
  // Terms decrease geometrically past the mode; stop once they no longer
  // change the sum.
  double sum = 0.0;
  for (std::uint64_t i = j;; ++i) {
    const double term = std::exp(log_pmf(lambda, i));
    sum += term;
    if (term <= sum * 1e-17 || term == 0.0) break;
  }
  return std::min(sum, 1.0);
}

std::uint64_t report_threshold(double oversampling) {
  check_oversampling(oversampling);
  return static_cast<std::uint64_t>(std::floor(oversampling / 2.0));
}

double false_negative_prob(double oversampling) {
  return poisson_cdf(oversampling, report_threshold(oversampling));
}

double sig_false_positive_prob(double oversampling) {
  return poisson_upper_tail(oversampling / 4.0, report_threshold(oversampling) + 1);
}

double sig_false_positive_prob_inclusive(double oversampling) {
  check_oversampling(oversampling);
  return poisson_upper_tail(oversampling / 4.0,
                            static_cast<std::uint64_t>(std::ceil(oversampling / 2.0)));
}

unsigned recommend_C(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  }
  constexpr unsigned limit = 100000;
  for (unsigned c = 1; c <= limit; ++c) {
    if (false_negative_prob(c) <= delta) return c;
  }
  throw Error(ErrorCode::invalid_argument, "no C up to 100000 reaches the requested delta");
}

std::vector<ErrorTableRow> error_table(std::span<const double> oversampling_values) {
  std::vector<ErrorTableRow> rows;
  rows.reserve(oversampling_values.size());
  for (double c : oversampling_values) {
    rows.push_back({c, false_negative_prob(c), sig_false_positive_prob(c),
                    sig_false_positive_prob_inclusive(c)});
  }
  return rows;
}

}  // namespace tracelens
