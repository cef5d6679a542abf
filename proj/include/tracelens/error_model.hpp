#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tracelens {

// P(X <= j) for X ~ Poisson(lambda); terms accumulated in log space.
double poisson_cdf(double lambda, std::uint64_t j);

// P(X >= j) for X ~ Poisson(lambda), summed directly over the upper tail
// when that is the smaller side.
double poisson_upper_tail(double lambda, std::uint64_t j);

double poisson_pmf(double lambda, std::uint64_t i);

// Number of samples a trace must exceed to be reported: floor(C/2).
std::uint64_t report_threshold(double oversampling);

// Probability that a trace with frequency exactly epsilon gets at most
// floor(C/2) samples: P(Poisson(C) <= floor(C/2)).
double false_negative_prob(double oversampling);

// Probability that a trace with frequency epsilon/4 is reported:
// P(Poisson(C/4) >= floor(C/2) + 1).
double sig_false_positive_prob(double oversampling);

// Same event under the inclusive threshold "at least C/2 samples":
// P(Poisson(C/4) >= ceil(C/2)).
double sig_false_positive_prob_inclusive(double oversampling);

// Smallest integer C >= 1 with false_negative_prob(C) <= delta.
unsigned recommend_C(double delta);

struct ErrorTableRow {
  double oversampling = 0.0;
  double fn_prob = 0.0;
  double sfp_prob = 0.0;            // strict threshold, matches the FN convention
  double sfp_prob_inclusive = 0.0;  // ">= C/2" convention
};

std::vector<ErrorTableRow> error_table(std::span<const double> oversampling_values);

}  // namespace tracelens
