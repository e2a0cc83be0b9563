#pragma once

#include <cstddef>
#include <span>

namespace watermark::detail {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
/// by series for x < a + 1 and continued fraction otherwise.
double gammq(double a, double x);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_tail(double chi2, std::size_t dof);

/// Two-sided normal tail for a z statistic: erfc(|z| / sqrt(2)).
double two_sided_p(double z);

/// Two-sided p-value for the difference of two proportions
/// (ones_a out of n_a vs ones_b out of n_b), pooled-variance z-test.
double two_proportion_p(std::size_t ones_a, std::size_t n_a,
                        std::size_t ones_b, std::size_t n_b);

/// Two-sample chi-square over aligned histograms; bins empty in both
/// samples are dropped. Returns the upper-tail p-value.
double two_sample_chi_square_p(std::span<const std::size_t> a,
                               std::span<const std::size_t> b);

} // namespace watermark::detail
