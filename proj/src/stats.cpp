#include "watermark/detail/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace watermark::detail {

namespace {

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gammq(double a, double x) {
  if (x < 0.0 || a <= 0.0)
    throw std::invalid_argument("gammq requires x >= 0 and a > 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_cf(a, x);
}

double chi_square_tail(double chi2, std::size_t dof) {
  if (dof == 0) return 1.0;
  return gammq(static_cast<double>(dof) / 2.0, chi2 / 2.0);
}

double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double two_proportion_p(std::size_t ones_a, std::size_t n_a,
                        std::size_t ones_b, std::size_t n_b) {
  if (n_a == 0 || n_b == 0) return 1.0;
  const double pa = static_cast<double>(ones_a) / static_cast<double>(n_a);
  const double pb = static_cast<double>(ones_b) / static_cast<double>(n_b);
  const double pooled = static_cast<double>(ones_a + ones_b) /
                        static_cast<double>(n_a + n_b);
  const double var = pooled * (1.0 - pooled) *
                     (1.0 / static_cast<double>(n_a) +
                      1.0 / static_cast<double>(n_b));
  if (var <= 0.0) return pa == pb ? 1.0 : 0.0;
  return two_sided_p((pa - pb) / std::sqrt(var));
}

double two_sample_chi_square_p(std::span<const std::size_t> a,
                               std::span<const std::size_t> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("histograms must have equal bin counts");
  double total_a = 0.0, total_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total_a += static_cast<double>(a[i]);
    total_b += static_cast<double>(b[i]);
  }
  if (total_a == 0.0 || total_b == 0.0) return 1.0;
  const double ka = std::sqrt(total_b / total_a);
  const double kb = std::sqrt(total_a / total_b);
  double chi2 = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = static_cast<double>(a[i]);
    const double bi = static_cast<double>(b[i]);
    if (ai + bi == 0.0) continue;
    const double diff = ka * ai - kb * bi;
    chi2 += diff * diff / (ai + bi);
    ++used;
  }
  if (used < 2) return 1.0;
  return chi_square_tail(chi2, used - 1);
}

} // namespace watermark::detail
