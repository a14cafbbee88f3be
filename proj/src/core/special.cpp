#include "core/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "core/errors.hpp"

namespace plpfrail::special {
namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// log(x^a e^-x / Gamma(a)). For large a the direct form loses about
// a log(a) ulps in the exponent, so it is rewritten around x = a with
// log1p and the Stirling remainder.
double log_prefactor(double a, double x) {
  if (a < 20.0) return a * std::log(x) - x - std::lgamma(a);
  const double d = (x - a) / a;
  const double log1pmx = std::log1p(d) - d;
  const double a2 = a * a;
  const double stirlerr = (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * a2)) / a2) / a2) / a;
  return a * log1pmx + 0.5 * std::log(a / (2.0 * std::numbers::pi)) - stirlerr;
}

// Power series, converges quickly for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

// Continued fraction for Q(a, x) (modified Lentz), for x >= a + 1.
double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a))
    throw DomainError("incomplete gamma requires a > 0 and x >= 0");
}

}  // namespace

double gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape);
}

double gamma_p_inverse(double a, double p) {
  if (!(a > 0.0)) throw DomainError("gamma quantile requires shape > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("gamma quantile requires p in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  // Work on whichever tail is smaller so that the residual keeps precision.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  auto residual = [&](double x) {
    return upper ? gamma_q(a, x) - target : gamma_p(a, x) - target;
  };
  // residual is increasing in x for the lower tail, decreasing for the upper.
  auto below = [&](double x) { return upper ? residual(x) > 0.0 : residual(x) < 0.0; };

  double lo = 0.0;
  double hi = std::max(a, 1.0);
  while (below(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("gamma quantile bracket overflow");
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const double f = residual(x);
    if (f == 0.0) return x;
    if (below(x)) lo = x; else hi = x;
    const double dens = std::exp(gamma_log_pdf(x, a, 1.0));
    double next = x;
    if (dens > 0.0 && std::isfinite(dens)) next = upper ? x + f / dens : x - f / dens;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::abs(next) || (hi - lo) <= 1e-15 * hi) return next;
    x = next;
  }
  return x;
}

double gamma_quantile(double shape, double rate, double p) {
  if (!(rate > 0.0)) throw DomainError("gamma quantile requires rate > 0");
  return gamma_p_inverse(shape, p) / rate;
}

double normal_log_pdf(double x, double mean, double precision) {
  const double d = x - mean;
  return 0.5 * std::log(precision) - 0.5 * std::log(2.0 * std::numbers::pi) -
         0.5 * precision * d * d;
}

double lognormal_log_pdf(double z, double mean, double precision) {
  if (z <= 0.0) return -std::numeric_limits<double>::infinity();
  const double w = std::log(z);
  return normal_log_pdf(w, mean, precision) - w;
}

}  // namespace plpfrail::special
