#include "core/simplex.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/special.hpp"

namespace plpfrail::dpm {
namespace {

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// log(b) and log(1 - b) for b = logistic(x), stable for large |x|.
double log_logistic(double x) { return -std::log1p(std::exp(-std::abs(x))) + std::min(x, 0.0); }

}  // namespace

FrailtyVector transform(std::span<const double> z_star, std::size_t m) {
  if (m < 1 || z_star.size() + 1 != m) throw DomainError("z_star must have length m - 1");
  FrailtyVector out;
  out.z_star.assign(z_star.begin(), z_star.end());
  out.z.resize(m);
  out.w.resize(m);
  const double md = static_cast<double>(m);
  double stick = 1.0;
  double log_stick = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (!std::isfinite(z_star[k])) throw DomainError("z_star must be finite");
    const double x = z_star[k] - std::log(static_cast<double>(m - k - 1));
    const double b = logistic(x);
    out.log_jacobian += log_logistic(x) + log_logistic(-x) + log_stick;
    const double a = stick * b;
    out.z[k] = md * a;
    out.w[k] = std::log(md) + log_stick + log_logistic(x);
    stick *= 1.0 - b;
    log_stick += log_logistic(-x);
  }
  out.z[m - 1] = md * stick;
  out.w[m - 1] = std::log(md) + log_stick;
  return out;
}

std::vector<double> inverse_transform(std::span<const double> z) {
  const std::size_t m = z.size();
  if (m < 1) throw DomainError("frailty vector must be non-empty");
  double sum = 0.0;
  for (double v : z) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("frailties must be positive and finite");
    sum += v;
  }
  const double md = static_cast<double>(m);
  if (std::abs(sum / md - 1.0) > 1e-8) throw DomainError("frailty vector must have mean one");

  std::vector<double> z_star(m - 1);
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double a = z[k] / md;
    const double b = a / remaining;
    if (!(b > 0.0 && b < 1.0)) throw DomainError("frailty vector is not an interior simplex point");
    z_star[k] = std::log(b / (1.0 - b)) + std::log(static_cast<double>(m - k - 1));
    remaining -= a;
  }
  return z_star;
}

FrailtyTarget::FrailtyTarget(std::vector<double> mu, std::vector<double> tau,
                             std::vector<double> counts)
    : mu_(std::move(mu)), tau_(std::move(tau)), counts_(std::move(counts)) {
  if (counts_.size() < 2 || mu_.size() != counts_.size() || tau_.size() != counts_.size())
    throw DomainError("frailty target needs m >= 2 and per-system atoms");
}

double FrailtyTarget::log_density_z(std::span<const double> z) const {
  double lp = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j)
    lp += special::lognormal_log_pdf(z[j], mu_[j], tau_[j]) + counts_[j] * std::log(z[j]);
  return lp;
}

double FrailtyTarget::operator()(std::span<const double> z_star, std::span<double> grad) const {
  const std::size_t m = counts_.size();
  const auto fv = transform(z_star, m);
  double lp = fv.log_jacobian;
  // Work with w = log z directly: log LN(z) + n log z = log N(w) + (n - 1) w.
  for (std::size_t j = 0; j < m; ++j)
    lp += special::normal_log_pdf(fv.w[j], mu_[j], tau_[j]) + (counts_[j] - 1.0) * fv.w[j];
  if (grad.empty()) return lp;
  if (grad.size() != m - 1) throw DomainError("gradient buffer must have length m - 1");

  // d/dz_j of the data + atom term, then pushed back through z = m a.
  const double md = static_cast<double>(m);
  std::vector<double> g_a(m);
  for (std::size_t j = 0; j < m; ++j)
    g_a[j] = md * ((counts_[j] - 1.0) - tau_[j] * (fv.w[j] - mu_[j])) / fv.z[j];

  // Reverse sweep over the stick recursion. stick_bar is the adjoint of the
  // stick remaining after level k.
  std::vector<double> b(m - 1), stick_before(m - 1);
  double stick = 1.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double x = z_star[k] - std::log(static_cast<double>(m - k - 1));
    b[k] = logistic(x);
    stick_before[k] = stick;
    stick *= 1.0 - b[k];
  }
  double stick_bar = g_a[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) {
    const double s = stick_before[k];
    const double bk = b[k];
    // a_k = s b_k and stick_after = s (1 - b_k); log b + log(1 - b) adds 1 - 2b.
    grad[k] = (g_a[k] - stick_bar) * s * bk * (1.0 - bk) + (1.0 - 2.0 * bk);
    stick_bar = g_a[k] * bk + stick_bar * (1.0 - bk) + 1.0 / s;
  }
  return lp;
}

}  // namespace plpfrail::dpm
