#pragma once

#include <span>
#include <vector>

namespace plpfrail::dpm {

/// Frailty vector constrained to mean one, together with its unconstrained
/// coordinates z_star (length m - 1) and log z.
struct FrailtyVector {
  std::vector<double> z_star;
  std::vector<double> z;
  std::vector<double> w;
  double log_jacobian = 0.0;

  std::size_t size() const noexcept { return z.size(); }
};

/// Stick-breaking map from R^(m-1) onto {z > 0, mean(z) = 1}:
///   b_j = logistic(z*_j - log(m - j)),  a_j = (1 - sum_{i<j} a_i) b_j,
///   a_m = 1 - sum a_j,  z = m a.
/// log_jacobian is log |d(a_1..a_{m-1}) / d z*|.
FrailtyVector transform(std::span<const double> z_star, std::size_t m);

/// Inverse of `transform`. Throws DomainError unless z is positive, finite and
/// has mean one (relative tolerance 1e-8).
std::vector<double> inverse_transform(std::span<const double> z);

/// Log conditional density of z_star given the allocated atoms and per-system
/// failure counts:
///   log|J| + sum_j [log LN(z_j | mu_j, 1/tau_j) + n_j log z_j].
class FrailtyTarget {
public:
  FrailtyTarget(std::vector<double> mu, std::vector<double> tau, std::vector<double> counts);

  std::size_t systems() const noexcept { return counts_.size(); }
  std::size_t dimension() const noexcept { return counts_.size() - 1; }

  /// Value at z_star; writes the gradient when `grad` is non-empty.
  double operator()(std::span<const double> z_star, std::span<double> grad) const;
  double operator()(std::span<const double> z_star) const { return (*this)(z_star, {}); }

  /// Log density on the constrained scale (without the Jacobian).
  double log_density_z(std::span<const double> z) const;

private:
  std::vector<double> mu_;
  std::vector<double> tau_;
  std::vector<double> counts_;
};

}  // namespace plpfrail::dpm
