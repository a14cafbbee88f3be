#pragma once

#include <functional>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace plpfrail::dpm {

/// Log density with gradient. The gradient span is empty when only the value
/// is wanted.
using LogDensity = std::function<double(std::span<const double>, std::span<double>)>;

struct HmcConfig {
  double step_size = 0.1;     // initial step; adapted during burn-in when `adapt`
  int leapfrog_steps = 20;
  double jitter = 0.2;        // steps drawn uniformly in L (1 +/- jitter)
  bool adapt = true;
  double target_accept = 0.8;
  std::vector<double> mass_diag;  // empty means identity

  void validate() const;
};

struct HmcStep {
  bool accepted = false;
  bool divergent = false;
  double accept_prob = 0.0;
  double energy_change = 0.0;  // H(proposal) - H(current)
};

/// H(q, p) = -log pi(q) + p' M^-1 p / 2.
double hamiltonian(const LogDensity& target, std::span<const double> q, std::span<const double> p,
                   std::span<const double> inv_mass);

/// `steps` leapfrog steps in place. Returns false on a non-finite state.
bool leapfrog(const LogDensity& target, std::vector<double>& q, std::vector<double>& p,
              double step_size, int steps, std::span<const double> inv_mass);

/// One Metropolis-corrected HMC transition of `q`. Non-finite trajectories
/// (or energy errors above 1000) are rejected and flagged divergent.
HmcStep hmc_update(const LogDensity& target, std::vector<double>& q, double step_size, int steps,
                   std::span<const double> inv_mass, Rng& rng);

/// Doubles or halves the step from `initial` until the one-step acceptance
/// probability crosses 1/2.
double find_reasonable_step(const LogDensity& target, std::span<const double> q, double initial,
                            std::span<const double> inv_mass, Rng& rng);

/// Nesterov dual averaging of log step size towards a target acceptance rate.
class DualAveraging {
public:
  DualAveraging(double initial_step, double target_accept);

  void update(double accept_prob);
  double step() const noexcept { return step_; }
  double final_step() const noexcept { return std::exp(log_step_bar_); }

private:
  double mu_;
  double target_;
  double h_bar_ = 0.0;
  double log_step_bar_ = 0.0;
  double step_;
  int t_ = 0;
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;
};

}  // namespace plpfrail::dpm
