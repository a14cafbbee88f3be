#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace plpfrail::dpm {

/// Gamma(ac0, bc0) hyperprior on the concentration c and the normal-gamma
/// base measure NG(m0, s0, d0 p0, d0) on the atoms:
///   mu | tau ~ N(m0, 1 / (s0 tau)),   tau ~ Gamma(d0 / 2, rate d0 p0 / 2).
struct DpmHyperparams {
  double ac0 = 1.0;
  double bc0 = 1.0;
  double m0 = 0.0;
  double s0 = 1.0;
  double d0 = 2.0;
  double p0 = 1.0;

  void validate() const;
};

/// Truncated slice-sampler state. Only levels 0..levels()-1 are instantiated;
/// allocations y are 0-based level indices.
struct DpmState {
  double c = 1.0;
  double xi = 0.5;
  std::vector<double> nu;
  std::vector<double> rho;
  std::vector<double> mu;
  std::vector<double> tau;
  std::vector<double> u;
  std::vector<std::size_t> y;

  std::size_t levels() const noexcept { return nu.size(); }
  /// Number of levels up to the highest occupied one (max label, 1-based).
  std::size_t y_star() const;
  /// Number of distinct occupied levels.
  std::size_t occupied() const;
  /// Systems allocated to each instantiated level.
  std::vector<long> occupancy() const;
};

/// rho_1 = nu_1, rho_l = nu_l prod_{o<l} (1 - nu_o).
std::vector<double> stick_break(std::span<const double> nu);

/// xi | c ~ Beta(c + 1, m), then c | xi from the two-gamma mixture
///   p G(ac0 + k, bc0 - log xi) + (1 - p) G(ac0 + k - 1, bc0 - log xi),
///   p / (1 - p) = (ac0 + k - 1) / (m (bc0 - log xi)),
/// where k is the number of distinct occupied levels.
void update_concentration(DpmState& state, std::size_t m, std::size_t clusters,
                          const DpmHyperparams& hyper, Rng& rng);

/// nu_l ~ Beta(1 + n_l, c + sum_{o>l} n_o) for l < y*. Drops higher levels.
void update_sticks(DpmState& state, Rng& rng);

/// u_j ~ Uniform(0, rho_{y_j}).
void update_slices(DpmState& state, Rng& rng);

/// Adds levels with nu ~ Beta(1, c) until sum rho > 1 - min(u). Returns l*.
std::size_t extend_levels(DpmState& state, Rng& rng);

struct NormalGammaParams {
  double m = 0.0;
  double s = 1.0;
  double dp = 1.0;
  double d = 1.0;
};

/// Conjugate update of NG(m0, s0, d0 p0, d0) with observations w.
NormalGammaParams normal_gamma_posterior(const DpmHyperparams& hyper, std::span<const double> w);

/// (mu, tau) ~ NG(m, s, dp, d).
void draw_normal_gamma(const NormalGammaParams& ng, Rng& rng, double& mu, double& tau);

/// Redraws atoms for every instantiated level from its conditional.
void update_atoms(DpmState& state, std::span<const double> w, const DpmHyperparams& hyper,
                  Rng& rng);

/// Pr(y_j = l) proportional to N(w_j | mu_l, 1/tau_l) over levels with rho_l > u_j.
void update_allocations(DpmState& state, std::span<const double> w, Rng& rng);

/// sum_l rho_l LN(z | mu_l, 1/tau_l) over the instantiated levels.
double mixture_density(const DpmState& state, double z);

/// Variance of Z implied by the occupied levels (weights renormalized),
/// after rescaling the mixture to mean one.
double mixture_variance(const DpmState& state);

}  // namespace plpfrail::dpm
