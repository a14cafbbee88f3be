#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/data.hpp"
#include "core/hmc.hpp"
#include "core/mixture.hpp"
#include "core/simplex.hpp"

namespace plpfrail::dpm {

struct ChainOptions {
  std::size_t iterations = 10000;
  std::size_t burn_in = 5000;
  std::uint64_t seed = 1;
  bool keep_mixture = true;  // store post-burn-in (rho, mu, tau) for density estimates

  void validate() const;
};

struct MixtureSnapshot {
  std::vector<double> rho;
  std::vector<double> mu;
  std::vector<double> tau;
};

/// Iteration-indexed record of one chain. `z` is iterations x m, row-major.
struct McmcTrace {
  std::size_t m = 0;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::vector<double> z;
  std::vector<double> var_z;
  std::vector<double> mixture_var;
  std::vector<double> c;
  std::vector<std::size_t> clusters;  // distinct occupied levels
  std::vector<std::size_t> y_star;
  std::vector<std::uint8_t> accepted;
  std::vector<std::uint8_t> divergent;
  std::vector<double> accept_prob;
  std::vector<double> step_size;
  std::vector<MixtureSnapshot> mixtures;  // post-burn-in only

  std::span<const double> z_at(std::size_t it) const {
    return std::span<const double>(z).subspan(it * m, m);
  }
  std::size_t divergences() const;
  double acceptance_rate(bool post_burn_in = true) const;
};

/// Hybrid Gibbs/HMC sampler for the frailty vector and the DPM of log
/// frailties. Each sweep draws (xi, c), sticks, slices, extra levels, atoms,
/// allocations (all Gibbs) and then z* by HMC.
McmcTrace run_chain(const data::FailureDataset& data, const DpmHyperparams& hyper,
                    const HmcConfig& hmc, const ChainOptions& options);

/// (1 / (m - 1)) sum (z_j - 1)^2 for a mean-one vector.
double frailty_variance(std::span<const double> z);

struct ScalarSummary {
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Mean, SD and equal-tail interval of a set of draws.
ScalarSummary summarize_draws(std::span<const double> draws, double level = 0.95);

/// Post-burn-in average of Z.
std::vector<double> posterior_mean_z(const McmcTrace& trace);

/// Posterior summary of the per-iteration empirical Var(Z) after burn-in.
ScalarSummary variance_summary(const McmcTrace& trace, double level = 0.95);

/// Frailty density sum_l rho_l LN(z | mu_l, 1/tau_l) for one state.
std::vector<double> density_estimate(const DpmState& state, std::span<const double> grid);

/// Same, averaged over the stored post-burn-in mixtures.
std::vector<double> density_estimate(const McmcTrace& trace, std::span<const double> grid);

}  // namespace plpfrail::dpm
