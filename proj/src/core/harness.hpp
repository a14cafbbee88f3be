#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/chain.hpp"
#include "core/plp.hpp"
#include "core/sim.hpp"

namespace plpfrail::harness {

struct HarnessOptions {
  std::size_t replications = 2000;
  double level = 0.95;
  bool with_mcmc = false;
  dpm::DpmHyperparams hyper;
  dpm::HmcConfig hmc;
  std::size_t mcmc_iterations = 2000;
  std::size_t mcmc_burn_in = 1000;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct ParameterStats {
  std::string parameter;
  double truth = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double coverage = 0.0;
  double bias_se = 0.0;  // Monte Carlo SE of the bias
  double mse_se = 0.0;   // Monte Carlo SE of the MSE
};

struct HarnessReport {
  std::string scenario;
  double eta = 0.0;
  std::size_t m = 0;
  std::size_t replications = 0;
  std::size_t used = 0;  // replications with a proper posterior
  std::vector<ParameterStats> rows;  // alpha_1..K, beta_1..K, then eta when MCMC ran

  const ParameterStats& row(const std::string& parameter) const;
};

/// Monte Carlo evaluation of the closed-form estimators (and optionally the
/// DPM estimate of Var(Z)): bias, MSE and coverage of the equal-tail
/// credible intervals over independent simulated replications.
HarnessReport run_harness(const sim::SimScenario& scenario, const plp::PriorConfig& prior,
                          const HarnessOptions& options, const std::string& label = "custom");

/// Named parameter sets: "table1" = (1.2, 5, 0.7, 13.33), "table2" =
/// (0.75, 9.46, 1.25, 12.69); both K = 2, T = 20, gamma frailty.
sim::SimScenario scenario_preset(const std::string& key, std::size_t m, double eta,
                                 std::uint64_t seed);

/// Table layout: eta,statistic,m,alpha_1..K,beta_1..K,eta_hat; one block of
/// Bias / MSE / CP rows per report.
void write_report_csv(std::ostream& out, const std::vector<HarnessReport>& reports);

}  // namespace plpfrail::harness
