#pragma once

#include <cstdint>
#include <vector>

#include "core/data.hpp"
#include "core/plp.hpp"

namespace plpfrail::sim {

enum class FrailtyFamily { Gamma, PointMass, LogNormalMixture };

/// Finite mixture of log-normals for the frailty, rescaled so that E[Z] = 1.
struct LogNormalMixture {
  std::vector<double> weights;
  std::vector<double> log_means;
  std::vector<double> log_sds;

  void validate() const;
  /// E[Z] of the unscaled mixture.
  double raw_mean() const;
  /// Var(Z) after rescaling to mean one.
  double variance() const;
};

struct SimScenario {
  data::ObservationDesign design;
  plp::PlpParams true_params;
  double eta = 0.0;  // frailty variance (gamma family)
  FrailtyFamily family = FrailtyFamily::Gamma;
  LogNormalMixture mixture;  // used by LogNormalMixture only
  std::uint64_t seed = 1;

  void validate() const;
  /// Population variance of the frailty under the chosen family.
  double frailty_variance() const;
};

/// z_j iid with mean one: Gamma(1/eta, 1/eta) for the gamma family
/// (eta = 0 gives Z = 1), all ones for the point mass.
std::vector<double> draw_frailties(const SimScenario& scenario);

struct Simulated {
  data::FailureDataset dataset;
  std::vector<double> z;
};

/// Given z_j: n_jq ~ Poisson(z_j alpha_q), times T * U_(i)^(1/beta_q) from
/// sorted uniforms, merged per system with cause labels.
Simulated simulate(const SimScenario& scenario);

}  // namespace plpfrail::sim
