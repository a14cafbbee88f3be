#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/data.hpp"

namespace plpfrail::plp {

/// Cause-specific power-law process parameters in the orthogonal form:
/// beta (shape) and alpha (expected failures per system on (0, T]).
struct PlpParams {
  std::vector<double> beta;
  std::vector<double> alpha;

  std::size_t causes() const noexcept { return beta.size(); }
  void validate() const;
};

/// Classic PLP scale mu such that (T / mu)^beta = alpha.
double alpha_to_scale(double alpha, double beta, double T);

/// lambda_q(t | z) = z * beta_q * alpha_q * t^(beta_q - 1) * T^(-beta_q).
double intensity(const PlpParams& params, std::size_t cause, double t, double T, double z = 1.0);

/// Lambda_q(T | z) = z * alpha_q.
double mean_function(const PlpParams& params, std::size_t cause, double z = 1.0);

/// Full log-likelihood of the frailty model, computed in log space.
double log_likelihood(const PlpParams& params, std::span<const double> z,
                      const data::FailureDataset& data);

struct MleResult {
  std::vector<double> beta;            // per cause
  std::optional<double> classic_mu;    // only for m = 1, K = 1
};

/// beta_hat_q = n_q / sum log(T / t) over cause-q records.
double mle_beta(const data::CountSummary& counts, std::size_t cause);
MleResult mle(const data::FailureDataset& data);

struct PriorConfig {
  double zeta = 2.0;
  void validate() const;
};

struct GammaMarginal {
  double shape = 0.0;
  double rate = 0.0;

  double mean() const { return shape / rate; }
  double sd() const;
  double quantile(double p) const;
};

struct PlpPosterior {
  std::size_t m = 0;
  std::vector<long> n_q;
  std::vector<double> beta_mle;
  std::vector<GammaMarginal> beta;
  std::vector<GammaMarginal> alpha;
};

/// Independent gamma marginals: beta_q ~ G(n_q + 1 - zeta, n_q / beta_hat_q),
/// alpha_q ~ G(n_q, m). Throws NumericalError naming the first cause whose
/// posterior would be improper.
PlpPosterior posterior(const data::CountSummary& counts, const PriorConfig& prior);
PlpPosterior posterior(const data::FailureDataset& data, const PriorConfig& prior);

struct Estimate {
  std::string parameter;
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Posterior means, SDs and equal-tail intervals at `level`, in the order
/// beta_1..beta_K, alpha_1..alpha_K.
std::vector<Estimate> bayes_estimates(const PlpPosterior& post, double level = 0.95);

struct DuanePlot {
  std::vector<double> log_time;
  std::vector<double> log_count;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Pooled cause-q failure times against the mean cumulative count per system,
/// both on log scale, with the ordinary least-squares slope.
DuanePlot duane_points(const data::FailureDataset& data, std::size_t cause);

}  // namespace plpfrail::plp
