#include "core/plp.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/special.hpp"

namespace plpfrail::plp {

void PlpParams::validate() const {
  if (beta.size() != alpha.size() || beta.empty())
    throw DomainError("beta and alpha must be non-empty and of equal length");
  for (std::size_t q = 0; q < beta.size(); ++q)
    if (!(beta[q] > 0.0) || !(alpha[q] > 0.0) || !std::isfinite(beta[q]) || !std::isfinite(alpha[q]))
      throw DomainError("PLP parameters of cause " + std::to_string(q + 1) + " must be positive");
}

double alpha_to_scale(double alpha, double beta, double T) {
  return T * std::pow(alpha, -1.0 / beta);
}

double intensity(const PlpParams& params, std::size_t cause, double t, double T, double z) {
  if (cause >= params.causes()) throw DomainError("cause index out of range");
  if (!(t > 0.0)) throw DomainError("intensity requires t > 0");
  if (t > T) throw DomainError("intensity requires t <= T");
  if (!(z > 0.0)) throw DomainError("frailty must be positive");
  const double b = params.beta[cause];
  return z * b * params.alpha[cause] * std::pow(t, b - 1.0) * std::pow(T, -b);
}

double mean_function(const PlpParams& params, std::size_t cause, double z) {
  if (cause >= params.causes()) throw DomainError("cause index out of range");
  if (!(z > 0.0)) throw DomainError("frailty must be positive");
  return z * params.alpha[cause];
}

double log_likelihood(const PlpParams& params, std::span<const double> z,
                      const data::FailureDataset& data) {
  params.validate();
  const auto& d = data.design();
  if (params.causes() != d.K) throw DomainError("parameter count does not match K");
  if (z.size() != d.m) throw DomainError("frailty vector length does not match m");

  double alpha_total = 0.0;
  for (double a : params.alpha) alpha_total += a;
  const double logT = std::log(d.T);

  double ll = 0.0;
  for (std::size_t j = 0; j < d.m; ++j) {
    if (!(z[j] > 0.0)) throw DomainError("frailty must be positive");
    const double logz = std::log(z[j]);
    for (const auto& r : data.system(j)) {
      const std::size_t q = r.cause - 1;
      const double b = params.beta[q];
      ll += logz + std::log(b) + std::log(params.alpha[q]) + (b - 1.0) * std::log(r.time) - b * logT;
    }
    ll -= z[j] * alpha_total;
  }
  return ll;
}

double mle_beta(const data::CountSummary& counts, std::size_t cause) {
  if (cause >= counts.K) throw DomainError("cause index out of range");
  if (counts.n_q[cause] < 1)
    throw NumericalError("MLE of beta undefined for cause " + std::to_string(cause + 1) +
                         " (no failures)");
  return static_cast<double>(counts.n_q[cause]) / counts.log_ratio_sums[cause];
}

MleResult mle(const data::FailureDataset& data) {
  const auto counts = data::summarize(data);
  MleResult out;
  for (std::size_t q = 0; q < counts.K; ++q) out.beta.push_back(mle_beta(counts, q));
  if (counts.m == 1 && counts.K == 1) {
    const double n = static_cast<double>(counts.total);
    out.classic_mu = data.design().T / std::pow(n, 1.0 / out.beta[0]);
  }
  return out;
}

void PriorConfig::validate() const {
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw ConfigError("zeta must be >= 0");
}

double GammaMarginal::sd() const { return std::sqrt(shape) / rate; }

double GammaMarginal::quantile(double p) const { return special::gamma_quantile(shape, rate, p); }

PlpPosterior posterior(const data::CountSummary& counts, const PriorConfig& prior) {
  prior.validate();
  PlpPosterior post;
  post.m = counts.m;
  post.n_q = counts.n_q;
  for (std::size_t q = 0; q < counts.K; ++q) {
    const double n = static_cast<double>(counts.n_q[q]);
    if (counts.n_q[q] < 1 || !(n + 1.0 - prior.zeta > 0.0))
      throw NumericalError("improper posterior for cause " + std::to_string(q + 1) + ": n_q = " +
                           std::to_string(counts.n_q[q]) + " must exceed zeta - 1 = " +
                           data::format_double(prior.zeta - 1.0) + " and be at least 1");
    const double bhat = mle_beta(counts, q);
    post.beta_mle.push_back(bhat);
    post.beta.push_back({n + 1.0 - prior.zeta, n / bhat});
    post.alpha.push_back({n, static_cast<double>(counts.m)});
  }
  return post;
}

PlpPosterior posterior(const data::FailureDataset& data, const PriorConfig& prior) {
  return posterior(data::summarize(data), prior);
}

std::vector<Estimate> bayes_estimates(const PlpPosterior& post, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must be in (0, 1)");
  const double lo = 0.5 * (1.0 - level);
  const double hi = 1.0 - lo;
  std::vector<Estimate> out;
  auto push = [&](const std::string& name, const GammaMarginal& g) {
    out.push_back({name, g.mean(), g.sd(), g.quantile(lo), g.quantile(hi)});
  };
  for (std::size_t q = 0; q < post.beta.size(); ++q)
    push("beta_" + std::to_string(q + 1), post.beta[q]);
  for (std::size_t q = 0; q < post.alpha.size(); ++q)
    push("alpha_" + std::to_string(q + 1), post.alpha[q]);
  return out;
}

DuanePlot duane_points(const data::FailureDataset& data, std::size_t cause) {
  const auto& d = data.design();
  if (cause >= d.K) throw DomainError("cause index out of range");
  std::vector<double> times;
  for (const auto& r : data.records())
    if (r.cause == cause + 1) times.push_back(r.time);
  if (times.size() < 2)
    throw NumericalError("Duane plot for cause " + std::to_string(cause + 1) +
                         " needs at least two failures");
  std::sort(times.begin(), times.end());

  DuanePlot plot;
  const double m = static_cast<double>(d.m);
  for (std::size_t i = 0; i < times.size(); ++i) {
    plot.log_time.push_back(std::log(times[i]));
    plot.log_count.push_back(std::log(static_cast<double>(i + 1) / m));
  }
  const double n = static_cast<double>(times.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    mx += plot.log_time[i];
    my += plot.log_count[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dx = plot.log_time[i] - mx;
    sxx += dx * dx;
    sxy += dx * (plot.log_count[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("Duane slope undefined: all failure times coincide");
  plot.slope = sxy / sxx;
  plot.intercept = my - plot.slope * mx;
  return plot;
}

}  // namespace plpfrail::plp
