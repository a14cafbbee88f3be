#include "core/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace plpfrail::sim {
namespace {

// Substream tags; a (seed, system, tag) triple identifies one stream.
constexpr std::uint64_t kFrailtyStream = 0;
constexpr std::uint64_t kEventStream = 1;

}  // namespace

void LogNormalMixture::validate() const {
  const auto k = weights.size();
  if (k == 0 || log_means.size() != k || log_sds.size() != k)
    throw ConfigError("log-normal mixture needs equal-length, non-empty weights/means/sds");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(weights[i] > 0.0) || !(log_sds[i] >= 0.0))
      throw ConfigError("mixture weights must be positive and sds non-negative");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to one");
}

double LogNormalMixture::raw_mean() const {
  double e = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    e += weights[i] * std::exp(log_means[i] + 0.5 * log_sds[i] * log_sds[i]);
  return e;
}

double LogNormalMixture::variance() const {
  const double e1 = raw_mean();
  double e2 = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    e2 += weights[i] * std::exp(2.0 * log_means[i] + 2.0 * log_sds[i] * log_sds[i]);
  return e2 / (e1 * e1) - 1.0;
}

void SimScenario::validate() const {
  design.validate();
  true_params.validate();
  if (true_params.causes() != design.K) throw ConfigError("beta/alpha length must equal K");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("frailty variance eta must be >= 0");
  if (family == FrailtyFamily::LogNormalMixture) mixture.validate();
}

double SimScenario::frailty_variance() const {
  switch (family) {
    case FrailtyFamily::Gamma: return eta;
    case FrailtyFamily::PointMass: return 0.0;
    case FrailtyFamily::LogNormalMixture: return mixture.variance();
  }
  return 0.0;
}

std::vector<double> draw_frailties(const SimScenario& scenario) {
  scenario.validate();
  const std::size_t m = scenario.design.m;
  std::vector<double> z(m, 1.0);
  if (scenario.family == FrailtyFamily::PointMass ||
      (scenario.family == FrailtyFamily::Gamma && scenario.eta == 0.0))
    return z;

  const double scale = scenario.family == FrailtyFamily::LogNormalMixture
                           ? 1.0 / scenario.mixture.raw_mean()
                           : 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    auto rng = Rng::substream(scenario.seed, {kFrailtyStream, j});
    if (scenario.family == FrailtyFamily::Gamma) {
      const double k = 1.0 / scenario.eta;
      z[j] = rng.gamma(k, k);
    } else {
      const auto& mix = scenario.mixture;
      double u = rng.uniform();
      std::size_t comp = 0;
      while (comp + 1 < mix.weights.size() && u > mix.weights[comp]) u -= mix.weights[comp++];
      z[j] = scale * std::exp(rng.normal(mix.log_means[comp], mix.log_sds[comp]));
    }
  }
  return z;
}

Simulated simulate(const SimScenario& scenario) {
  auto z = draw_frailties(scenario);
  const auto& d = scenario.design;
  const auto& p = scenario.true_params;
  std::vector<data::FailureRecord> records;

  for (std::size_t j = 0; j < d.m; ++j) {
    auto rng = Rng::substream(scenario.seed, {kEventStream, j});
    std::vector<data::FailureRecord> sys;
    for (std::size_t q = 0; q < d.K; ++q) {
      const long n = rng.poisson(z[j] * p.alpha[q]);
      std::vector<double> u(static_cast<std::size_t>(n));
      for (auto& x : u) x = rng.uniform();
      std::sort(u.begin(), u.end());
      for (double x : u) {
        double t = d.T * std::pow(x, 1.0 / p.beta[q]);
        // U^(1/beta) can round up to 1 (or down to 0) for extreme beta.
        while (!(t > 0.0 && t < d.T)) t = d.T * std::pow(rng.uniform(), 1.0 / p.beta[q]);
        sys.push_back({j + 1, q + 1, t});
      }
    }
    std::sort(sys.begin(), sys.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    // Exact ties have probability zero; nudge to the next representable time.
    for (std::size_t i = 1; i < sys.size(); ++i)
      if (sys[i].time <= sys[i - 1].time) sys[i].time = std::nextafter(sys[i - 1].time, d.T);
    records.insert(records.end(), sys.begin(), sys.end());
  }
  return {data::FailureDataset(d, std::move(records)), std::move(z)};
}

}  // namespace plpfrail::sim
