#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"

namespace plpfrail::diag {
namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Biased (divide by n) autocovariances up to max_lag.
std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  const double mu = mean_of(x);
  std::vector<double> g(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag && k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - mu) * (x[i + k] - mu);
    g[k] = s / static_cast<double>(n);
  }
  return g;
}

}  // namespace

double spectral_density_zero(std::span<const double> x, double lag_frac) {
  if (x.size() < 2) throw DomainError("spectral density needs at least two draws");
  const auto lags = std::max<std::size_t>(1, static_cast<std::size_t>(lag_frac * static_cast<double>(x.size())));
  const auto g = autocovariance(x, std::min(lags, x.size() - 1));
  double s = g[0];
  for (std::size_t k = 1; k < g.size(); ++k)
    s += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(g.size())) * g[k];
  return std::max(s, 0.0);
}

GewekeResult geweke(std::span<const double> chain, double first_frac, double last_frac) {
  if (chain.size() < 100) throw DomainError("Geweke diagnostic needs at least 100 draws");
  if (!(first_frac > 0.0) || !(last_frac > 0.0) || first_frac + last_frac > 1.0)
    throw ConfigError("Geweke window fractions must be positive and sum to at most one");
  GewekeResult r;
  r.first_frac = first_frac;
  r.last_frac = last_frac;
  const std::size_t n = chain.size();
  const auto na = static_cast<std::size_t>(std::floor(first_frac * static_cast<double>(n)));
  const auto nb = static_cast<std::size_t>(std::floor(last_frac * static_cast<double>(n)));
  const auto a = chain.first(na);
  const auto b = chain.last(nb);
  const double diff = mean_of(a) - mean_of(b);
  const double var = spectral_density_zero(a) / static_cast<double>(na) +
                     spectral_density_zero(b) / static_cast<double>(nb);
  if (var > 0.0) {
    r.z_score = diff / std::sqrt(var);
  } else {
    r.z_score = 0.0;
  }
  r.pass = std::abs(r.z_score) < 1.96;
  return r;
}

std::vector<double> autocorrelation(std::span<const double> chain, std::size_t max_lag) {
  if (chain.empty()) throw DomainError("autocorrelation of an empty chain");
  const auto g = autocovariance(chain, max_lag);
  std::vector<double> acf(max_lag + 1, 0.0);
  acf[0] = 1.0;
  if (!(g[0] > 0.0)) return acf;
  for (std::size_t k = 1; k <= max_lag; ++k) acf[k] = g[k] / g[0];
  return acf;
}

double ess(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 4) throw DomainError("ESS needs at least four draws");
  const double mu = mean_of(chain);
  auto gamma = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += (chain[i] - mu) * (chain[i + k] - mu);
    return s / static_cast<double>(n);
  };
  const double g0 = gamma(0);
  if (!(g0 > 0.0)) return 0.0;
  // Geyer: sum consecutive autocorrelation pairs while positive, forced monotone.
  double tau = -1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    double pair = (gamma(k) + gamma(k + 1)) / g0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    tau += 2.0 * pair;
    prev = pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
  return static_cast<double>(n) / tau;
}

}  // namespace plpfrail::diag
