#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace plpfrail::diag {

struct GewekeResult {
  double z_score = 0.0;
  double first_frac = 0.1;
  double last_frac = 0.5;
  bool pass = true;  // |z| < 1.96
};

/// Spectral density at frequency zero of a series, Bartlett window with
/// lag truncation max(1, floor(lag_frac * n)).
double spectral_density_zero(std::span<const double> x, double lag_frac = 0.04);

/// Geweke z-score comparing the means of the first and last fractions of the
/// chain. A constant chain yields z = 0. Requires at least 100 draws.
GewekeResult geweke(std::span<const double> chain, double first_frac = 0.1,
                    double last_frac = 0.5);

/// Sample autocorrelation for lags 0..max_lag (ACF(0) = 1; all zeros after
/// lag 0 for a constant chain).
std::vector<double> autocorrelation(std::span<const double> chain, std::size_t max_lag);

/// Effective sample size with Geyer's initial positive sequence. Zero for a
/// constant chain.
double ess(std::span<const double> chain);

}  // namespace plpfrail::diag
