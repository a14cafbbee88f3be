#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace plpfrail {

/// Thin wrapper over a 64-bit Mersenne twister with the handful of draws the
/// samplers need. Independent substreams are derived deterministically from
/// (seed, key...) so that per-system and per-replication work can be split
/// across threads without changing results.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0x5eed) : engine_(make_seq({seed})) {}

  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::vector<std::uint64_t> all{seed};
    all.insert(all.end(), keys.begin(), keys.end());
    Rng r;
    r.engine_ = std::mt19937_64(make_seq(all));
    return r;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u;
    do {
      u = std::generate_canonical<double, 53>(engine_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  /// Gamma with shape/rate parametrization (mean shape / rate).
  double gamma(double shape, double rate) {
    double g = std::gamma_distribution<double>(shape, 1.0)(engine_);
    if (g <= 0.0) g = std::numeric_limits<double>::min();
    return g / rate;
  }

  double beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    double v = x / (x + y);
    constexpr double lo = 1e-300;
    constexpr double hi = 1.0 - 1e-12;
    return std::clamp(v, lo, hi);
  }

  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<long>(mean)(engine_);
  }

  /// Index drawn with probability proportional to exp(log_weights[i]).
  std::size_t categorical_log(const std::vector<double>& log_weights) {
    const double mx = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (double lw : log_weights) total += std::exp(lw - mx);
    double u = uniform() * total;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
      u -= std::exp(log_weights[i] - mx);
      if (u <= 0.0) return i;
    }
    return log_weights.size() - 1;
  }

  std::mt19937_64& engine() { return engine_; }

private:
  static std::mt19937_64 make_seq(std::initializer_list<std::uint64_t> v) {
    return make_seq(std::vector<std::uint64_t>(v));
  }
  static std::mt19937_64 make_seq(const std::vector<std::uint64_t>& v) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * v.size());
    for (auto x : v) {
      words.push_back(static_cast<std::uint32_t>(x));
      words.push_back(static_cast<std::uint32_t>(x >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
};

}  // namespace plpfrail
