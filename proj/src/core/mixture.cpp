#include "core/mixture.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/special.hpp"

namespace plpfrail::dpm {

void DpmHyperparams::validate() const {
  if (!(ac0 > 0.0) || !(bc0 > 0.0) || !(s0 > 0.0) || !(d0 > 0.0) || !(p0 > 0.0) ||
      !std::isfinite(m0))
    throw ConfigError("DPM hyperparameters ac0, bc0, s0, d0, p0 must be positive");
}

std::size_t DpmState::y_star() const {
  std::size_t mx = 0;
  for (auto l : y) mx = std::max(mx, l + 1);
  return mx;
}

std::size_t DpmState::occupied() const {
  const auto occ = occupancy();
  return static_cast<std::size_t>(std::count_if(occ.begin(), occ.end(), [](long n) { return n > 0; }));
}

std::vector<long> DpmState::occupancy() const {
  std::vector<long> n(std::max(levels(), y_star()), 0);
  for (auto l : y) ++n[l];
  return n;
}

std::vector<double> stick_break(std::span<const double> nu) {
  std::vector<double> rho(nu.size());
  double remaining = 1.0;
  for (std::size_t l = 0; l < nu.size(); ++l) {
    rho[l] = nu[l] * remaining;
    remaining *= 1.0 - nu[l];
  }
  return rho;
}

void update_concentration(DpmState& state, std::size_t m, std::size_t clusters,
                          const DpmHyperparams& hyper, Rng& rng) {
  const double md = static_cast<double>(m);
  const double ys = static_cast<double>(clusters);
  state.xi = rng.beta(state.c + 1.0, md);
  const double rate = hyper.bc0 - std::log(state.xi);
  const double odds = (hyper.ac0 + ys - 1.0) / (md * rate);
  const double p = odds / (1.0 + odds);
  const double shape = rng.uniform() < p ? hyper.ac0 + ys : hyper.ac0 + ys - 1.0;
  state.c = rng.gamma(shape, rate);
}

void update_sticks(DpmState& state, Rng& rng) {
  const std::size_t ys = state.y_star();
  const auto n = state.occupancy();
  long above = static_cast<long>(state.y.size());
  state.nu.resize(ys);
  for (std::size_t l = 0; l < ys; ++l) {
    above -= n[l];
    state.nu[l] = rng.beta(1.0 + static_cast<double>(n[l]), state.c + static_cast<double>(above));
  }
  state.rho = stick_break(state.nu);
  state.mu.resize(ys);
  state.tau.resize(ys);
}

void update_slices(DpmState& state, Rng& rng) {
  state.u.resize(state.y.size());
  for (std::size_t j = 0; j < state.y.size(); ++j) state.u[j] = rng.uniform() * state.rho[state.y[j]];
}

namespace {
constexpr std::size_t kMaxLevels = 100000;
}

std::size_t extend_levels(DpmState& state, Rng& rng) {
  const double umin = *std::min_element(state.u.begin(), state.u.end());
  // sum_{l <= l*} rho_l > 1 - min(u)  <=>  stick left after level l* < min(u).
  double remaining = 1.0;
  std::size_t lstar = 0;
  for (; lstar < state.levels() && remaining >= umin; ++lstar) remaining *= 1.0 - state.nu[lstar];
  state.nu.resize(lstar);
  state.rho.resize(lstar);
  while (remaining >= umin) {
    if (state.nu.size() >= kMaxLevels)
      throw NumericalError("slice sampler needs more than " + std::to_string(kMaxLevels) + " levels");
    const double v = rng.beta(1.0, state.c);
    state.nu.push_back(v);
    state.rho.push_back(v * remaining);
    remaining *= 1.0 - v;
  }
  state.mu.resize(state.levels());
  state.tau.resize(state.levels());
  return state.levels();
}

NormalGammaParams normal_gamma_posterior(const DpmHyperparams& hyper, std::span<const double> w) {
  NormalGammaParams ng{hyper.m0, hyper.s0, hyper.d0 * hyper.p0, hyper.d0};
  const double n = static_cast<double>(w.size());
  if (w.empty()) return ng;
  double wbar = 0.0;
  for (double v : w) wbar += v;
  wbar /= n;
  double ss = 0.0;
  for (double v : w) ss += (v - wbar) * (v - wbar);
  ng.m = (hyper.s0 * hyper.m0 + n * wbar) / (hyper.s0 + n);
  ng.s = hyper.s0 + n;
  ng.dp = hyper.d0 * hyper.p0 + ss + hyper.s0 * n / (hyper.s0 + n) * (hyper.m0 - wbar) * (hyper.m0 - wbar);
  ng.d = hyper.d0 + n;
  return ng;
}

void draw_normal_gamma(const NormalGammaParams& ng, Rng& rng, double& mu, double& tau) {
  tau = rng.gamma(0.5 * ng.d, 0.5 * ng.dp);
  mu = rng.normal(ng.m, 1.0 / std::sqrt(ng.s * tau));
}

void update_atoms(DpmState& state, std::span<const double> w, const DpmHyperparams& hyper,
                  Rng& rng) {
  const std::size_t L = state.levels();
  std::vector<std::vector<double>> members(L);
  for (std::size_t j = 0; j < state.y.size(); ++j) {
    assert(state.y[j] < L);
    members[state.y[j]].push_back(w[j]);
  }
  state.mu.resize(L);
  state.tau.resize(L);
  for (std::size_t l = 0; l < L; ++l)
    draw_normal_gamma(normal_gamma_posterior(hyper, members[l]), rng, state.mu[l], state.tau[l]);
}

void update_allocations(DpmState& state, std::span<const double> w, Rng& rng) {
  const std::size_t L = state.levels();
  std::vector<std::size_t> admissible;
  std::vector<double> logw;
  for (std::size_t j = 0; j < state.y.size(); ++j) {
    admissible.clear();
    logw.clear();
    for (std::size_t l = 0; l < L; ++l) {
      if (state.rho[l] > state.u[j]) {
        admissible.push_back(l);
        logw.push_back(special::normal_log_pdf(w[j], state.mu[l], state.tau[l]));
      }
    }
    if (admissible.empty()) throw NumericalError("slice sampler: no admissible level");
    state.y[j] = admissible[rng.categorical_log(logw)];
  }
}

double mixture_density(const DpmState& state, double z) {
  double f = 0.0;
  for (std::size_t l = 0; l < state.rho.size(); ++l)
    f += state.rho[l] * std::exp(special::lognormal_log_pdf(z, state.mu[l], state.tau[l]));
  return f;
}

double mixture_variance(const DpmState& state) {
  const auto n = state.occupancy();
  double total = 0.0, e1 = 0.0, e2 = 0.0;
  for (std::size_t l = 0; l < state.rho.size(); ++l) {
    if (n[l] == 0) continue;
    const double s2 = 1.0 / state.tau[l];
    total += state.rho[l];
    e1 += state.rho[l] * std::exp(state.mu[l] + 0.5 * s2);
    e2 += state.rho[l] * std::exp(2.0 * state.mu[l] + 2.0 * s2);
  }
  if (!(total > 0.0 && e1 > 0.0)) return 0.0;
  e1 /= total;
  e2 /= total;
  // Scale-free: the variance of Z once the mixture is rescaled to mean one.
  return e2 / (e1 * e1) - 1.0;
}

}  // namespace plpfrail::dpm
