#include "core/hmc.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace plpfrail::dpm {
namespace {

double inv_mass_at(std::span<const double> inv_mass, std::size_t i) {
  return inv_mass.empty() ? 1.0 : inv_mass[i];
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void HmcConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("HMC step size must be positive");
  if (leapfrog_steps < 1) throw ConfigError("HMC needs at least one leapfrog step");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw ConfigError("HMC jitter must be in [0, 1)");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw ConfigError("HMC target acceptance must be in (0, 1)");
  for (double v : mass_diag)
    if (!(v > 0.0)) throw ConfigError("HMC mass entries must be positive");
}

double hamiltonian(const LogDensity& target, std::span<const double> q, std::span<const double> p,
                   std::span<const double> inv_mass) {
  double kinetic = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) kinetic += 0.5 * p[i] * p[i] * inv_mass_at(inv_mass, i);
  return -target(q, {}) + kinetic;
}

bool leapfrog(const LogDensity& target, std::vector<double>& q, std::vector<double>& p,
              double step_size, int steps, std::span<const double> inv_mass) {
  std::vector<double> grad(q.size());
  target(q, grad);
  if (!all_finite(grad)) return false;
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < q.size(); ++i) p[i] += 0.5 * step_size * grad[i];
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += step_size * p[i] * inv_mass_at(inv_mass, i);
    if (!all_finite(q)) return false;
    const double lp = target(q, grad);
    if (!std::isfinite(lp) || !all_finite(grad)) return false;
    for (std::size_t i = 0; i < q.size(); ++i) p[i] += 0.5 * step_size * grad[i];
  }
  return all_finite(p);
}

HmcStep hmc_update(const LogDensity& target, std::vector<double>& q, double step_size, int steps,
                   std::span<const double> inv_mass, Rng& rng) {
  std::vector<double> p(q.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.normal() / std::sqrt(inv_mass_at(inv_mass, i));
  const double h0 = hamiltonian(target, q, p, inv_mass);

  std::vector<double> q_new = q;
  HmcStep out;
  if (!std::isfinite(h0) || !leapfrog(target, q_new, p, step_size, steps, inv_mass)) {
    out.divergent = true;
    return out;
  }
  const double h1 = hamiltonian(target, q_new, p, inv_mass);
  out.energy_change = h1 - h0;
  if (!std::isfinite(h1) || out.energy_change > 1000.0) {
    out.divergent = true;
    return out;
  }
  out.accept_prob = std::min(1.0, std::exp(-out.energy_change));
  if (rng.uniform() < out.accept_prob) {
    q = std::move(q_new);
    out.accepted = true;
  }
  return out;
}

double find_reasonable_step(const LogDensity& target, std::span<const double> q, double initial,
                            std::span<const double> inv_mass, Rng& rng) {
  double eps = initial;
  std::vector<double> p0(q.size());
  for (std::size_t i = 0; i < p0.size(); ++i) p0[i] = rng.normal() / std::sqrt(inv_mass_at(inv_mass, i));
  const double h0 = hamiltonian(target, q, p0, inv_mass);
  auto log_ratio = [&](double e) {
    std::vector<double> qq(q.begin(), q.end());
    std::vector<double> pp = p0;
    if (!leapfrog(target, qq, pp, e, 1, inv_mass)) return -std::numeric_limits<double>::infinity();
    const double h = hamiltonian(target, qq, pp, inv_mass);
    return std::isfinite(h) ? h0 - h : -std::numeric_limits<double>::infinity();
  };
  const double dir = log_ratio(eps) > std::log(0.5) ? 1.0 : -1.0;
  for (int it = 0; it < 60; ++it) {
    const double lr = log_ratio(eps);
    if (dir > 0 ? !(lr > std::log(0.5)) : lr > std::log(0.5)) break;
    eps = dir > 0 ? eps * 2.0 : eps * 0.5;
  }
  return eps;
}

DualAveraging::DualAveraging(double initial_step, double target_accept)
    : mu_(std::log(10.0 * initial_step)), target_(target_accept), step_(initial_step) {}

void DualAveraging::update(double accept_prob) {
  ++t_;
  const double t = static_cast<double>(t_);
  h_bar_ = (1.0 - 1.0 / (t + kT0)) * h_bar_ + (target_ - accept_prob) / (t + kT0);
  const double log_step = mu_ - std::sqrt(t) / kGamma * h_bar_;
  const double w = std::pow(t, -kKappa);
  log_step_bar_ = w * log_step + (1.0 - w) * log_step_bar_;
  step_ = std::exp(log_step);
}

}  // namespace plpfrail::dpm
