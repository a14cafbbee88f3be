#include "core/chain.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "core/errors.hpp"
#include "core/special.hpp"

namespace plpfrail::dpm {

void ChainOptions::validate() const {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (!(iterations > burn_in)) throw ConfigError("iterations must exceed burn-in");
}

std::size_t McmcTrace::divergences() const {
  return static_cast<std::size_t>(std::count(divergent.begin(), divergent.end(), 1));
}

double McmcTrace::acceptance_rate(bool post_burn_in) const {
  const std::size_t from = post_burn_in ? burn_in : 0;
  if (from >= iterations) return 0.0;
  const auto n = std::count(accepted.begin() + static_cast<long>(from), accepted.end(), 1);
  return static_cast<double>(n) / static_cast<double>(iterations - from);
}

double frailty_variance(std::span<const double> z) {
  if (z.size() < 2) throw DomainError("Var(Z) needs at least two systems");
  double ss = 0.0;
  for (double v : z) ss += (v - 1.0) * (v - 1.0);
  return ss / static_cast<double>(z.size() - 1);
}

McmcTrace run_chain(const data::FailureDataset& data, const DpmHyperparams& hyper,
                    const HmcConfig& hmc, const ChainOptions& options) {
  hyper.validate();
  hmc.validate();
  options.validate();
  const std::size_t m = data.design().m;
  if (m < 2) throw ConfigError("the frailty sampler needs at least two systems");
  const auto counts = data::summarize(data);
  std::vector<double> n_j(counts.n_j.begin(), counts.n_j.end());

  Rng rng = Rng::substream(options.seed, {0x636861696eULL});

  // Start from frailties proportional to (n_j + 1), all systems in level 0.
  std::vector<double> z0(m);
  const double mean_n = std::accumulate(n_j.begin(), n_j.end(), 0.0) / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) z0[j] = (n_j[j] + 1.0) / (mean_n + 1.0);
  const double zsum = std::accumulate(z0.begin(), z0.end(), 0.0);
  for (auto& v : z0) v *= static_cast<double>(m) / zsum;
  std::vector<double> z_star = inverse_transform(z0);
  FrailtyVector fv = transform(z_star, m);

  DpmState state;
  state.c = hyper.ac0 / hyper.bc0;
  state.y.assign(m, 0);

  McmcTrace trace;
  trace.m = m;
  trace.iterations = options.iterations;
  trace.burn_in = options.burn_in;
  trace.z.reserve(options.iterations * m);
  for (auto* v : {&trace.var_z, &trace.mixture_var, &trace.c, &trace.accept_prob, &trace.step_size})
    v->reserve(options.iterations);

  const auto inv_mass = [&] {
    std::vector<double> im;
    for (double v : hmc.mass_diag) im.push_back(1.0 / v);
    if (!im.empty() && im.size() != m - 1) throw ConfigError("HMC mass must have length m - 1");
    return im;
  }();

  double step = hmc.step_size;
  std::vector<double> mu_j(m), tau_j(m);
  auto build_target = [&] {
    for (std::size_t j = 0; j < m; ++j) {
      mu_j[j] = state.mu[state.y[j]];
      tau_j[j] = state.tau[state.y[j]];
    }
    const auto target = std::make_shared<FrailtyTarget>(mu_j, tau_j, n_j);
    return LogDensity([target](std::span<const double> q, std::span<double> g) { return (*target)(q, g); });
  };

  bool step_initialized = false;
  DualAveraging adapter(step, hmc.target_accept);

  for (std::size_t it = 0; it < options.iterations; ++it) {
    update_concentration(state, m, state.occupied(), hyper, rng);
    update_sticks(state, rng);
    update_slices(state, rng);
    extend_levels(state, rng);
    update_atoms(state, fv.w, hyper, rng);
    update_allocations(state, fv.w, rng);

    const auto target = build_target();
    if (!step_initialized) {
      if (hmc.adapt) {
        step = find_reasonable_step(target, z_star, hmc.step_size, inv_mass, rng);
        adapter = DualAveraging(step, hmc.target_accept);
      }
      step_initialized = true;
    }
    const bool adapting = hmc.adapt && it < options.burn_in;
    int steps = hmc.leapfrog_steps;
    if (hmc.jitter > 0.0) {
      const double f = 1.0 + hmc.jitter * rng.uniform(-1.0, 1.0);
      steps = std::max(1, static_cast<int>(std::lround(hmc.leapfrog_steps * f)));
    }
    const HmcStep res = hmc_update(target, z_star, step, steps, inv_mass, rng);
    trace.step_size.push_back(step);
    if (adapting) {
      adapter.update(res.divergent ? 0.0 : res.accept_prob);
      step = adapter.step();
      if (it + 1 == options.burn_in) step = adapter.final_step();
    }
    if (res.accepted) fv = transform(z_star, m);

    trace.z.insert(trace.z.end(), fv.z.begin(), fv.z.end());
    trace.var_z.push_back(frailty_variance(fv.z));
    trace.mixture_var.push_back(mixture_variance(state));
    trace.c.push_back(state.c);
    trace.clusters.push_back(state.occupied());
    trace.y_star.push_back(state.y_star());
    trace.accepted.push_back(res.accepted ? 1 : 0);
    trace.divergent.push_back(res.divergent ? 1 : 0);
    trace.accept_prob.push_back(res.accept_prob);
    if (options.keep_mixture && it >= options.burn_in)
      trace.mixtures.push_back({state.rho, state.mu, state.tau});
  }
  return trace;
}

ScalarSummary summarize_draws(std::span<const double> draws, double level) {
  if (draws.empty()) throw DomainError("cannot summarize an empty set of draws");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must be in (0, 1)");
  ScalarSummary s;
  const double n = static_cast<double>(draws.size());
  s.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : draws) ss += (v - s.mean) * (v - s.mean);
  s.sd = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double h = (n - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.ci_low = quantile(0.5 * (1.0 - level));
  s.ci_high = quantile(0.5 * (1.0 + level));
  return s;
}

std::vector<double> posterior_mean_z(const McmcTrace& trace) {
  std::vector<double> zhat(trace.m, 0.0);
  const std::size_t kept = trace.iterations - trace.burn_in;
  for (std::size_t it = trace.burn_in; it < trace.iterations; ++it) {
    const auto z = trace.z_at(it);
    for (std::size_t j = 0; j < trace.m; ++j) zhat[j] += z[j];
  }
  for (auto& v : zhat) v /= static_cast<double>(kept);
  return zhat;
}

ScalarSummary variance_summary(const McmcTrace& trace, double level) {
  return summarize_draws(std::span<const double>(trace.var_z).subspan(trace.burn_in), level);
}

std::vector<double> density_estimate(const DpmState& state, std::span<const double> grid) {
  std::vector<double> f;
  f.reserve(grid.size());
  for (double z : grid) {
    if (!(z > 0.0)) throw DomainError("density grid must be positive");
    f.push_back(mixture_density(state, z));
  }
  return f;
}

std::vector<double> density_estimate(const McmcTrace& trace, std::span<const double> grid) {
  if (trace.mixtures.empty()) throw DomainError("trace holds no post-burn-in mixture states");
  std::vector<double> f(grid.size(), 0.0);
  DpmState s;
  for (const auto& snap : trace.mixtures) {
    s.rho = snap.rho;
    s.mu = snap.mu;
    s.tau = snap.tau;
    const auto one = density_estimate(s, grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += one[i];
  }
  for (auto& v : f) v /= static_cast<double>(trace.mixtures.size());
  return f;
}

}  // namespace plpfrail::dpm
