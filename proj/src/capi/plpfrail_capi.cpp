#include "plpfrail/plpfrail.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "core/chain.hpp"
#include "core/data.hpp"
#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/harness.hpp"
#include "core/plp.hpp"
#include "core/sim.hpp"

using namespace plpfrail;

struct plpf_dataset {
  data::FailureDataset value;
};

struct plpf_trace {
  dpm::McmcTrace value;
};

struct plpf_report {
  harness::HarnessReport value;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
plpf_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PLPF_OK;
  } catch (const ConfigError& e) {
    g_last_error = e.what();
    return PLPF_ERR_CONFIG;
  } catch (const ParseError& e) {
    g_last_error = e.what();
    return PLPF_ERR_DATA;
  } catch (const DomainError& e) {
    g_last_error = e.what();
    return PLPF_ERR_DATA;
  } catch (const NumericalError& e) {
    g_last_error = e.what();
    return PLPF_ERR_NUMERICAL;
  } catch (const IoError& e) {
    g_last_error = e.what();
    return PLPF_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PLPF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PLPF_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw ConfigError(what);
}

void copy_name(char (&dst)[32], const std::string& src) {
  std::memset(dst, 0, sizeof(dst));
  std::strncpy(dst, src.c_str(), sizeof(dst) - 1);
}

sim::SimScenario to_scenario(const plpf_scenario* s) {
  require(s != nullptr, "scenario is null");
  require(s->beta && s->alpha, "scenario beta/alpha are null");
  sim::SimScenario sc;
  sc.design = {s->T, s->m, s->K};
  sc.true_params.beta.assign(s->beta, s->beta + s->K);
  sc.true_params.alpha.assign(s->alpha, s->alpha + s->K);
  sc.eta = s->eta;
  switch (s->family) {
    case PLPF_FRAILTY_GAMMA: sc.family = sim::FrailtyFamily::Gamma; break;
    case PLPF_FRAILTY_POINT_MASS: sc.family = sim::FrailtyFamily::PointMass; break;
    case PLPF_FRAILTY_LOGNORMAL_MIXTURE: {
      sc.family = sim::FrailtyFamily::LogNormalMixture;
      const std::size_t k = s->mixture_components;
      require(k > 0 && s->mixture_weights && s->mixture_log_means && s->mixture_log_sds,
              "log-normal mixture needs components");
      sc.mixture.weights.assign(s->mixture_weights, s->mixture_weights + k);
      sc.mixture.log_means.assign(s->mixture_log_means, s->mixture_log_means + k);
      sc.mixture.log_sds.assign(s->mixture_log_sds, s->mixture_log_sds + k);
      break;
    }
    default: throw ConfigError("unknown frailty family");
  }
  sc.seed = s->seed;
  sc.validate();
  return sc;
}

void to_hyper_hmc(const plpf_mcmc_config* c, dpm::DpmHyperparams& hyper, dpm::HmcConfig& hmc) {
  require(c != nullptr, "MCMC config is null");
  hyper = {c->ac0, c->bc0, c->m0, c->s0, c->d0, c->p0};
  hmc.step_size = c->step_size;
  hmc.leapfrog_steps = c->leapfrog_steps;
  hmc.jitter = c->jitter;
  hmc.adapt = c->adapt != 0;
  hmc.target_accept = c->target_accept;
}

}  // namespace

extern "C" {

const char* plpf_version(void) { return "0.1.0"; }

const char* plpf_last_error(void) { return g_last_error.c_str(); }

plpf_status plpf_dataset_read(const char* path, const plpf_design_overrides* overrides,
                              plpf_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    data::DesignOverrides ov;
    if (overrides) {
      if (overrides->T > 0.0) ov.T = overrides->T;
      if (overrides->m > 0) ov.m = static_cast<std::size_t>(overrides->m);
      if (overrides->K > 0) ov.K = static_cast<std::size_t>(overrides->K);
    }
    *out = new plpf_dataset{data::ingest(path, ov)};
  });
}

plpf_status plpf_dataset_create(double T, size_t m, size_t K, const size_t* system_ids,
                                const size_t* causes, const double* times, size_t n,
                                plpf_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(n == 0 || (system_ids && causes && times), "record arrays are null");
    std::vector<data::FailureRecord> recs(n);
    for (size_t i = 0; i < n; ++i) recs[i] = {system_ids[i], causes[i], times[i]};
    *out = new plpf_dataset{data::FailureDataset({T, m, K}, std::move(recs))};
  });
}

plpf_status plpf_dataset_write(const plpf_dataset* d, const char* path) {
  return guarded([&] {
    require(d && path, "null argument");
    data::write_csv_file(path, d->value);
  });
}

void plpf_dataset_free(plpf_dataset* d) { delete d; }

double plpf_dataset_horizon(const plpf_dataset* d) { return d ? d->value.design().T : 0.0; }
size_t plpf_dataset_systems(const plpf_dataset* d) { return d ? d->value.design().m : 0; }
size_t plpf_dataset_causes(const plpf_dataset* d) { return d ? d->value.design().K : 0; }
size_t plpf_dataset_records(const plpf_dataset* d) { return d ? d->value.size() : 0; }

plpf_status plpf_dataset_counts(const plpf_dataset* d, long* n_jq, long* n_j, long* n_q,
                                double* log_ratio_sums) {
  return guarded([&] {
    require(d != nullptr, "null dataset");
    const auto s = data::summarize(d->value);
    if (n_jq) std::copy(s.n_jq.begin(), s.n_jq.end(), n_jq);
    if (n_j) std::copy(s.n_j.begin(), s.n_j.end(), n_j);
    if (n_q) std::copy(s.n_q.begin(), s.n_q.end(), n_q);
    if (log_ratio_sums) std::copy(s.log_ratio_sums.begin(), s.log_ratio_sums.end(), log_ratio_sums);
  });
}

plpf_status plpf_fit(const plpf_dataset* d, double zeta, double level, plpf_estimate* out,
                     size_t capacity, size_t* count) {
  return guarded([&] {
    require(d != nullptr, "null dataset");
    if (d->value.size() == 0) throw DomainError("dataset has no failures");
    const auto post = plp::posterior(d->value, plp::PriorConfig{zeta});
    const auto est = plp::bayes_estimates(post, level);
    if (count) *count = est.size();
    require(out == nullptr || capacity >= est.size(), "estimate buffer too small");
    if (!out) return;
    for (size_t i = 0; i < est.size(); ++i) {
      copy_name(out[i].parameter, est[i].parameter);
      out[i].mean = est[i].mean;
      out[i].sd = est[i].sd;
      out[i].ci_low = est[i].ci_low;
      out[i].ci_high = est[i].ci_high;
    }
  });
}

plpf_status plpf_mle(const plpf_dataset* d, double* beta, double* classic_mu) {
  return guarded([&] {
    require(d && beta, "null argument");
    const auto r = plp::mle(d->value);
    std::copy(r.beta.begin(), r.beta.end(), beta);
    if (classic_mu) *classic_mu = r.classic_mu.value_or(std::numeric_limits<double>::quiet_NaN());
  });
}

plpf_status plpf_duane(const plpf_dataset* d, size_t cause, double* log_time, double* log_count,
                       size_t capacity, size_t* count, double* slope, double* intercept) {
  return guarded([&] {
    require(d != nullptr, "null dataset");
    require(cause >= 1, "cause index is 1-based");
    const auto p = plp::duane_points(d->value, cause - 1);
    if (count) *count = p.log_time.size();
    if (slope) *slope = p.slope;
    if (intercept) *intercept = p.intercept;
    if (log_time || log_count) {
      require(capacity >= p.log_time.size(), "Duane buffer too small");
      if (log_time) std::copy(p.log_time.begin(), p.log_time.end(), log_time);
      if (log_count) std::copy(p.log_count.begin(), p.log_count.end(), log_count);
    }
  });
}

plpf_status plpf_intensity(const double* beta, const double* alpha, size_t K, size_t cause,
                           double t, double T, double z, double* out) {
  return guarded([&] {
    require(beta && alpha && out, "null argument");
    require(cause >= 1, "cause index is 1-based");
    plp::PlpParams p{{beta, beta + K}, {alpha, alpha + K}};
    p.validate();
    *out = plp::intensity(p, cause - 1, t, T, z);
  });
}

plpf_status plpf_log_likelihood(const plpf_dataset* d, const double* beta, const double* alpha,
                                const double* z, double* out) {
  return guarded([&] {
    require(d && beta && alpha && z && out, "null argument");
    const auto K = d->value.design().K;
    const auto m = d->value.design().m;
    plp::PlpParams p{{beta, beta + K}, {alpha, alpha + K}};
    *out = plp::log_likelihood(p, std::span<const double>(z, m), d->value);
  });
}

plpf_status plpf_scenario_preset(const char* key, size_t m, double eta, uint64_t seed,
                                 double* beta_buf, double* alpha_buf, size_t capacity,
                                 plpf_scenario* out) {
  return guarded([&] {
    require(key && beta_buf && alpha_buf && out, "null argument");
    const auto sc = harness::scenario_preset(key, m, eta, seed);
    require(capacity >= sc.design.K, "parameter buffers too small");
    std::copy(sc.true_params.beta.begin(), sc.true_params.beta.end(), beta_buf);
    std::copy(sc.true_params.alpha.begin(), sc.true_params.alpha.end(), alpha_buf);
    *out = plpf_scenario{};
    out->T = sc.design.T;
    out->m = sc.design.m;
    out->K = sc.design.K;
    out->beta = beta_buf;
    out->alpha = alpha_buf;
    out->eta = sc.eta;
    out->family = PLPF_FRAILTY_GAMMA;
    out->seed = seed;
  });
}

plpf_status plpf_scenario_frailty_variance(const plpf_scenario* s, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = to_scenario(s).frailty_variance();
  });
}

plpf_status plpf_draw_frailties(const plpf_scenario* s, double* z_out) {
  return guarded([&] {
    require(z_out != nullptr, "null argument");
    const auto z = sim::draw_frailties(to_scenario(s));
    std::copy(z.begin(), z.end(), z_out);
  });
}

plpf_status plpf_simulate(const plpf_scenario* s, plpf_dataset** out, double* z_out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    auto r = sim::simulate(to_scenario(s));
    if (z_out) std::copy(r.z.begin(), r.z.end(), z_out);
    *out = new plpf_dataset{std::move(r.dataset)};
  });
}

void plpf_mcmc_config_default(plpf_mcmc_config* c) {
  if (!c) return;
  const dpm::DpmHyperparams h;
  const dpm::HmcConfig hmc;
  const dpm::ChainOptions co;
  *c = plpf_mcmc_config{};
  c->ac0 = h.ac0;
  c->bc0 = h.bc0;
  c->m0 = h.m0;
  c->s0 = h.s0;
  c->d0 = h.d0;
  c->p0 = h.p0;
  c->step_size = hmc.step_size;
  c->leapfrog_steps = hmc.leapfrog_steps;
  c->jitter = hmc.jitter;
  c->adapt = hmc.adapt ? 1 : 0;
  c->target_accept = hmc.target_accept;
  c->iterations = co.iterations;
  c->burn_in = co.burn_in;
  c->seed = co.seed;
  c->keep_mixture = co.keep_mixture ? 1 : 0;
}

plpf_status plpf_mcmc_run(const plpf_dataset* d, const plpf_mcmc_config* c, plpf_trace** out) {
  return guarded([&] {
    require(d && c && out, "null argument");
    dpm::DpmHyperparams hyper;
    dpm::HmcConfig hmc;
    to_hyper_hmc(c, hyper, hmc);
    dpm::ChainOptions co{c->iterations, c->burn_in, c->seed, c->keep_mixture != 0};
    *out = new plpf_trace{dpm::run_chain(d->value, hyper, hmc, co)};
  });
}

void plpf_trace_free(plpf_trace* t) { delete t; }
size_t plpf_trace_iterations(const plpf_trace* t) { return t ? t->value.iterations : 0; }
size_t plpf_trace_burn_in(const plpf_trace* t) { return t ? t->value.burn_in : 0; }
size_t plpf_trace_systems(const plpf_trace* t) { return t ? t->value.m : 0; }
size_t plpf_trace_divergences(const plpf_trace* t) { return t ? t->value.divergences() : 0; }
double plpf_trace_acceptance_rate(const plpf_trace* t) {
  return t ? t->value.acceptance_rate(true) : 0.0;
}

plpf_status plpf_trace_z(const plpf_trace* t, size_t iteration, double* out) {
  return guarded([&] {
    require(t && out, "null argument");
    require(iteration < t->value.iterations, "iteration out of range");
    const auto z = t->value.z_at(iteration);
    std::copy(z.begin(), z.end(), out);
  });
}

plpf_status plpf_trace_series(const plpf_trace* t, plpf_series which, double* out) {
  return guarded([&] {
    require(t && out, "null argument");
    const auto& tr = t->value;
    auto copy = [&](const auto& v) { std::transform(v.begin(), v.end(), out, [](auto x) { return static_cast<double>(x); }); };
    switch (which) {
      case PLPF_SERIES_VAR_Z: copy(tr.var_z); break;
      case PLPF_SERIES_MIXTURE_VAR: copy(tr.mixture_var); break;
      case PLPF_SERIES_CONCENTRATION: copy(tr.c); break;
      case PLPF_SERIES_CLUSTERS: copy(tr.clusters); break;
      case PLPF_SERIES_ACCEPTED: copy(tr.accepted); break;
      case PLPF_SERIES_ACCEPT_PROB: copy(tr.accept_prob); break;
      case PLPF_SERIES_STEP_SIZE: copy(tr.step_size); break;
      case PLPF_SERIES_DIVERGENT: copy(tr.divergent); break;
      default: throw ConfigError("unknown trace series");
    }
  });
}

plpf_status plpf_trace_z_hat(const plpf_trace* t, double* out) {
  return guarded([&] {
    require(t && out, "null argument");
    const auto z = dpm::posterior_mean_z(t->value);
    std::copy(z.begin(), z.end(), out);
  });
}

plpf_status plpf_trace_var_summary(const plpf_trace* t, double level, plpf_summary* out) {
  return guarded([&] {
    require(t && out, "null argument");
    const auto s = dpm::variance_summary(t->value, level);
    *out = {s.mean, s.sd, s.ci_low, s.ci_high};
  });
}

plpf_status plpf_trace_density(const plpf_trace* t, const double* grid, size_t n, double* out) {
  return guarded([&] {
    require(t && grid && out, "null argument");
    const auto f = dpm::density_estimate(t->value, std::span<const double>(grid, n));
    std::copy(f.begin(), f.end(), out);
  });
}

plpf_status plpf_geweke(const double* x, size_t n, double first_frac, double last_frac,
                        plpf_geweke_result* out) {
  return guarded([&] {
    require(x && out, "null argument");
    const auto r = diag::geweke(std::span<const double>(x, n), first_frac, last_frac);
    *out = {r.z_score, r.first_frac, r.last_frac, r.pass ? 1 : 0};
  });
}

plpf_status plpf_autocorrelation(const double* x, size_t n, size_t max_lag, double* out) {
  return guarded([&] {
    require(x && out, "null argument");
    const auto acf = diag::autocorrelation(std::span<const double>(x, n), max_lag);
    std::copy(acf.begin(), acf.end(), out);
  });
}

plpf_status plpf_ess(const double* x, size_t n, double* out) {
  return guarded([&] {
    require(x && out, "null argument");
    *out = diag::ess(std::span<const double>(x, n));
  });
}

plpf_status plpf_summarize_draws(const double* x, size_t n, double level, plpf_summary* out) {
  return guarded([&] {
    require(x && out, "null argument");
    const auto s = dpm::summarize_draws(std::span<const double>(x, n), level);
    *out = {s.mean, s.sd, s.ci_low, s.ci_high};
  });
}

void plpf_harness_options_default(plpf_harness_options* o) {
  if (!o) return;
  const harness::HarnessOptions h;
  *o = plpf_harness_options{};
  o->replications = h.replications;
  o->zeta = plp::PriorConfig{}.zeta;
  o->level = h.level;
  o->with_mcmc = 0;
  plpf_mcmc_config_default(&o->mcmc);
  o->mcmc.iterations = h.mcmc_iterations;
  o->mcmc.burn_in = h.mcmc_burn_in;
  o->mcmc.keep_mixture = 0;
  o->threads = 0;
}

plpf_status plpf_harness_run(const plpf_scenario* s, const plpf_harness_options* o,
                             const char* label, plpf_report** out) {
  return guarded([&] {
    require(o && out, "null argument");
    const auto sc = to_scenario(s);
    harness::HarnessOptions ho;
    ho.replications = o->replications;
    ho.level = o->level;
    ho.with_mcmc = o->with_mcmc != 0;
    to_hyper_hmc(&o->mcmc, ho.hyper, ho.hmc);
    ho.mcmc_iterations = o->mcmc.iterations;
    ho.mcmc_burn_in = o->mcmc.burn_in;
    ho.threads = o->threads;
    *out = new plpf_report{
        harness::run_harness(sc, plp::PriorConfig{o->zeta}, ho, label ? label : "custom")};
  });
}

void plpf_report_free(plpf_report* r) { delete r; }
size_t plpf_report_rows(const plpf_report* r) { return r ? r->value.rows.size() : 0; }
size_t plpf_report_used(const plpf_report* r) { return r ? r->value.used : 0; }

plpf_status plpf_report_row(const plpf_report* r, size_t index, plpf_param_stats* out) {
  return guarded([&] {
    require(r && out, "null argument");
    require(index < r->value.rows.size(), "row index out of range");
    const auto& row = r->value.rows[index];
    copy_name(out->parameter, row.parameter);
    out->truth = row.truth;
    out->bias = row.bias;
    out->mse = row.mse;
    out->coverage = row.coverage;
    out->bias_se = row.bias_se;
    out->mse_se = row.mse_se;
  });
}

plpf_status plpf_reports_write_csv(const plpf_report* const* reports, size_t n, const char* path) {
  return guarded([&] {
    require(reports && path, "null argument");
    std::vector<harness::HarnessReport> all;
    for (size_t i = 0; i < n; ++i) {
      require(reports[i] != nullptr, "null report");
      all.push_back(reports[i]->value);
    }
    std::ofstream f(path);
    if (!f) throw IoError(std::string("cannot write '") + path + "'");
    harness::write_report_csv(f, all);
    if (!f) throw IoError(std::string("write to '") + path + "' failed");
  });
}

}  // extern "C"
