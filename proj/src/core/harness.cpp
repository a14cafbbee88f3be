#include "core/harness.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace plpfrail::harness {
namespace {

struct Replicate {
  bool proper = false;
  std::vector<double> estimate;  // same order as report rows
  std::vector<std::uint8_t> covered;
};

Replicate run_one(const sim::SimScenario& base, const plp::PriorConfig& prior,
                  const HarnessOptions& opt, std::size_t rep) {
  sim::SimScenario sc = base;
  sc.seed = Rng::substream(base.seed, {0x7265706cULL, rep}).engine()();
  const auto simulated = sim::simulate(sc);
  const auto counts = data::summarize(simulated.dataset);
  const std::size_t K = sc.design.K;

  Replicate r;
  plp::PlpPosterior post;
  try {
    post = plp::posterior(counts, prior);
  } catch (const NumericalError&) {
    return r;
  }
  r.proper = true;
  const auto est = plp::bayes_estimates(post, opt.level);  // beta_1..K, alpha_1..K
  auto add = [&](const plp::Estimate& e, double truth) {
    r.estimate.push_back(e.mean);
    r.covered.push_back(e.ci_low <= truth && truth <= e.ci_high ? 1 : 0);
  };
  for (std::size_t q = 0; q < K; ++q) add(est[K + q], sc.true_params.alpha[q]);
  for (std::size_t q = 0; q < K; ++q) add(est[q], sc.true_params.beta[q]);

  if (opt.with_mcmc) {
    dpm::ChainOptions co;
    co.iterations = opt.mcmc_iterations;
    co.burn_in = opt.mcmc_burn_in;
    co.seed = sc.seed;
    co.keep_mixture = false;
    const auto trace = dpm::run_chain(simulated.dataset, opt.hyper, opt.hmc, co);
    const auto s = dpm::variance_summary(trace, opt.level);
    const double truth = sc.frailty_variance();
    r.estimate.push_back(s.mean);
    r.covered.push_back(s.ci_low <= truth && truth <= s.ci_high ? 1 : 0);
  }
  return r;
}

}  // namespace

void HarnessOptions::validate() const {
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must be in (0, 1)");
  if (with_mcmc) {
    hyper.validate();
    hmc.validate();
    if (!(mcmc_iterations > mcmc_burn_in)) throw ConfigError("MCMC iterations must exceed burn-in");
  }
}

const ParameterStats& HarnessReport::row(const std::string& parameter) const {
  for (const auto& r : rows)
    if (r.parameter == parameter) return r;
  throw DomainError("report has no row '" + parameter + "'");
}

HarnessReport run_harness(const sim::SimScenario& scenario, const plp::PriorConfig& prior,
                          const HarnessOptions& options, const std::string& label) {
  scenario.validate();
  prior.validate();
  options.validate();
  const std::size_t M = options.replications;
  const std::size_t K = scenario.design.K;

  std::vector<Replicate> reps(M);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, M));
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < M; i += threads) reps[i] = run_one(scenario, prior, options, i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  HarnessReport report;
  report.scenario = label;
  report.eta = scenario.frailty_variance();
  report.m = scenario.design.m;
  report.replications = M;

  std::vector<std::pair<std::string, double>> params;
  for (std::size_t q = 0; q < K; ++q)
    params.emplace_back("alpha_" + std::to_string(q + 1), scenario.true_params.alpha[q]);
  for (std::size_t q = 0; q < K; ++q)
    params.emplace_back("beta_" + std::to_string(q + 1), scenario.true_params.beta[q]);
  if (options.with_mcmc) params.emplace_back("eta", scenario.frailty_variance());

  for (std::size_t p = 0; p < params.size(); ++p) {
    ParameterStats st;
    st.parameter = params[p].first;
    st.truth = params[p].second;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0, cov = 0.0;
    std::size_t used = 0;
    for (const auto& r : reps) {
      if (!r.proper) continue;
      const double e = r.estimate[p] - st.truth;
      sum += e;
      sum2 += e * e;
      sum4 += e * e * e * e;
      cov += r.covered[p];
      ++used;
    }
    report.used = used;
    if (used == 0) {
      st.bias = st.mse = st.coverage = std::nan("");
    } else {
      const double n = static_cast<double>(used);
      st.bias = sum / n;
      st.mse = sum2 / n;
      st.coverage = cov / n;
      const double var = used > 1 ? (sum2 - n * st.bias * st.bias) / (n - 1.0) : 0.0;
      st.bias_se = std::sqrt(std::max(var, 0.0) / n);
      const double var_sq = used > 1 ? (sum4 - n * st.mse * st.mse) / (n - 1.0) : 0.0;
      st.mse_se = std::sqrt(std::max(var_sq, 0.0) / n);
    }
    report.rows.push_back(st);
  }
  return report;
}

sim::SimScenario scenario_preset(const std::string& key, std::size_t m, double eta,
                                 std::uint64_t seed) {
  sim::SimScenario sc;
  sc.design = {20.0, m, 2};
  if (key == "table1") {
    sc.true_params = {{1.2, 0.7}, {5.0, 13.33}};
  } else if (key == "table2") {
    sc.true_params = {{0.75, 1.25}, {9.46, 12.69}};
  } else {
    throw ConfigError("unknown scenario '" + key + "' (expected table1 or table2)");
  }
  sc.eta = eta;
  sc.family = sim::FrailtyFamily::Gamma;
  sc.seed = seed;
  return sc;
}

void write_report_csv(std::ostream& out, const std::vector<HarnessReport>& reports) {
  if (reports.empty()) return;
  std::size_t K = 0;
  for (const auto& r : reports[0].rows)
    if (r.parameter.rfind("alpha_", 0) == 0) ++K;
  out << "eta,statistic,m";
  for (std::size_t q = 0; q < K; ++q) out << ",alpha_" << q + 1;
  for (std::size_t q = 0; q < K; ++q) out << ",beta_" << q + 1;
  out << ",eta_hat\n";
  std::vector<double> etas;
  for (const auto& rep : reports)
    if (std::find(etas.begin(), etas.end(), rep.eta) == etas.end()) etas.push_back(rep.eta);
  for (double eta : etas)
  for (const char* stat : {"Bias", "MSE", "CP"}) {
    for (const auto& rep : reports) {
      if (rep.eta != eta) continue;
      out << data::format_double(rep.eta) << ',' << stat << ',' << rep.m;
      for (std::size_t i = 0; i < 2 * K; ++i) {
        const auto& row = rep.rows[i];
        const double v = stat[0] == 'B' ? row.bias : stat[0] == 'M' ? row.mse : row.coverage;
        out << ',' << data::format_double(v);
      }
      if (rep.rows.size() > 2 * K) {
        const auto& row = rep.rows[2 * K];
        const double v = stat[0] == 'B' ? row.bias : stat[0] == 'M' ? row.mse : row.coverage;
        out << ',' << data::format_double(v);
      } else {
        out << ",NA";
      }
      out << '\n';
    }
  }
}

}  // namespace plpfrail::harness
