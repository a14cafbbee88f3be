// plpfrail command-line front end: simulate | fit | mcmc | diagnose | benchmark.
//
// Options may also come from a flat `key = value` file given with --config;
// keys use the long flag names (underscores and dashes are interchangeable)
// and anything given on the command line wins.

#include <plpfrail/plpfrail.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

// Carries a process exit code out of the command handlers.
struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

void check(plpf_status s, const std::string& context) {
  if (s != PLPF_OK) throw Failure(static_cast<int>(s), context + ": " + plpf_last_error());
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Failure(PLPF_ERR_CONFIG, std::string("empty entry in ") + what);
    item = item.substr(b, e - b + 1);
    double v = 0.0;
    auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size())
      throw Failure(PLPF_ERR_CONFIG, std::string("bad number '") + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Failure(PLPF_ERR_IO, "cannot write '" + path + "'");
  f.precision(17);
  return f;
}

struct DatasetDeleter {
  void operator()(plpf_dataset* d) const { plpf_dataset_free(d); }
};
struct TraceDeleter {
  void operator()(plpf_trace* t) const { plpf_trace_free(t); }
};
struct ReportDeleter {
  void operator()(plpf_report* r) const { plpf_report_free(r); }
};
using DatasetPtr = std::unique_ptr<plpf_dataset, DatasetDeleter>;
using TracePtr = std::unique_ptr<plpf_trace, TraceDeleter>;
using ReportPtr = std::unique_ptr<plpf_report, ReportDeleter>;

// ---------------------------------------------------------------------------
// Shared option groups

struct DesignOpts {
  double T = 0.0;
  long m = 0;
  long K = 0;

  void add(CLI::App* app) {
    app->add_option("--T", T, "observation horizon (overrides the file header)");
    app->add_option("--m", m, "number of systems (overrides the file header)");
    app->add_option("--K", K, "number of causes (overrides the file header)");
  }
  plpf_design_overrides get() const { return {T, m, K}; }
};

DatasetPtr read_dataset(const std::string& path, const DesignOpts& design) {
  plpf_dataset* d = nullptr;
  const auto ov = design.get();
  check(plpf_dataset_read(path.c_str(), &ov, &d), "reading " + path);
  return DatasetPtr(d);
}

struct McmcOpts {
  plpf_mcmc_config cfg{};

  McmcOpts() { plpf_mcmc_config_default(&cfg); }

  void add(CLI::App* app, bool with_seed) {
    app->add_option("--ac0", cfg.ac0, "concentration prior shape");
    app->add_option("--bc0", cfg.bc0, "concentration prior rate");
    app->add_option("--m0", cfg.m0, "base measure location");
    app->add_option("--s0", cfg.s0, "base measure precision scale");
    app->add_option("--d0", cfg.d0, "base measure degrees of freedom");
    app->add_option("--p0", cfg.p0, "base measure precision scale parameter");
    app->add_option("--step-size", cfg.step_size, "initial HMC step size");
    app->add_option("--leapfrog-steps", cfg.leapfrog_steps, "HMC leapfrog steps");
    app->add_option("--jitter", cfg.jitter, "relative jitter on leapfrog steps");
    app->add_option("--adapt", cfg.adapt, "dual-averaging step adaptation during burn-in (0/1)");
    app->add_option("--target-accept", cfg.target_accept, "adaptation target acceptance");
    app->add_option("--iterations", cfg.iterations, "total MCMC iterations");
    app->add_option("--burn-in", cfg.burn_in, "burn-in iterations");
    if (with_seed) app->add_option("--seed", cfg.seed, "RNG seed");
  }
};

// ---------------------------------------------------------------------------
// simulate

struct ScenarioOpts {
  std::string preset;
  double T = 20.0;
  std::size_t m = 0;
  std::string beta, alpha;
  double eta = 0.0;
  std::string family = "gamma";
  std::string mix_weights, mix_log_means, mix_log_sds;

  std::vector<double> beta_v, alpha_v, w_v, lm_v, ls_v;

  void add(CLI::App* app, bool preset_only) {
    if (!preset_only) {
      app->add_option("--scenario", preset, "named parameter set (table1, table2)");
      app->add_option("--T", T, "observation horizon");
      app->add_option("--m", m, "number of systems");
      app->add_option("--beta", beta, "comma-separated shapes, one per cause");
      app->add_option("--alpha", alpha, "comma-separated expected counts, one per cause");
      app->add_option("--eta", eta, "gamma frailty variance (0: no frailty)");
      app->add_option("--family", family, "frailty family: gamma, point, lognormal-mixture");
      app->add_option("--mix-weights", mix_weights, "mixture weights");
      app->add_option("--mix-log-means", mix_log_means, "mixture log-scale means");
      app->add_option("--mix-log-sds", mix_log_sds, "mixture log-scale SDs");
    }
  }

  plpf_scenario build(std::uint64_t seed) {
    plpf_scenario s{};
    if (!preset.empty()) {
      beta_v.assign(8, 0.0);
      alpha_v.assign(8, 0.0);
      check(plpf_scenario_preset(preset.c_str(), m, eta, seed, beta_v.data(), alpha_v.data(),
                                 beta_v.size(), &s),
            "scenario");
      if (!beta.empty() || !alpha.empty())
        throw Failure(PLPF_ERR_CONFIG, "--scenario cannot be combined with --beta/--alpha");
      s.T = T;
    } else {
      beta_v = parse_list(beta, "--beta");
      alpha_v = parse_list(alpha, "--alpha");
      if (beta_v.empty() || beta_v.size() != alpha_v.size())
        throw Failure(PLPF_ERR_CONFIG, "--beta and --alpha need the same positive number of entries");
      s.T = T;
      s.m = m;
      s.K = beta_v.size();
      s.beta = beta_v.data();
      s.alpha = alpha_v.data();
      s.eta = eta;
      s.seed = seed;
    }
    if (family == "gamma") {
      s.family = PLPF_FRAILTY_GAMMA;
    } else if (family == "point") {
      s.family = PLPF_FRAILTY_POINT_MASS;
    } else if (family == "lognormal-mixture") {
      s.family = PLPF_FRAILTY_LOGNORMAL_MIXTURE;
      w_v = parse_list(mix_weights, "--mix-weights");
      lm_v = parse_list(mix_log_means, "--mix-log-means");
      ls_v = parse_list(mix_log_sds, "--mix-log-sds");
      if (w_v.empty() || w_v.size() != lm_v.size() || w_v.size() != ls_v.size())
        throw Failure(PLPF_ERR_CONFIG, "mixture needs matching --mix-weights/--mix-log-means/--mix-log-sds");
      s.mixture_components = w_v.size();
      s.mixture_weights = w_v.data();
      s.mixture_log_means = lm_v.data();
      s.mixture_log_sds = ls_v.data();
    } else {
      throw Failure(PLPF_ERR_CONFIG, "unknown frailty family '" + family + "'");
    }
    return s;
  }
};

std::string sidecar_path(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size()) + ".truth.csv";
  return out + ".truth.csv";
}

int cmd_simulate(ScenarioOpts& sc, std::uint64_t seed, const std::string& out) {
  auto s = sc.build(seed);
  std::vector<double> z(s.m);
  plpf_dataset* raw = nullptr;
  check(plpf_simulate(&s, &raw, z.data()), "simulate");
  DatasetPtr d(raw);
  check(plpf_dataset_write(d.get(), out.c_str()), "writing " + out);

  const auto truth = sidecar_path(out);
  auto f = open_out(truth);
  f << "system_id,z\n";
  for (std::size_t j = 0; j < z.size(); ++j) f << (j + 1) << ',' << fmt(z[j]) << '\n';
  if (!f) throw Failure(PLPF_ERR_IO, "write to '" + truth + "' failed");

  std::cout << "wrote " << plpf_dataset_records(d.get()) << " failures for " << s.m
            << " systems to " << out << " (truth: " << truth << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit

int cmd_fit(const std::string& path, const DesignOpts& design, double zeta, double level,
            const std::string& out, const std::string& json_out, const std::string& duane_prefix) {
  auto d = read_dataset(path, design);
  const std::size_t K = plpf_dataset_causes(d.get());
  std::vector<plpf_estimate> est(2 * K);
  std::size_t n = 0;
  check(plpf_fit(d.get(), zeta, level, est.data(), est.size(), &n), "fit");

  std::vector<double> beta_mle(K);
  double mu = std::nan("");
  check(plpf_mle(d.get(), beta_mle.data(), &mu), "mle");

  std::ostringstream table;
  table << "parameter,mean,sd,ci_low,ci_high\n";
  for (std::size_t i = 0; i < n; ++i)
    table << est[i].parameter << ',' << fmt(est[i].mean) << ',' << fmt(est[i].sd) << ','
          << fmt(est[i].ci_low) << ',' << fmt(est[i].ci_high) << '\n';
  std::cout << table.str();
  if (!std::isnan(mu))
    std::cout << "classic MLE: beta=" << fmt(beta_mle[0]) << " mu=" << fmt(mu) << '\n';

  if (!out.empty()) {
    auto f = open_out(out);
    f << table.str();
  }
  if (!json_out.empty()) {
    json j;
    j["systems"] = plpf_dataset_systems(d.get());
    j["causes"] = K;
    j["horizon"] = plpf_dataset_horizon(d.get());
    j["zeta"] = zeta;
    j["level"] = level;
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i)
      rows.push_back({{"parameter", est[i].parameter},
                      {"mean", est[i].mean},
                      {"sd", est[i].sd},
                      {"ci_low", est[i].ci_low},
                      {"ci_high", est[i].ci_high}});
    j["estimates"] = rows;
    j["beta_mle"] = beta_mle;
    if (!std::isnan(mu)) j["classic_mle"] = {{"beta", beta_mle[0]}, {"mu", mu}};
    auto f = open_out(json_out);
    f << j.dump(2) << '\n';
  }
  if (!duane_prefix.empty()) {
    for (std::size_t q = 1; q <= K; ++q) {
      std::size_t count = 0;
      double slope = 0.0, intercept = 0.0;
      if (plpf_duane(d.get(), q, nullptr, nullptr, 0, &count, &slope, &intercept) != PLPF_OK) {
        std::cerr << "warning: no Duane plot for cause " << q << ": " << plpf_last_error() << '\n';
        continue;
      }
      std::vector<double> x(count), y(count);
      check(plpf_duane(d.get(), q, x.data(), y.data(), count, &count, &slope, &intercept),
            "duane");
      const auto p = duane_prefix + "_duane_" + std::to_string(q) + ".csv";
      auto f = open_out(p);
      f << "# slope=" << fmt(slope) << "\n# intercept=" << fmt(intercept) << '\n';
      f << "log_time,log_mean_count\n";
      for (std::size_t i = 0; i < count; ++i) f << fmt(x[i]) << ',' << fmt(y[i]) << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// mcmc

int cmd_mcmc(const std::string& path, const DesignOpts& design, const McmcOpts& mo,
             const std::string& prefix, double level, double grid_min, double grid_max,
             std::size_t grid_points) {
  if (mo.cfg.iterations <= mo.cfg.burn_in)
    throw Failure(PLPF_ERR_CONFIG, "--iterations must exceed --burn-in");
  if (grid_points < 2 || !(grid_min > 0.0) || !(grid_max > grid_min))
    throw Failure(PLPF_ERR_CONFIG, "density grid needs 0 < grid-min < grid-max and >= 2 points");
  auto d = read_dataset(path, design);
  plpf_trace* raw = nullptr;
  check(plpf_mcmc_run(d.get(), &mo.cfg, &raw), "mcmc");
  TracePtr t(raw);

  const std::size_t iters = plpf_trace_iterations(t.get());
  const std::size_t m = plpf_trace_systems(t.get());

  {
    auto f = open_out(prefix + "_z.csv");
    f << "iteration";
    for (std::size_t j = 1; j <= m; ++j) f << ",z_" << j;
    f << '\n';
    std::vector<double> z(m);
    for (std::size_t it = 0; it < iters; ++it) {
      check(plpf_trace_z(t.get(), it, z.data()), "trace");
      f << (it + 1);
      for (double v : z) f << ',' << fmt(v);
      f << '\n';
    }
  }
  auto series = [&](plpf_series s) {
    std::vector<double> v(iters);
    check(plpf_trace_series(t.get(), s, v.data()), "trace");
    return v;
  };
  const auto var_z = series(PLPF_SERIES_VAR_Z);
  const auto mix_var = series(PLPF_SERIES_MIXTURE_VAR);
  const auto conc = series(PLPF_SERIES_CONCENTRATION);
  const auto clusters = series(PLPF_SERIES_CLUSTERS);
  const auto accepted = series(PLPF_SERIES_ACCEPTED);
  const auto accept_prob = series(PLPF_SERIES_ACCEPT_PROB);
  const auto step = series(PLPF_SERIES_STEP_SIZE);
  const auto divergent = series(PLPF_SERIES_DIVERGENT);
  {
    auto f = open_out(prefix + "_var_z.csv");
    f << "iteration,var_z,mixture_var\n";
    for (std::size_t it = 0; it < iters; ++it)
      f << (it + 1) << ',' << fmt(var_z[it]) << ',' << fmt(mix_var[it]) << '\n';
  }
  {
    auto f = open_out(prefix + "_c.csv");
    f << "iteration,c,clusters\n";
    for (std::size_t it = 0; it < iters; ++it)
      f << (it + 1) << ',' << fmt(conc[it]) << ',' << fmt(clusters[it]) << '\n';
  }
  {
    auto f = open_out(prefix + "_accept.csv");
    f << "iteration,accepted,accept_prob,step_size,divergent\n";
    for (std::size_t it = 0; it < iters; ++it)
      f << (it + 1) << ',' << fmt(accepted[it]) << ',' << fmt(accept_prob[it]) << ','
        << fmt(step[it]) << ',' << fmt(divergent[it]) << '\n';
  }
  std::vector<double> zhat(m);
  check(plpf_trace_z_hat(t.get(), zhat.data()), "z_hat");
  {
    std::vector<long> n_j(m);
    check(plpf_dataset_counts(d.get(), nullptr, n_j.data(), nullptr, nullptr), "counts");
    auto f = open_out(prefix + "_zhat.csv");
    f << "system_id,z_hat,n_failures\n";
    for (std::size_t j = 0; j < m; ++j) f << (j + 1) << ',' << fmt(zhat[j]) << ',' << n_j[j] << '\n';
  }
  {
    std::vector<double> grid(grid_points), dens(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
      grid[i] = grid_min + (grid_max - grid_min) * static_cast<double>(i) / (grid_points - 1);
    check(plpf_trace_density(t.get(), grid.data(), grid.size(), dens.data()), "density");
    auto f = open_out(prefix + "_density.csv");
    f << "z,density\n";
    for (std::size_t i = 0; i < grid_points; ++i) f << fmt(grid[i]) << ',' << fmt(dens[i]) << '\n';
  }

  plpf_summary vs{};
  check(plpf_trace_var_summary(t.get(), level, &vs), "summary");
  const std::size_t burn = plpf_trace_burn_in(t.get());
  const std::size_t kept = iters - burn;
  plpf_summary ms{};
  check(plpf_summarize_draws(mix_var.data() + burn, kept, level, &ms), "summary");
  plpf_summary cs{};
  check(plpf_summarize_draws(conc.data() + burn, kept, level, &cs), "summary");
  plpf_geweke_result g{};
  const bool have_geweke = plpf_geweke(var_z.data() + burn, kept, 0.1, 0.5, &g) == PLPF_OK;
  double ess = 0.0;
  check(plpf_ess(var_z.data() + burn, kept, &ess), "ess");

  const std::size_t div = plpf_trace_divergences(t.get());
  json j;
  j["systems"] = m;
  j["iterations"] = iters;
  j["burn_in"] = burn;
  j["seed"] = mo.cfg.seed;
  j["acceptance_rate"] = plpf_trace_acceptance_rate(t.get());
  j["divergences"] = div;
  j["final_step_size"] = step.back();
  // Mixture variances are heavy-tailed (levels with small precision), so the
  // median is reported next to the mean.
  auto summ = [&](const plpf_summary& s, const std::vector<double>& series) {
    std::vector<double> post(series.begin() + static_cast<std::ptrdiff_t>(burn), series.end());
    const auto mid = post.begin() + static_cast<std::ptrdiff_t>(post.size() / 2);
    std::nth_element(post.begin(), mid, post.end());
    return json{{"mean", s.mean}, {"median", *mid}, {"sd", s.sd}, {"ci_low", s.ci_low},
                {"ci_high", s.ci_high}};
  };
  j["var_z"] = summ(vs, var_z);
  j["mixture_var"] = summ(ms, mix_var);
  j["concentration"] = summ(cs, conc);
  j["var_z_ess"] = ess;
  if (have_geweke)
    j["var_z_geweke"] = {{"z_score", g.z_score}, {"pass", g.pass != 0}};
  {
    auto f = open_out(prefix + "_summary.json");
    f << j.dump(2) << '\n';
  }
  std::cout << "Var(Z): mean " << fmt(vs.mean) << " sd " << fmt(vs.sd) << " interval ["
            << fmt(vs.ci_low) << ", " << fmt(vs.ci_high) << "]\n"
            << "acceptance " << fmt(plpf_trace_acceptance_rate(t.get())) << ", divergences " << div
            << " of " << iters << '\n';
  if (2 * div > iters) {
    std::cerr << "warning: more than half of the HMC transitions diverged\n";
    return PLPF_ERR_NUMERICAL;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose

std::vector<double> read_column(const std::string& path, const std::string& column) {
  std::ifstream f(path);
  if (!f) throw Failure(PLPF_ERR_IO, "cannot open '" + path + "'");
  std::string line;
  std::vector<std::string> header;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    break;
  }
  if (header.empty()) throw Failure(PLPF_ERR_DATA, path + ": missing header");
  std::size_t col = header.size();
  if (column.empty()) {
    col = header.size() > 1 ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == column) col = i;
    if (col == header.size()) throw Failure(PLPF_ERR_CONFIG, "no column '" + column + "' in " + path);
  }
  std::vector<double> out;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i)
      if (!std::getline(ss, cell, ','))
        throw Failure(PLPF_ERR_DATA, path + ": line " + std::to_string(lineno) + ": too few fields");
    double v = 0.0;
    auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size())
      throw Failure(PLPF_ERR_DATA, path + ": line " + std::to_string(lineno) + ": bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_diagnose(const std::string& path, const std::string& column, std::size_t skip,
                 double first, double last, std::size_t max_lag, const std::string& json_out) {
  auto x = read_column(path, column);
  if (skip >= x.size()) throw Failure(PLPF_ERR_CONFIG, "--skip removes every draw");
  x.erase(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(skip));
  plpf_geweke_result g{};
  check(plpf_geweke(x.data(), x.size(), first, last, &g), "geweke");
  const std::size_t lag = std::min(max_lag, x.size() - 1);
  std::vector<double> acf(lag + 1);
  check(plpf_autocorrelation(x.data(), x.size(), lag, acf.data()), "autocorrelation");
  double ess = 0.0;
  check(plpf_ess(x.data(), x.size(), &ess), "ess");
  plpf_summary s{};
  check(plpf_summarize_draws(x.data(), x.size(), 0.95, &s), "summary");

  std::cout << "draws " << x.size() << "\nmean " << fmt(s.mean) << " sd " << fmt(s.sd)
            << "\ngeweke z " << fmt(g.z_score) << (g.pass ? " (pass)" : " (fail)") << "\ness "
            << fmt(ess) << "\nacf(1) " << (lag >= 1 ? fmt(acf[1]) : std::string("NA")) << '\n';
  if (!json_out.empty()) {
    json j;
    j["draws"] = x.size();
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["geweke"] = {{"z_score", g.z_score}, {"first_frac", g.first_frac},
                   {"last_frac", g.last_frac}, {"pass", g.pass != 0}};
    j["ess"] = ess;
    j["acf"] = acf;
    auto f = open_out(json_out);
    f << j.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

int cmd_benchmark(const std::string& scenario, const std::string& m_list,
                  const std::string& eta_list, double T, const plpf_harness_options& ho,
                  std::uint64_t seed, const std::string& out) {
  const auto ms = parse_list(m_list, "--m");
  const auto etas = parse_list(eta_list, "--eta");
  if (ms.empty() || etas.empty()) throw Failure(PLPF_ERR_CONFIG, "--m and --eta need at least one value");
  std::vector<ReportPtr> reports;
  std::size_t cell = 0;
  for (double eta : etas) {
    for (double mv : ms) {
      if (!(mv >= 1.0) || mv != std::floor(mv)) throw Failure(PLPF_ERR_CONFIG, "--m entries must be positive integers");
      std::vector<double> beta(8), alpha(8);
      plpf_scenario s{};
      // Each (eta, m) cell draws from its own seed so that adding cells
      // leaves existing ones unchanged.
      const std::uint64_t cell_seed = seed + 1000003ULL * cell++;
      check(plpf_scenario_preset(scenario.c_str(), static_cast<std::size_t>(mv), eta, cell_seed,
                                 beta.data(), alpha.data(), beta.size(), &s),
            "scenario");
      s.T = T;
      plpf_report* r = nullptr;
      check(plpf_harness_run(&s, &ho, scenario.c_str(), &r), "harness");
      reports.emplace_back(r);
      std::cerr << "eta=" << fmt(eta) << " m=" << fmt(mv) << ": " << plpf_report_used(r) << '/'
                << ho.replications << " replications used\n";
    }
  }
  std::vector<const plpf_report*> view;
  for (auto& r : reports) view.push_back(r.get());
  check(plpf_reports_write_csv(view.data(), view.size(), out.c_str()), "writing " + out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// config file handling

std::string normalize_key(std::string k) {
  for (auto& c : k)
    if (c == '_') c = '-';
  return k;
}

// Splices `--key value` pairs from the config file in front of the
// command-line arguments, skipping keys the command line already sets.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return rest;

  std::set<std::string> given;
  for (const auto& a : rest)
    if (a.rfind("--", 0) == 0) given.insert(normalize_key(a.substr(2, a.find('=') - 2)));

  std::ifstream f(config);
  if (!f) throw Failure(PLPF_ERR_CONFIG, "cannot open config file '" + config + "'");
  std::vector<std::string> injected;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Failure(PLPF_ERR_CONFIG, config + ": line " + std::to_string(lineno) + ": expected key = value");
    const auto key = normalize_key(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty() || key == "command") continue;
    if (given.count(key)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  // Options belong to the subcommand, so they go after its name.
  std::vector<std::string> out;
  std::size_t i = 0;
  if (!rest.empty() && rest[0].rfind("-", 0) != 0) out.push_back(rest[i++]);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(i), rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian frailty power-law process models for multiple repairable systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", plpf_version());
  app.add_option("--config", "flat key = value file; command-line flags take precedence");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate failure histories with known frailties");
  ScenarioOpts sim_sc;
  sim_sc.add(sim, false);
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  sim->add_option("--seed", sim_seed, "RNG seed")->required();
  sim->add_option("--out", sim_out, "output dataset CSV")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "closed-form posterior summaries for beta and alpha");
  std::string fit_data, fit_out, fit_json, fit_duane;
  DesignOpts fit_design;
  double fit_zeta = 2.0, fit_level = 0.95;
  fit->add_option("--data", fit_data, "failure data CSV")->required();
  fit_design.add(fit);
  fit->add_option("--zeta", fit_zeta, "prior exponent on beta");
  fit->add_option("--level", fit_level, "credible interval level");
  fit->add_option("--out", fit_out, "estimates CSV");
  fit->add_option("--json", fit_json, "estimates JSON");
  fit->add_option("--duane-prefix", fit_duane, "write <prefix>_duane_<q>.csv per cause");

  // mcmc
  auto* mc = app.add_subcommand("mcmc", "DPM frailty sampler");
  std::string mc_data, mc_prefix;
  DesignOpts mc_design;
  McmcOpts mc_opts;
  double mc_level = 0.95, grid_min = 0.01, grid_max = 5.0;
  std::size_t grid_points = 200;
  mc->add_option("--data", mc_data, "failure data CSV")->required();
  mc_design.add(mc);
  mc_opts.add(mc, true);
  mc->add_option("--out-prefix", mc_prefix, "prefix for trace and summary files")->required();
  mc->add_option("--level", mc_level, "credible interval level");
  mc->add_option("--grid-min", grid_min, "density grid lower end");
  mc->add_option("--grid-max", grid_max, "density grid upper end");
  mc->add_option("--grid-points", grid_points, "density grid size");

  // diagnose
  auto* dg = app.add_subcommand("diagnose", "Geweke, autocorrelation and ESS for one trace column");
  std::string dg_input, dg_column, dg_json;
  std::size_t dg_skip = 0, dg_lag = 50;
  double dg_first = 0.1, dg_last = 0.5;
  dg->add_option("--input", dg_input, "trace CSV")->required();
  dg->add_option("--column", dg_column, "column name (default: second column)");
  dg->add_option("--skip", dg_skip, "leading draws to discard");
  dg->add_option("--first", dg_first, "Geweke first window fraction");
  dg->add_option("--last", dg_last, "Geweke last window fraction");
  dg->add_option("--max-lag", dg_lag, "largest autocorrelation lag");
  dg->add_option("--json", dg_json, "write results as JSON");

  // benchmark
  auto* bm = app.add_subcommand("benchmark", "Monte Carlo bias / MSE / coverage tables");
  std::string bm_scenario = "table1", bm_m = "10,50,100", bm_eta = "0.5,1", bm_out;
  double bm_T = 20.0;
  std::optional<std::uint64_t> bm_seed;
  plpf_harness_options bm_opts{};
  plpf_harness_options_default(&bm_opts);
  bm->add_option("--scenario", bm_scenario, "named parameter set (table1, table2)");
  bm->add_option("--m", bm_m, "comma-separated numbers of systems");
  bm->add_option("--eta", bm_eta, "comma-separated frailty variances");
  bm->add_option("--T", bm_T, "observation horizon");
  bm->add_option("--replications", bm_opts.replications, "Monte Carlo replications per cell");
  bm->add_option("--zeta", bm_opts.zeta, "prior exponent on beta");
  bm->add_option("--level", bm_opts.level, "credible interval level");
  bm->add_option("--with-mcmc", bm_opts.with_mcmc, "also estimate eta by a short DPM chain (0/1)");
  bm->add_option("--threads", bm_opts.threads, "worker threads (0: all cores)");
  McmcOpts bm_mcmc;
  bm_mcmc.cfg = bm_opts.mcmc;
  bm_mcmc.add(bm, false);
  bm->add_option("--seed", bm_seed, "RNG seed")->required();
  bm->add_option("--out", bm_out, "report CSV")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return PLPF_ERR_CONFIG;
    }

    if (sim->parsed()) return cmd_simulate(sim_sc, *sim_seed, sim_out);
    if (fit->parsed())
      return cmd_fit(fit_data, fit_design, fit_zeta, fit_level, fit_out, fit_json, fit_duane);
    if (mc->parsed())
      return cmd_mcmc(mc_data, mc_design, mc_opts, mc_prefix, mc_level, grid_min, grid_max,
                      grid_points);
    if (dg->parsed())
      return cmd_diagnose(dg_input, dg_column, dg_skip, dg_first, dg_last, dg_lag, dg_json);
    if (bm->parsed()) {
      bm_opts.mcmc = bm_mcmc.cfg;
      bm_opts.mcmc.seed = *bm_seed;
      return cmd_benchmark(bm_scenario, bm_m, bm_eta, bm_T, bm_opts, *bm_seed, bm_out);
    }
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return PLPF_ERR_INTERNAL;
  }
  return 0;
}
