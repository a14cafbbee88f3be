#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "core/chain.hpp"
#include "core/errors.hpp"
#include "core/sim.hpp"

using namespace plpfrail;
using namespace plpfrail::dpm;

namespace {

data::FailureDataset synthetic(std::size_t m, double eta, std::uint64_t seed) {
  sim::SimScenario s;
  s.design = {20.0, m, 2};
  s.true_params = {{1.2, 0.7}, {5.0, 13.33}};
  s.eta = eta;
  s.seed = seed;
  return sim::simulate(s).dataset;
}

}  // namespace

TEST(FrailtyVariance, Examples) {
  EXPECT_EQ(frailty_variance(std::vector<double>(5, 1.0)), 0.0);
  EXPECT_DOUBLE_EQ(frailty_variance(std::vector<double>{0.5, 1.5}), 0.5);
  EXPECT_DOUBLE_EQ(frailty_variance(std::vector<double>{1.5, 0.5}), 0.5);
  EXPECT_THROW(frailty_variance(std::vector<double>{1.0}), DomainError);
}

TEST(ChainOptions, IterationsMustExceedBurnIn) {
  ChainOptions o;
  o.iterations = 100;
  o.burn_in = 200;
  EXPECT_THROW(o.validate(), ConfigError);
  o.burn_in = 100;
  EXPECT_THROW(o.validate(), ConfigError);
}

TEST(RunChain, NeedsTwoSystems) {
  data::FailureDataset d({10.0, 1, 1}, {{1, 1, 2.0}});
  EXPECT_THROW(run_chain(d, {}, {}, {200, 100, 1, false}), ConfigError);
}

TEST(RunChain, ConstraintHoldsEveryIteration) {
  const auto d = synthetic(30, 1.0, 1);
  const auto tr = run_chain(d, {}, {}, {600, 300, 3, true});
  ASSERT_EQ(tr.z.size(), 600u * 30u);
  for (std::size_t it = 0; it < tr.iterations; ++it) {
    const auto z = tr.z_at(it);
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / 30.0;
    ASSERT_NEAR(mean, 1.0, 1e-10) << "iteration " << it;
    for (double v : z) ASSERT_GT(v, 0.0);
  }
  const auto zhat = posterior_mean_z(tr);
  EXPECT_NEAR(std::accumulate(zhat.begin(), zhat.end(), 0.0) / 30.0, 1.0, 1e-10);
  EXPECT_EQ(tr.mixtures.size(), 300u);
  EXPECT_EQ(tr.var_z.size(), 600u);
}

TEST(RunChain, Deterministic) {
  const auto d = synthetic(15, 0.5, 2);
  const auto a = run_chain(d, {}, {}, {300, 100, 9, false});
  const auto b = run_chain(d, {}, {}, {300, 100, 9, false});
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.c, b.c);
  const auto c = run_chain(d, {}, {}, {300, 100, 10, false});
  EXPECT_NE(a.z, c.z);
}

TEST(RunChain, ExchangeableSystemsGiveUnitFrailties) {
  // Every system has the same history and the base measure pins the log
  // frailties tightly around zero.
  std::vector<data::FailureRecord> recs;
  for (std::size_t j = 1; j <= 20; ++j)
    for (double t : {1.0, 4.0, 9.0, 15.0}) recs.push_back({j, 1, t});
  data::FailureDataset d({20.0, 20, 1}, recs);
  DpmHyperparams h;
  h.d0 = 400.0;
  h.p0 = 0.0025;
  h.s0 = 1000.0;
  const auto tr = run_chain(d, h, {}, {2000, 1000, 4, false});
  for (double z : posterior_mean_z(tr)) EXPECT_NEAR(z, 1.0, 0.05);
}

TEST(RunChain, FrailtyEstimatesTrackCounts) {
  const auto d = synthetic(60, 1.0, 5);
  const auto counts = data::summarize(d);
  const auto tr = run_chain(d, {}, {}, {1500, 500, 6, false});
  const auto zhat = posterior_mean_z(tr);
  // Rank agreement between n_j and z_hat_j.
  std::size_t concordant = 0, pairs = 0;
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t k = i + 1; k < 60; ++k) {
      if (counts.n_j[i] == counts.n_j[k]) continue;
      ++pairs;
      concordant += (counts.n_j[i] < counts.n_j[k]) == (zhat[i] < zhat[k]);
    }
  EXPECT_GT(static_cast<double>(concordant) / pairs, 0.95);
}

TEST(RunChain, AcceptanceNearTarget) {
  const auto d = synthetic(40, 1.0, 7);
  const auto tr = run_chain(d, {}, {}, {3000, 1500, 8, false});
  double mean = 0.0;
  for (std::size_t it = tr.burn_in; it < tr.iterations; ++it) mean += tr.accept_prob[it];
  mean /= static_cast<double>(tr.iterations - tr.burn_in);
  EXPECT_GE(mean, 0.6);
  EXPECT_LE(mean, 0.95);
  EXPECT_LT(tr.divergences(), tr.iterations / 20);
}

TEST(Summaries, DrawsAndDensity) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto s = summarize_draws(x, 0.5);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.sd, std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(s.ci_low, 2.0);
  EXPECT_DOUBLE_EQ(s.ci_high, 4.0);
  EXPECT_THROW(summarize_draws(std::vector<double>{}, 0.9), DomainError);

  const auto d = synthetic(20, 1.0, 9);
  const auto tr = run_chain(d, {}, {}, {400, 200, 2, true});
  std::vector<double> grid;
  for (int i = 1; i <= 2000; ++i) grid.push_back(i * 0.005);
  const auto f = density_estimate(tr, grid);
  double integral = 0.0;
  for (double v : f) {
    EXPECT_GE(v, 0.0);
    integral += v * 0.005;
  }
  EXPECT_GT(integral, 0.8);
  EXPECT_LT(integral, 1.05);
  const auto vs = variance_summary(tr, 0.95);
  EXPECT_LE(vs.ci_low, vs.mean);
  EXPECT_GE(vs.ci_high, vs.mean);
}
