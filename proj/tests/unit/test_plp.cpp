#include <gtest/gtest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "core/data.hpp"
#include "core/errors.hpp"
#include "core/plp.hpp"
#include "core/rng.hpp"
#include "core/sim.hpp"

using namespace plpfrail;
using namespace plpfrail::plp;

namespace {

data::FailureDataset random_dataset(std::size_t m, std::size_t K, double T, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<std::size_t> sys(1, m), cause(1, K);
  std::uniform_real_distribution<double> t(0.0, T);
  std::vector<data::FailureRecord> recs;
  for (std::size_t i = 0; i < 6 * m; ++i) recs.push_back({sys(eng), cause(eng), t(eng)});
  return data::FailureDataset({T, m, K}, recs);
}

// Warranty-shaped dataset: 76 / 87 / 111 failures of causes 1..3 over 439 cars.
data::FailureDataset warranty_like() {
  std::vector<data::FailureRecord> recs;
  const long counts[3] = {76, 87, 111};
  std::mt19937_64 eng(439);
  std::uniform_real_distribution<double> t(0.0, 100.0);
  std::uniform_int_distribution<std::size_t> car(1, 439);
  for (std::size_t q = 0; q < 3; ++q)
    for (long i = 0; i < counts[q]; ++i) recs.push_back({car(eng), q + 1, t(eng)});
  return data::FailureDataset({100.0, 439, 3}, recs);
}

}  // namespace

TEST(Intensity, Examples) {
  PlpParams p{{1.0}, {5.0}};
  EXPECT_NEAR(intensity(p, 0, 10.0, 20.0, 1.0), 0.25, 1e-15);
  EXPECT_NEAR(intensity(p, 0, 10.0, 20.0, 2.0), 0.50, 1e-15);
  PlpParams p2{{2.0}, {1.0}};
  EXPECT_NEAR(intensity(p2, 0, 0.5, 1.0, 1.0), 1.0, 1e-15);
}

TEST(Intensity, Errors) {
  PlpParams p{{1.0}, {5.0}};
  EXPECT_THROW(intensity(p, 0, 0.0, 20.0), DomainError);
  EXPECT_THROW(intensity(p, 0, 21.0, 20.0), DomainError);
  EXPECT_THROW(intensity(p, 0, 1.0, 20.0, 0.0), DomainError);
  EXPECT_THROW(intensity(p, 1, 1.0, 20.0), DomainError);
}

TEST(MeanFunction, Examples) {
  PlpParams p{{1.2, 0.7}, {5.0, 13.33}};
  EXPECT_DOUBLE_EQ(mean_function(p, 0, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(mean_function(p, 0, 2.0), 10.0);
  EXPECT_DOUBLE_EQ(mean_function(p, 1, 1.0), 13.33);
}

TEST(MeanFunction, IntensityIntegratesToMean) {
  PlpParams p{{1.2, 0.7, 2.5}, {5.0, 13.33, 0.4}};
  const double T = 20.0, z = 1.7;
  for (std::size_t q = 0; q < 3; ++q) {
    // Substitute t = T u^(1/b) to remove the endpoint singularity for b < 1.
    const double b = p.beta[q];
    auto f = [&](double u) {
      const double t = T * std::pow(u, 1.0 / b);
      const double dt = T / b * std::pow(u, 1.0 / b - 1.0);
      return intensity(p, q, t, T, z) * dt;
    };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 10, 1e-13);
    EXPECT_NEAR(integral / (z * p.alpha[q]), 1.0, 1e-8);
  }
}

TEST(AlphaToScale, InvertsMeanFunction) {
  const double mu = alpha_to_scale(5.0, 1.2, 20.0);
  EXPECT_NEAR(std::pow(20.0 / mu, 1.2), 5.0, 1e-12);
}

TEST(LogLikelihood, UnitFrailtyIsNoFrailtyLikelihood) {
  const auto d = random_dataset(6, 2, 10.0, 1);
  PlpParams p{{1.3, 0.8}, {2.0, 4.0}};
  std::vector<double> ones(6, 1.0);
  // No-frailty NHPP likelihood: product of intensities times exp(-sum Lambda).
  double ref = 0.0;
  for (const auto& r : d.records()) {
    const double b = p.beta[r.cause - 1], a = p.alpha[r.cause - 1];
    ref += std::log(b * a * std::pow(r.time, b - 1.0) / std::pow(10.0, b));
  }
  ref -= 6 * (2.0 + 4.0);
  EXPECT_NEAR(log_likelihood(p, ones, d), ref, 1e-9 * std::abs(ref));
}

TEST(LogLikelihood, EqualsProductOfPerSystemContributions) {
  const auto d = random_dataset(8, 3, 5.0, 2);
  PlpParams p{{0.6, 1.0, 2.2}, {1.5, 3.0, 0.7}};
  std::vector<double> z{0.3, 1.2, 2.0, 0.9, 1.1, 0.5, 1.4, 0.6};
  double total = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    double lik = 1.0;
    for (const auto& r : d.system(j)) {
      const double b = p.beta[r.cause - 1], a = p.alpha[r.cause - 1];
      lik *= z[j] * b * a * std::pow(r.time, b - 1.0) * std::pow(5.0, -b);
    }
    lik *= std::exp(-z[j] * (1.5 + 3.0 + 0.7));
    total += std::log(lik);
  }
  EXPECT_NEAR(log_likelihood(p, z, d), total, 1e-9 * std::abs(total));
}

TEST(LogLikelihood, FactorizesOnTheSimplex) {
  const auto d = random_dataset(5, 2, 8.0, 3);
  const auto c = data::summarize(d);
  double log_t_sum = 0.0;
  for (const auto& r : d.records()) log_t_sum += std::log(r.time);
  const double m = 5.0;
  std::vector<double> offsets;
  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int g = 0; g < 40; ++g) {
    PlpParams p{{u(eng), u(eng)}, {u(eng), u(eng)}};
    std::vector<double> z(5);
    double s = 0.0;
    for (auto& v : z) s += (v = u(eng));
    for (auto& v : z) v *= m / s;
    double l1 = 0.0;
    for (std::size_t j = 0; j < 5; ++j) l1 += c.n_j[j] * std::log(z[j]);
    double l2 = 0.0, l3 = 0.0;
    for (std::size_t q = 0; q < 2; ++q) {
      l2 += c.n_q[q] * std::log(p.beta[q]) - p.beta[q] * c.log_ratio_sums[q];
      l3 += c.n_q[q] * std::log(p.alpha[q]) - m * p.alpha[q];
    }
    offsets.push_back(log_likelihood(p, z, d) - l1 - l2 - l3);
  }
  for (double o : offsets) EXPECT_NEAR(o, offsets.front(), 1e-9);
  EXPECT_NEAR(offsets.front(), -log_t_sum, 1e-9);
}

TEST(LogLikelihood, OrthogonalGammaKernels) {
  const auto d = random_dataset(7, 1, 3.0, 5);
  const auto c = data::summarize(d);
  const double n = static_cast<double>(c.n_q[0]);
  const double bhat = n / c.log_ratio_sums[0];
  std::vector<double> z(7, 1.0);
  boost::math::gamma_distribution<> gb(n + 1.0, bhat / n), ga(n + 1.0, 1.0 / 7.0);
  std::vector<double> ratios;
  for (double b : {0.5, 0.9, 1.3, 2.0})
    for (double a : {3.0, 5.0, 6.5}) {
      PlpParams p{{b}, {a}};
      ratios.push_back(log_likelihood(p, z, d) - std::log(boost::math::pdf(gb, b)) -
                       std::log(boost::math::pdf(ga, a)));
    }
  for (double r : ratios) EXPECT_NEAR(r, ratios.front(), 1e-8);
}

TEST(Mle, Examples) {
  const double T = 20.0;
  data::FailureDataset one({T, 1, 1}, {{1, 1, T / std::exp(1.0)}});
  EXPECT_NEAR(mle(one).beta[0], 1.0, 1e-14);
  ASSERT_TRUE(mle(one).classic_mu.has_value());
  EXPECT_NEAR(*mle(one).classic_mu, T, 1e-12);
  data::FailureDataset two({T, 2, 1}, {{1, 1, T * std::exp(-2.0)}, {2, 1, T * std::exp(-2.0)}});
  EXPECT_NEAR(mle(two).beta[0], 0.5, 1e-14);
  EXPECT_FALSE(mle(two).classic_mu.has_value());
}

TEST(Mle, ClassicScale) {
  data::FailureDataset d({10.0, 1, 1}, {{1, 1, 1.0}, {1, 1, 4.0}, {1, 1, 9.0}});
  const auto r = mle(d);
  const double b = 3.0 / (std::log(10.0) * 3 - std::log(36.0));
  EXPECT_NEAR(r.beta[0], b, 1e-13);
  EXPECT_NEAR(*r.classic_mu, 10.0 / std::pow(3.0, 1.0 / b), 1e-12);
}

TEST(Mle, SimulatedWithinThreeStandardErrors) {
  sim::SimScenario sc;
  sc.design = {20.0, 100, 1};
  sc.true_params = {{1.2}, {5.0}};
  sc.seed = 99;
  const auto s = sim::simulate(sc);
  const auto n = static_cast<double>(s.dataset.size());
  const double bhat = mle(s.dataset).beta[0];
  EXPECT_LT(std::abs(bhat - 1.2), 3.0 * 1.2 / std::sqrt(n));
}

TEST(Mle, NoFailuresIsNumericalError) {
  data::FailureDataset d({10.0, 2, 2}, {{1, 1, 1.0}});
  EXPECT_THROW(mle(d), NumericalError);
}

TEST(Posterior, AlphaMarginalFromCounts) {
  const auto post = posterior(warranty_like(), PriorConfig{});
  EXPECT_DOUBLE_EQ(post.alpha[0].shape, 76.0);
  EXPECT_DOUBLE_EQ(post.alpha[0].rate, 439.0);
}

TEST(Posterior, BetaMarginalZetaOne) {
  data::CountSummary c;
  c.m = 3;
  c.K = 1;
  c.n_q = {10};
  c.log_ratio_sums = {10.0};
  const auto post = posterior(c, PriorConfig{1.0});
  EXPECT_DOUBLE_EQ(post.beta[0].shape, 10.0);
  EXPECT_DOUBLE_EQ(post.beta[0].rate, 10.0);
}

TEST(Posterior, ImproperAtBoundary) {
  data::CountSummary c;
  c.m = 3;
  c.K = 1;
  c.n_q = {1};
  c.log_ratio_sums = {2.0};
  EXPECT_THROW(posterior(c, PriorConfig{2.0}), NumericalError);
  EXPECT_NO_THROW(posterior(c, PriorConfig{1.5}));
  c.n_q = {0};
  c.log_ratio_sums = {0.0};
  EXPECT_THROW(posterior(c, PriorConfig{0.0}), NumericalError);
}

TEST(BayesEstimates, WarrantyAlphaRow) {
  const auto est = bayes_estimates(posterior(warranty_like(), PriorConfig{}), 0.95);
  ASSERT_EQ(est.size(), 6u);
  EXPECT_EQ(est[3].parameter, "alpha_1");
  EXPECT_NEAR(est[3].mean, 0.173, 0.0005);
  EXPECT_NEAR(est[4].mean, 0.198, 0.0005);
  EXPECT_NEAR(est[5].mean, 0.253, 0.0005);
  EXPECT_NEAR(est[3].sd, std::sqrt(76.0) / 439.0, 1e-15);
  EXPECT_NEAR(est[3].sd, 0.020, 0.0005);
  EXPECT_NEAR(est[3].ci_low, 0.136, 0.002);
  EXPECT_NEAR(est[3].ci_high, 0.214, 0.002);
  // alpha_hat * m recovers n_q exactly.
  EXPECT_EQ(est[3].mean * 439.0, 76.0);
}

TEST(BayesEstimates, UnbiasedBetaAtZetaTwo) {
  data::CountSummary c;
  c.m = 1;
  c.K = 1;
  c.n_q = {10};
  c.log_ratio_sums = {10.0};
  const auto est = bayes_estimates(posterior(c, PriorConfig{2.0}));
  EXPECT_NEAR(est[0].mean, 0.9, 1e-15);
}

TEST(BayesEstimates, IntervalsMatchBoostQuantiles) {
  const auto post = posterior(warranty_like(), PriorConfig{});
  const auto est = bayes_estimates(post, 0.9);
  boost::math::gamma_distribution<> g(post.beta[1].shape, 1.0 / post.beta[1].rate);
  EXPECT_NEAR(est[1].ci_low, boost::math::quantile(g, 0.05), 1e-12);
  EXPECT_NEAR(est[1].ci_high, boost::math::quantile(g, 0.95), 1e-12);
  EXPECT_THROW(bayes_estimates(post, 1.0), ConfigError);
}

TEST(Duane, ExactPowerLawSlope) {
  const double beta = 1.7, mu = 2.0;
  std::vector<data::FailureRecord> recs;
  for (int i = 1; i <= 25; ++i) recs.push_back({1, 1, mu * std::pow(static_cast<double>(i), 1.0 / beta)});
  data::FailureDataset d({100.0, 1, 1}, recs);
  const auto plot = duane_points(d, 0);
  EXPECT_NEAR(plot.slope, beta, 1e-10);
  EXPECT_NEAR(plot.intercept, -beta * std::log(mu), 1e-10);
}

TEST(Duane, HomogeneousPoissonSlopeNearOne) {
  // Replicate simulations give the sampling SD of the slope.
  auto slope = [](std::uint64_t seed) {
    sim::SimScenario sc;
    sc.design = {20.0, 50, 1};
    sc.true_params = {{1.0}, {10.0}};
    sc.seed = seed;
    return duane_points(sim::simulate(sc).dataset, 0).slope;
  };
  std::vector<double> reps;
  for (std::uint64_t s = 1; s <= 60; ++s) reps.push_back(slope(1000 + s));
  double mean = 0.0, var = 0.0;
  for (double v : reps) mean += v;
  mean /= reps.size();
  for (double v : reps) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (reps.size() - 1));
  EXPECT_LT(std::abs(slope(7) - 1.0), 3.0 * sd);
}

TEST(Duane, MinimalAndDegenerate) {
  data::FailureDataset two({10.0, 1, 1}, {{1, 1, 2.0}, {1, 1, 5.0}});
  const auto plot = duane_points(two, 0);
  EXPECT_EQ(plot.log_time.size(), 2u);
  EXPECT_TRUE(std::isfinite(plot.slope));
  data::FailureDataset one({10.0, 1, 1}, {{1, 1, 2.0}});
  EXPECT_THROW(duane_points(one, 0), NumericalError);
  data::FailureDataset same({10.0, 2, 1}, {{1, 1, 2.0}, {2, 1, 2.0}});
  EXPECT_THROW(duane_points(same, 0), NumericalError);
}
