#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "acprobit/ac_sampler.hpp"
#include "acprobit/errors.hpp"
#include "oracles.hpp"

using acprobit::ChainVariant;
using acprobit::Dataset;
using acprobit::GaussianPrior;
using acprobit::PosteriorModel;

namespace {

PosteriorModel small_model() {
  Eigen::MatrixXd x(6, 2);
  x << 1, 0.3, 1, -1.2, 1, 0.8, 1, 2.0, 1, -0.5, 1, 0.1;
  return PosteriorModel::build(Dataset(x, {1, 0, 1, 1, 0, 0}), GaussianPrior::scaled_identity(2, 0.5));
}

// Mean and batch-means standard error of a correlated series.
oracle::MeanSe batch_mean_se(const std::vector<double>& v, int batches) {
  const std::size_t len = v.size() / batches;
  std::vector<double> means(batches);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[b * len + i];
    means[b] = s / len;
  }
  return oracle::mean_se(means);
}

}  // namespace

TEST(ChainVariant, Names) {
  for (auto v : {ChainVariant::beta_chain, ChainVariant::gamma_chain, ChainVariant::z_chain}) {
    EXPECT_EQ(acprobit::chain_variant_from_string(acprobit::to_string(v)), v);
  }
  EXPECT_EQ(acprobit::chain_variant_from_string("gamma"), ChainVariant::gamma_chain);
  EXPECT_THROW(acprobit::chain_variant_from_string("delta"), acprobit::InvalidInput);
}

TEST(RunChain, DeterministicInSeed) {
  const auto model = small_model();
  for (auto v : {ChainVariant::beta_chain, ChainVariant::gamma_chain, ChainVariant::z_chain}) {
    const Eigen::VectorXd start = v == ChainVariant::z_chain ? acprobit::varphi(model, model.mode())
                                                             : Eigen::VectorXd::Zero(2);
    const auto a = acprobit::run_chain(model, v, start, 50, 42);
    const auto b = acprobit::run_chain(model, v, start, 50, 42);
    const auto c = acprobit::run_chain(model, v, start, 50, 43);
    ASSERT_EQ(a.states.size(), 51u);
    EXPECT_EQ(a.states.front(), start);
    for (std::size_t i = 0; i < a.states.size(); ++i) EXPECT_EQ(a.states[i], b.states[i]);
    EXPECT_NE(a.states.back(), c.states.back());
    EXPECT_EQ(a.seed, 42u);
    EXPECT_EQ(a.variant, v);
  }
}

TEST(RunChain, RejectsBadArguments) {
  const auto model = small_model();
  EXPECT_THROW(acprobit::run_chain(model, ChainVariant::beta_chain, Eigen::VectorXd::Zero(3), 5, 1),
               acprobit::InvalidInput);
  EXPECT_THROW(acprobit::run_chain(model, ChainVariant::beta_chain, Eigen::VectorXd::Zero(2), -1, 1),
               acprobit::InvalidInput);
}

TEST(DrawLatent, SignsFollowResponses) {
  const auto model = small_model();
  acprobit::Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd z = acprobit::draw_latent(model, Eigen::Vector2d(0.5, -2.0), rng);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(z(i) > 0, model.data().y()[i] == 1);
  }
}

TEST(DrawBeta, ConditionalMomentsMatchSigmaInverse) {
  const auto model = small_model();
  const Eigen::VectorXd z = acprobit::varphi(model, model.mode());
  const Eigen::VectorXd mean = model.latent_to_beta_mean(z);
  acprobit::Rng rng(2);
  const int n = 200000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  for (int t = 0; t < n; ++t) {
    const Eigen::Vector2d d = acprobit::draw_beta_given_latent(model, z, rng) - mean;
    sum += d;
    outer += d * d.transpose();
  }
  const Eigen::Matrix2d cov = outer / n;
  const Eigen::Matrix2d sigma_inv = model.sigma().matrix().inverse();
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(sum(j) / n, 0.0, 5 * std::sqrt(sigma_inv(j, j) / n));
  EXPECT_LE((cov - sigma_inv).norm(), 0.02 * sigma_inv.norm());
}

TEST(GammaOfLatent, Definition) {
  const auto model = small_model();
  const Eigen::VectorXd z = acprobit::varphi(model, Eigen::Vector2d(1.0, 1.0));
  const Eigen::VectorXd direct =
      model.sigma_sqrt().matrix() * (model.solve(model.data().x().transpose() * z + model.prior_shift()) -
                                     model.mode());
  EXPECT_LE((acprobit::gamma_of_latent(model, z) - direct).norm(), 1e-12);
  // The mode is a fixed point of the mean map, so varphi(mode) maps to gamma = 0.
  EXPECT_LE(acprobit::gamma_of_latent(model, acprobit::varphi(model, model.mode())).norm(), 1e-6);
}

TEST(AcStep, OneStepMeanIsTheMeanMap) {
  const auto model = small_model();
  for (const Eigen::Vector2d beta : {Eigen::Vector2d(model.mode()), Eigen::Vector2d(1.5, -0.7)}) {
    const Eigen::VectorXd expect = model.latent_to_beta_mean(acprobit::varphi(model, beta));
    acprobit::Rng rng(3);
    const int n = 100000;
    std::vector<double> c0(n), c1(n);
    for (int t = 0; t < n; ++t) {
      const Eigen::VectorXd b = acprobit::ac_step(model, beta, rng);
      c0[t] = b(0);
      c1[t] = b(1);
    }
    const auto m0 = oracle::mean_se(c0);
    const auto m1 = oracle::mean_se(c1);
    EXPECT_NEAR(m0.mean, expect(0), 5 * m0.se);
    EXPECT_NEAR(m1.mean, expect(1), 5 * m1.se);
  }
}

TEST(AcChain, StationaryMeanForSingleObservation) {
  // One success, intercept only, prior N(0, 1): the posterior mean is
  // 2 E[b Phi(b)] = 2 phi(0; 0, 2) = 1/sqrt(pi).
  const auto model = PosteriorModel::build(Dataset(Eigen::MatrixXd::Ones(1, 1), {1}),
                                           GaussianPrior::scaled_identity(1, 1.0));
  const auto trace = acprobit::run_chain(model, ChainVariant::beta_chain, Eigen::VectorXd::Zero(1),
                                         200000, 5);
  std::vector<double> xs;
  for (std::size_t i = 1000; i < trace.states.size(); ++i) xs.push_back(trace.states[i](0));
  const auto ms = batch_mean_se(xs, 100);
  EXPECT_NEAR(ms.mean, 1.0 / std::sqrt(std::numbers::pi), 5 * ms.se);
}

TEST(FlippedChains, ShareTheBetaMarginal) {
  // Mapping the gamma and z chains back to beta gives the same stationary mean.
  const auto model = small_model();
  const long steps = 100000;
  const auto tb = acprobit::run_chain(model, ChainVariant::beta_chain, model.mode(), steps, 11);
  const auto tg = acprobit::run_chain(model, ChainVariant::gamma_chain, Eigen::VectorXd::Zero(2), steps, 12);
  std::vector<double> b0, g0;
  for (long i = 1; i <= steps; ++i) {
    b0.push_back(tb.states[i](0));
    // E(B | gamma) = Sigma^{-1/2} gamma + mode.
    g0.push_back((model.sigma_inv_sqrt().matrix() * tg.states[i] + model.mode())(0));
  }
  const auto mb = batch_mean_se(b0, 100);
  const auto mg = batch_mean_se(g0, 100);
  EXPECT_NEAR(mb.mean, mg.mean, 5 * std::hypot(mb.se, mg.se));
}

TEST(ZStep, StaysInTheOrthant) {
  const auto model = small_model();
  acprobit::Rng rng(6);
  Eigen::VectorXd z = acprobit::varphi(model, model.mode());
  for (int t = 0; t < 100; ++t) {
    z = acprobit::z_step(model, z, rng);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(z(i) > 0, model.data().y()[i] == 1);
  }
}

TEST(Lag1, IidSeriesIsNearZero) {
  acprobit::Rng rng(7);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = rng.normal();
  const auto r = acprobit::lag1_autocorrelation(xs);
  EXPECT_NEAR(r.estimate, 0.0, 5 * r.mc_se);
  EXPECT_LT(r.mc_se, 0.01);
  EXPECT_EQ(r.batches, 100);
  EXPECT_EQ(r.used, 100000);
}

TEST(Lag1, AutoregressiveSeries) {
  acprobit::Rng rng(8);
  std::vector<double> xs(100000);
  double x = 0.0;
  for (auto& v : xs) {
    x = 0.8 * x + std::sqrt(1 - 0.64) * rng.normal();
    v = x;
  }
  const auto r = acprobit::lag1_autocorrelation(xs);
  EXPECT_NEAR(r.estimate, 0.8, 5 * r.mc_se);
  EXPECT_GT(r.mc_se, 0.0);
}

TEST(Lag1, BatchCountClamped) {
  acprobit::Rng rng(9);
  std::vector<double> xs(150);
  for (auto& x : xs) x = rng.normal();
  EXPECT_EQ(acprobit::lag1_autocorrelation(xs).batches, 12);
  xs.resize(100);
  EXPECT_EQ(acprobit::lag1_autocorrelation(xs).batches, 10);
}

TEST(Lag1, TooShortThrows) {
  EXPECT_THROW(acprobit::lag1_autocorrelation(std::vector<double>(99, 1.0)), acprobit::InsufficientLength);
}

TEST(Lag1, RateEstimateBurnIn) {
  const auto model = small_model();
  const auto trace = acprobit::run_chain(model, ChainVariant::beta_chain, model.mode(), 1000, 3);
  const auto first = [](const Eigen::VectorXd& b) { return b(0); };
  EXPECT_EQ(acprobit::lag1_rate_estimate(trace, first).used, 1001 - 100);
  EXPECT_EQ(acprobit::lag1_rate_estimate(trace, first, 0).used, 1001);
  EXPECT_THROW(acprobit::lag1_rate_estimate(trace, first, 950), acprobit::InsufficientLength);
}

TEST(TraceCsv, HeaderAndMetadata) {
  const auto model = small_model();
  const auto trace = acprobit::run_chain(model, ChainVariant::beta_chain, model.mode(), 3, 77);
  std::ostringstream os;
  acprobit::write_trace_csv(os, trace);
  const std::string s = os.str();
  EXPECT_NE(s.find("# seed 77"), std::string::npos) << s;
  EXPECT_NE(s.find("step,beta1,beta2\n"), std::string::npos) << s;
  int lines = 0;
  for (char c : s) lines += c == '\n';
  EXPECT_EQ(lines, 3 + 1 + 4);
}
