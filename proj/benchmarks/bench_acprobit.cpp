#include <benchmark/benchmark.h>

#include "acprobit/acprobit.hpp"

using namespace acprobit;

static void BM_TnSample(benchmark::State& state) {
  const double theta = static_cast<double>(state.range(0));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(tn_sample(theta, TruncSide::positive, rng));
}
BENCHMARK(BM_TnSample)->Arg(-8)->Arg(-2)->Arg(0)->Arg(2);

static PosteriorModel gaussian_model(Eigen::Index n, Eigen::Index p) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.true_beta = Eigen::VectorXd::Constant(p, 0.5);
  cfg.seed = 7;
  return PosteriorModel::build(generate_dataset(cfg), GaussianPrior::scaled_identity(p, 1.0));
}

static void BM_AcStep(benchmark::State& state) {
  const auto model = gaussian_model(state.range(0), 5);
  Rng rng(2);
  Eigen::VectorXd beta = model.mode();
  for (auto _ : state) {
    beta = ac_step(model, beta, rng);
    benchmark::DoNotOptimize(beta.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AcStep)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_OrthantBound(benchmark::State& state) {
  const auto model = gaussian_model(2000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lambda_v1_orthant_bound(model).lambda);
}
BENCHMARK(BM_OrthantBound)->Arg(2)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_OptimizeRate(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_rate(DriftVariant::v1_flipped, 0.99, n, 2).log_rate_gap);
}
BENCHMARK(BM_OptimizeRate)->Arg(100)->Arg(100000);

static void BM_PosteriorMode(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.n = state.range(0);
  cfg.p = 5;
  cfg.true_beta = Eigen::VectorXd::Constant(5, 0.5);
  cfg.seed = 8;
  const auto data = generate_dataset(cfg);
  const auto prior = GaussianPrior::flat(5);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_mode(data, prior).mode.data());
}
BENCHMARK(BM_PosteriorMode)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
