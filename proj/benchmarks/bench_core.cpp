// Microbenchmarks for the hot paths: special-function densities, the two
// likelihood forms, the forward filter, one Gibbs sweep, and the posterior
// post-processing estimators.  Build with -DSVARMSH_BUILD_BENCHMARKS=ON and
// an installed google-benchmark.

#include <benchmark/benchmark.h>

#include <svarmsh/svarmsh.hpp>

using namespace svarmsh;

namespace {

ModelParameters three_var_truth() {
  ModelParameters truth;
  truth.A0.resize(3, 3);
  truth.A0 << 1.0, 0.3, -0.2, 0.1, 1.0, 0.2, -0.1, 0.15, 1.0;
  truth.alpha =
      extract_alpha(make_scheme(SchemePreset::unrestricted, 3), truth.A0);
  truth.A = Eigen::MatrixXd::Zero(3, 4);
  truth.A.col(0).setConstant(0.05);
  truth.A.block(0, 1, 3, 3) = 0.3 * Eigen::MatrixXd::Identity(3, 3);
  truth.lambda1.resize(3);
  truth.lambda1 << 1.0, 0.7, 1.4;
  truth.omega.resize(1, 3);
  truth.omega << 2.0, 5.0, 9.0;
  truth.P.resize(2, 2);
  truth.P << 0.9, 0.1, 0.08, 0.92;
  return truth;
}

struct Fixture {
  ModelParameters truth = three_var_truth();
  RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 3);
  TimeSeriesData data;
  StateSequence states;
  DesignMatrices design;

  Fixture() {
    RngStream rng(7);
    auto [d, s] = simulate_data(truth, 400, rng);
    data = std::move(d);
    states = std::move(s);
    design = build_design(data, 1);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_variance_ratio_density(benchmark::State& state) {
  double z = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist::ig2r_log_pdf(z, 7.0, 5.0, 2.0, 3.0));
    z += 0.05;
    if (z > 20.0) z = 0.05;
  }
}
BENCHMARK(BM_variance_ratio_density);

void BM_log_likelihood(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        log_likelihood(f.truth, f.states, f.data, f.design).value);
}
BENCHMARK(BM_log_likelihood);

void BM_log_likelihood_alpha(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        log_likelihood_alpha(f.truth.alpha, f.truth, f.scheme, f.states,
                             f.data, f.design)
            .value);
}
BENCHMARK(BM_log_likelihood_alpha);

void BM_forward_filter(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(marginal_log_likelihood(f.truth, f.data, f.design));
}
BENCHMARK(BM_forward_filter);

void BM_gibbs_sweep(benchmark::State& state) {
  const Fixture& f = fixture();
  GibbsSampler sampler(f.data, f.design, f.scheme,
                       PriorHyperparameters::defaults(3, 2), 2, SamplerConfig{});
  RngStream rng(11);
  sampler.initialize(rng);
  for (auto _ : state) sampler.sweep(rng);
}
BENCHMARK(BM_gibbs_sweep);

const DrawStore& posterior_store() {
  static const DrawStore store = [] {
    const Fixture& f = fixture();
    SamplerConfig config;
    config.burn = 200;
    config.draws = 1000;
    config.chains = 1;
    config.seed = 13;
    return run_sampler(f.data, f.design, f.scheme,
                       PriorHyperparameters::defaults(3, 2), 2, config);
  }();
  return store;
}

void BM_density_ratio_test(benchmark::State& state) {
  const DrawStore& store = posterior_store();
  for (auto _ : state)
    benchmark::DoNotOptimize(sddr_joint_identification(store, 1, 2).log_sddr);
}
BENCHMARK(BM_density_ratio_test);

void BM_evidence_estimate(benchmark::State& state) {
  const Fixture& f = fixture();
  const DrawStore& store = posterior_store();
  MddOptions options;
  options.draws = 500;
  options.seed = 17;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        estimate_mdd(store, f.data, f.design, options).log_mdd);
}
BENCHMARK(BM_evidence_estimate);

void BM_uniqueness_search(benchmark::State& state) {
  Eigen::MatrixXd A0(2, 2);
  A0 << 1.0, 0.5, -0.3, 1.0;
  Eigen::MatrixXd variances(2, 2);
  variances << 1.0, 1.0, 4.0, 9.0;
  const Eigen::MatrixXd A0inv = A0.inverse();
  std::vector<Eigen::MatrixXd> sigmas;
  for (int m = 0; m < 2; ++m)
    sigmas.push_back(A0inv * variances.row(m).asDiagonal() * A0inv.transpose());
  std::uint64_t seed = 1;
  for (auto _ : state) {
    RngStream rng(seed++);
    benchmark::DoNotOptimize(brute_force_alternatives(sigmas, 10, 1e-8, rng));
  }
}
BENCHMARK(BM_uniqueness_search);

} // namespace

BENCHMARK_MAIN();
