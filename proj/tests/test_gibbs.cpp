#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "support/oracles.hpp"
#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/gibbs.hpp"
#include "svarmsh/hmm.hpp"
#include "svarmsh/likelihood.hpp"
#include "svarmsh/simulate.hpp"

using namespace svarmsh;

namespace {

// The two-variable switching-volatility truth used across sampler tests.
ModelParameters benchmark_truth() {
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  ModelParameters truth;
  truth.alpha.resize(2);
  const Eigen::MatrixXd A0 = [] {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.5, -0.3, 1.0;
    return m;
  }();
  truth.alpha = extract_alpha(scheme, A0);
  truth.A0 = A0;
  truth.A.resize(2, 3);
  truth.A << 0.1, 0.4, 0.1, -0.1, 0.05, 0.35;
  truth.lambda1 = Eigen::VectorXd::Ones(2);
  truth.omega.resize(1, 2);
  truth.omega << 4.0, 9.0;
  truth.P.resize(2, 2);
  truth.P << 0.95, 0.05, 0.05, 0.95;
  return truth;
}

GibbsSampler make_sampler(const TimeSeriesData& data, int p, int M,
                          SamplerConfig config = {}) {
  const RestrictionScheme scheme =
      make_scheme(SchemePreset::unrestricted, data.N());
  const PriorHyperparameters prior = PriorHyperparameters::defaults(data.N(), M);
  return GibbsSampler(data, build_design(data, p), scheme, prior, M, config);
}

} // namespace

// ---------------------------------------------------------------------------
// conditional-law unit checks
// ---------------------------------------------------------------------------

TEST_CASE("variance level conditional: zero residuals give the pure update") {
  const int T = 40;
  TimeSeriesData data;
  data.names = {"y"};
  data.initial_conditions = Eigen::MatrixXd::Zero(1, 1);
  data.Y = Eigen::MatrixXd::Zero(1, T);

  RngStream rng(1);
  GibbsSampler sampler = make_sampler(data, 1, 1);
  sampler.initialize(rng);
  sampler.params.A.setZero();
  sampler.params.lambda1.setOnes();

  const PriorHyperparameters prior = PriorHyperparameters::defaults(1, 1);
  const double target = prior.b_lambda / (prior.a_lambda + T - 2.0);
  const int n = 40000;
  std::vector<double> draws(n);
  for (auto& x : draws) {
    sampler.sample_lambda1(rng);
    x = sampler.params.lambda1(0);
    sampler.params.A.setZero(); // keep residuals at zero
  }
  CHECK(std::abs(oracle::mean(draws) - target) <
        3.0 * oracle::standard_error(draws));
}

TEST_CASE("relative variance conditional: empty regime falls back to prior") {
  const int T = 60;
  RngStream sim_rng(2);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);

  RngStream rng(3);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  sampler.states.s.setZero(); // nobody visits regime 2

  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);
  const int n = 20000;
  std::vector<double> draws(n);
  for (auto& x : draws) {
    sampler.sample_omega(rng);
    x = sampler.params.omega(0, 0);
  }
  auto pdf = [&](double w) {
    return w > 0.0 ? std::exp(dist::ig2_log_pdf(w, prior.a_omega, prior.b_omega))
                   : 0.0;
  };
  CHECK(oracle::ks_distance_density(draws, pdf) < 0.02);
}

TEST_CASE("transition conditional: occupation counts drive the proposal") {
  const int T = 200;
  RngStream sim_rng(4);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);

  RngStream rng(5);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  sampler.states.s.setZero(); // all mass in regime 1: counts (T-1, 0)

  const int n = 5000;
  std::vector<double> p00(n);
  for (auto& x : p00) {
    sampler.sample_transition(rng); // states stay forced at regime 1

    x = sampler.params.P(0, 0);
    CHECK(sampler.params.P.row(0).sum() == doctest::Approx(1.0));
    CHECK(sampler.params.P.row(1).sum() == doctest::Approx(1.0));
  }
  // proposal for row 1 is Dirichlet(e00 + T - 1, e01) and acceptance is near
  // one when the chain hardly moves, so the long-run mean tracks the
  // proposal mean
  const double proposal_mean = (10.0 + T - 1.0) / (10.0 + T - 1.0 + 1.0);
  CHECK(std::abs(oracle::mean(p00) - proposal_mean) < 0.002);
}

TEST_CASE("autoregressive rows: dogmatic shrinkage pins the prior mean") {
  const int T = 150;
  RngStream sim_rng(6);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);

  RngStream rng(7);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  sampler.params.gamma_mu = 1e-12;
  sampler.params.gamma_beta = 1e-12;

  sampler.sample_A_rows(rng);
  // prior mean: zero intercept, unit own first lag (random-walk shrinkage)
  CHECK(std::abs(sampler.params.A(0, 0)) < 1e-4);
  CHECK(std::abs(sampler.params.A(1, 0)) < 1e-4);
  CHECK(sampler.params.A(0, 1) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sampler.params.A(1, 2) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(sampler.params.A(0, 2)) < 1e-4);
}

TEST_CASE("shrinkage conditionals reduce to their closed forms") {
  const int T = 80;
  RngStream sim_rng(8);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);

  RngStream rng(9);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);
  const int r = 2, N = 2;

  // zero coefficient vector: gamma_alpha ~ IG2(a + r, b)
  const int n = 40000;
  std::vector<double> ga(n), gm(n);
  Eigen::VectorXd mu(2);
  mu << 0.3, -0.2;
  for (int i = 0; i < n; ++i) {
    sampler.params.alpha.setZero();
    sampler.params.A.col(0) = mu;
    sampler.sample_shrinkage(rng);
    ga[static_cast<std::size_t>(i)] = sampler.params.gamma_alpha;
    gm[static_cast<std::size_t>(i)] = sampler.params.gamma_mu;
  }
  const double ga_target = prior.b_shrink / (prior.a_shrink + r - 2.0);
  CHECK(std::abs(oracle::mean(ga) - ga_target) < 3.0 * oracle::standard_error(ga));
  const double gm_target =
      (prior.b_shrink + mu.squaredNorm()) / (prior.a_shrink + N - 2.0);
  CHECK(std::abs(oracle::mean(gm) - gm_target) < 3.0 * oracle::standard_error(gm));
}

TEST_CASE("degenerate coefficient space: proposal step is a no-op") {
  const int T = 50;
  TimeSeriesData data;
  data.names = {"y"};
  data.initial_conditions = Eigen::MatrixXd::Zero(1, 1);
  RngStream rng(10);
  data.Y.resize(1, T);
  for (int t = 0; t < T; ++t) data.Y(0, t) = rng.normal();

  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  CHECK(sampler.params.alpha.size() == 0);
  CHECK(sampler.sample_alpha(rng));
  CHECK(sampler.params.A0(0, 0) == 1.0);
}

TEST_CASE("coefficient proposal acceptance sits in a healthy band") {
  const int T = 300;
  RngStream sim_rng(11);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);

  RngStream rng(12);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  int accepted = 0;
  const int sweeps = 600;
  for (int i = 0; i < sweeps; ++i) {
    sampler.sweep(rng);
    if (sampler.last_mh_accepted) ++accepted;
  }
  const double rate = static_cast<double>(accepted) / sweeps;
  CHECK(rate > 0.1);
  CHECK(rate < 0.9);
}

// ---------------------------------------------------------------------------
// bookkeeping identities
// ---------------------------------------------------------------------------

TEST_CASE("conditional coefficients stored with each draw are recomputable") {
  const int T = 120;
  RngStream sim_rng(13);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);
  const DesignMatrices design = build_design(data, 1);

  RngStream rng(14);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);

  for (int i = 0; i < 25; ++i) {
    sampler.sweep(rng);
    const PosteriorDraw draw = sampler.snapshot();

    // recompute the conditional-posterior coefficients from the draw state
    const Eigen::MatrixXd U =
        structural_residuals(sampler.params, data, design);
    const Eigen::MatrixXd ssr = residual_state_sums(U, sampler.states, 2);
    const Eigen::VectorXi counts = sampler.states.counts(2);
    for (int n = 0; n < 2; ++n) {
      const double shape = prior.a_omega + counts(1);
      const double scale =
          prior.b_omega + ssr(1, n) / sampler.params.lambda1(n);
      CHECK(std::abs(draw.rb_shape(0, n) - shape) < 1e-10);
      CHECK(std::abs(draw.rb_scale(0, n) - scale) < 1e-10);
    }
    CHECK(draw.state_counts(0) == counts(0));
    CHECK(draw.state_counts(1) == counts(1));

    // the stored data density marginalizes the states at the stored point
    const double ll = marginal_log_likelihood(sampler.params, data, design);
    CHECK(draw.log_likelihood == doctest::Approx(ll).epsilon(1e-12));
  }
}

TEST_CASE("relabeling orders regimes by average volatility") {
  const int T = 150;
  RngStream sim_rng(15);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);

  RngStream rng(16);
  GibbsSampler sampler = make_sampler(data, 1, 2);
  sampler.initialize(rng);
  for (int i = 0; i < 50; ++i) {
    sampler.sweep(rng);
    double low = 0.0, high = 0.0;
    for (int n = 0; n < 2; ++n) {
      low += std::log(sampler.params.variance(0, n));
      high += std::log(sampler.params.variance(1, n));
    }
    CHECK(low <= high + 1e-12);
  }
}

// ---------------------------------------------------------------------------
// full runs
// ---------------------------------------------------------------------------

TEST_CASE("sampler runs are seed-deterministic") {
  const int T = 120;
  RngStream sim_rng(17);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);
  const DesignMatrices design = build_design(data, 1);
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);

  SamplerConfig config;
  config.burn = 50;
  config.draws = 60;
  config.chains = 2;
  config.seed = 99;

  const DrawStore a = run_sampler(data, design, scheme, prior, 2, config);
  const DrawStore b = run_sampler(data, design, scheme, prior, 2, config);
  REQUIRE(a.chains.size() == b.chains.size());
  for (std::size_t c = 0; c < a.chains.size(); ++c) {
    REQUIRE(a.chains[c].draws.size() == b.chains[c].draws.size());
    for (std::size_t i = 0; i < a.chains[c].draws.size(); ++i) {
      const PosteriorDraw& da = a.chains[c].draws[i];
      const PosteriorDraw& db = b.chains[c].draws[i];
      CHECK((da.alpha - db.alpha).cwiseAbs().maxCoeff() == 0.0);
      CHECK((da.A - db.A).cwiseAbs().maxCoeff() == 0.0);
      CHECK((da.lambda1 - db.lambda1).cwiseAbs().maxCoeff() == 0.0);
      CHECK((da.omega - db.omega).cwiseAbs().maxCoeff() == 0.0);
      CHECK((da.P - db.P).cwiseAbs().maxCoeff() == 0.0);
      CHECK(da.log_likelihood == db.log_likelihood);
    }
    CHECK((a.chains[c].state_probability - b.chains[c].state_probability)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("chains started apart converge to the same posterior") {
  const int T = 300;
  RngStream sim_rng(18);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);
  const DesignMatrices design = build_design(data, 1);
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);

  SamplerConfig config;
  config.burn = 800;
  config.draws = 2000;
  config.chains = 2;
  config.seed = 7;

  const DrawStore store = run_sampler(data, design, scheme, prior, 2, config);
  std::vector<std::vector<double>> ll;
  for (const auto& chain : store.chains) {
    std::vector<double> series;
    for (const auto& draw : chain.draws) series.push_back(draw.log_likelihood);
    ll.push_back(std::move(series));
  }
  CHECK(potential_scale_reduction(ll) < 1.1);
}

TEST_CASE("state paths are recovered under strong volatility separation") {
  const int T = 400;
  RngStream sim_rng(19);
  ModelParameters truth = benchmark_truth();
  truth.omega(0, 0) = 25.0;
  truth.omega(0, 1) = 25.0;
  auto [data, true_states] = simulate_data(truth, T, sim_rng);
  const DesignMatrices design = build_design(data, 1);

  const Eigen::MatrixXd log_em = state_log_emissions(truth, data, design);
  const FilterResult fr = forward_filter(log_em, truth.P);
  int hits = 0;
  for (int t = 0; t < T; ++t) {
    int mode = 0;
    if (fr.filtered(1, t) > fr.filtered(0, t)) mode = 1;
    if (mode == true_states.s(t)) ++hits;
  }
  CHECK(static_cast<double>(hits) / T > 0.95);
}

TEST_CASE("configuration validation") {
  const int T = 60;
  RngStream sim_rng(20);
  ModelParameters truth = benchmark_truth();
  auto [data, true_states] = simulate_data(truth, T, sim_rng);
  const DesignMatrices design = build_design(data, 1);
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);

  SamplerConfig config;
  config.draws = 0;
  CHECK_THROWS_AS(
      (void)run_sampler(data, design, scheme, prior, 2, config), InputError);
  config.draws = 10;
  config.chains = 0;
  CHECK_THROWS_AS(
      (void)run_sampler(data, design, scheme, prior, 2, config), InputError);

  // sample-length precondition: effective T must exceed N(p+1)
  TimeSeriesData tiny;
  tiny.names = {"a", "b"};
  tiny.initial_conditions = Eigen::MatrixXd::Zero(2, 1);
  tiny.Y = Eigen::MatrixXd::Random(2, 4); // N(p+1) = 4
  CHECK_THROWS_AS(GibbsSampler(tiny, build_design(tiny, 1), scheme, prior, 2, {}),
                  InputError);
}

TEST_CASE("thread budget respects the environment override") {
  ::setenv("SVARMSH_THREADS", "2", 1);
  CHECK(thread_budget(8) == 2);
  CHECK(thread_budget(1) == 1);
  ::setenv("SVARMSH_THREADS", "1", 1);
  CHECK(thread_budget(8) == 1);
  ::unsetenv("SVARMSH_THREADS");
  CHECK(thread_budget(1) == 1);
  CHECK(thread_budget(64) >= 1);
}

TEST_CASE("scale-reduction diagnostic separates agreeing and split chains") {
  RngStream rng(21);
  std::vector<double> c1(400), c2(400), c3(400);
  for (int i = 0; i < 400; ++i) {
    c1[static_cast<std::size_t>(i)] = rng.normal();
    c2[static_cast<std::size_t>(i)] = rng.normal();
    c3[static_cast<std::size_t>(i)] = rng.normal() + 6.0;
  }
  CHECK(potential_scale_reduction({c1, c2}) < 1.1);
  CHECK(potential_scale_reduction({c1, c3}) > 2.0);
}
