#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/gibbs.hpp"
#include "svarmsh/hmm.hpp"
#include "svarmsh/inference.hpp"
#include "svarmsh/simulate.hpp"
#include "svarmsh/util.hpp"

using namespace svarmsh;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Minimal two-regime store carrying only what the density-ratio tests read:
// dimensions, the prior, and the conditional coefficients of each draw.
DrawStore ratio_store(int N, int M, int S, RngStream& rng) {
  DrawStore store;
  store.N = N;
  store.M = M;
  store.p = 1;
  store.K = 1 + N;
  store.r = 0;
  store.prior = PriorHyperparameters::defaults(N, M);
  ChainResult chain;
  for (int s = 0; s < S; ++s) {
    PosteriorDraw d;
    d.rb_shape.resize(M - 1, N);
    d.rb_scale.resize(M - 1, N);
    for (int m = 0; m < M - 1; ++m)
      for (int n = 0; n < N; ++n) {
        d.rb_shape(m, n) = 40.0 + 10.0 * rng.uniform();
        d.rb_scale(m, n) = 30.0 + 20.0 * rng.uniform();
      }
    d.state_counts = Eigen::VectorXi::Constant(M, 10);
    chain.draws.push_back(std::move(d));
  }
  store.chains.push_back(std::move(chain));
  return store;
}

ModelParameters benchmark_truth() {
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  ModelParameters truth;
  Eigen::MatrixXd A0(2, 2);
  A0 << 1.0, 0.5, -0.3, 1.0;
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

DrawStore small_posterior_store(std::uint64_t seed, int burn, int draws,
                                TimeSeriesData& data_out) {
  RngStream sim_rng(seed);
  ModelParameters truth = benchmark_truth();
  auto [data, states] = simulate_data(truth, 250, sim_rng);
  data_out = data;
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);
  SamplerConfig config;
  config.burn = burn;
  config.draws = draws;
  config.chains = 1;
  config.seed = seed + 1;
  return run_sampler(data, build_design(data, 1), scheme, prior, 2, config);
}

} // namespace

// ---------------------------------------------------------------------------
// density-ratio tests
// ---------------------------------------------------------------------------

TEST_CASE("pair test: prior ordinate and Rao-Blackwell numerator") {
  RngStream rng(1);
  const DrawStore store = ratio_store(3, 2, 4000, rng);

  const SddrResult res = sddr_pair_identification(store, 2, 1, 2);
  CHECK(res.log_denominator ==
        doctest::Approx(-std::log(2.0 * 3.14159265358979324)).epsilon(1e-12));

  // independent recomputation of the posterior ordinate
  std::vector<double> terms;
  for (int s = 0; s < store.total_draws(); ++s) {
    const PosteriorDraw& d = store.draw(s);
    terms.push_back(dist::ig2r_log_pdf(1.0, d.rb_shape(0, 0), d.rb_shape(0, 1),
                                       d.rb_scale(0, 0), d.rb_scale(0, 1)));
  }
  CHECK(res.log_numerator == doctest::Approx(log_mean_exp(terms)).epsilon(1e-12));
  CHECK(res.log_sddr == doctest::Approx(res.log_numerator - res.log_denominator));
  CHECK(res.nse > 0.0);
  CHECK(std::isfinite(res.nse));
  CHECK(res.draws_used == 4000);
}

TEST_CASE("pair test input validation") {
  RngStream rng(2);
  const DrawStore store = ratio_store(3, 2, 100, rng);
  CHECK_THROWS_AS((void)sddr_pair_identification(store, 1, 1, 2), InputError);
  CHECK_THROWS_AS((void)sddr_pair_identification(store, 3, 1, 2), InputError);
  CHECK_THROWS_AS((void)sddr_pair_identification(store, 2, 1, 1), InputError);
  CHECK_THROWS_AS((void)sddr_pair_identification(store, 2, 0, 2), InputError);
  CHECK_THROWS_AS((void)sddr_pair_identification(store, 2, 1, 4), InputError);
}

TEST_CASE("joint pair test nests the single-regime case") {
  RngStream rng(3);
  const DrawStore store = ratio_store(2, 2, 2000, rng);
  const SddrResult pair = sddr_pair_identification(store, 2, 1, 2);
  const SddrResult joint = sddr_joint_identification(store, 1, 2);
  CHECK(joint.log_numerator == doctest::Approx(pair.log_numerator).epsilon(1e-14));
  CHECK(joint.log_denominator ==
        doctest::Approx(pair.log_denominator).epsilon(1e-14));
}

TEST_CASE("joint pair test: three-regime prior ordinate") {
  RngStream rng(4);
  const DrawStore store = ratio_store(2, 3, 2000, rng);
  const SddrResult joint = sddr_joint_identification(store, 1, 2);
  CHECK(joint.log_denominator ==
        doctest::Approx(-2.0 * std::log(2.0 * 3.14159265358979324)).epsilon(1e-12));
}

TEST_CASE("homoskedasticity test: prior ordinate and linear scaling") {
  RngStream rng(5);
  const DrawStore store = ratio_store(3, 2, 2000, rng);

  const double log_f_ig2_at_1 = dist::ig2_log_pdf(1.0, 1.0, 3.0);
  const SddrResult single = sddr_homoskedasticity(store, 2);
  CHECK(single.log_denominator == doctest::Approx(log_f_ig2_at_1).epsilon(1e-12));

  const SddrResult joint = sddr_joint_homoskedasticity(store, {1, 2, 3}, 500);
  CHECK(joint.log_denominator ==
        doctest::Approx(3.0 * log_f_ig2_at_1).epsilon(1e-12));

  const SddrResult one = sddr_joint_homoskedasticity(store, {2}, 500);
  CHECK(one.log_numerator == doctest::Approx(single.log_numerator).epsilon(1e-14));
  CHECK(one.log_denominator ==
        doctest::Approx(single.log_denominator).epsilon(1e-14));

  CHECK_THROWS_AS((void)sddr_joint_homoskedasticity(store, {1, 1}, 500), InputError);
}

TEST_CASE("density-ratio direction on simulated data") {
  // equal relative variances: the equality restriction should be supported
  RngStream sim_rng(6);
  ModelParameters truth = benchmark_truth();
  truth.omega(0, 0) = 6.0;
  truth.omega(0, 1) = 6.0;
  auto [data, states] = simulate_data(truth, 400, sim_rng);
  const RestrictionScheme scheme = make_scheme(SchemePreset::unrestricted, 2);
  const PriorHyperparameters prior = PriorHyperparameters::defaults(2, 2);
  SamplerConfig config;
  config.burn = 500;
  config.draws = 2000;
  config.chains = 1;
  config.seed = 31;
  const DrawStore eq_store =
      run_sampler(data, build_design(data, 1), scheme, prior, 2, config);
  CHECK(sddr_joint_identification(eq_store, 1, 2, 500).log_sddr > 0.0);

  // strongly distinct relative variances: the restriction should be rejected
  RngStream sim_rng2(7);
  truth.omega(0, 0) = 2.0;
  truth.omega(0, 1) = 20.0;
  auto [data2, states2] = simulate_data(truth, 500, sim_rng2);
  config.seed = 32;
  const DrawStore neq_store =
      run_sampler(data2, build_design(data2, 1), scheme, prior, 2, config);
  CHECK(sddr_joint_identification(neq_store, 1, 2, 500).log_sddr < -3.0);
}

// ---------------------------------------------------------------------------
// marginal data density
// ---------------------------------------------------------------------------

TEST_CASE("degenerate importance space returns the data density exactly") {
  TimeSeriesData data;
  const DrawStore store = small_posterior_store(8, 200, 400, data);
  MddOptions options;
  options.fix_coefficients = true;
  options.fix_variances = true;
  options.fix_transition = true;
  options.fix_shrinkage = true;
  const MddResult res = estimate_mdd(store, data, build_design(data, store.p), options);
  CHECK(res.log_mdd == doctest::Approx(store.draw(0).log_likelihood).epsilon(1e-12));
  CHECK(res.nse == 0.0);
}

TEST_CASE("conjugate regression toy matches the analytic evidence") {
  // univariate AR(1) with known noise variance and Gaussian coefficient
  // prior: the marginal likelihood has a closed form
  const int T = 40;
  const double lambda = 0.49, gamma_mu = 0.8, gamma_beta = 0.5;

  RngStream rng(9);
  TimeSeriesData data;
  data.names = {"y"};
  data.initial_conditions.resize(1, 1);
  data.initial_conditions(0, 0) = 0.3;
  data.Y.resize(1, T);
  double prev = data.initial_conditions(0, 0);
  for (int t = 0; t < T; ++t) {
    data.Y(0, t) = 0.2 + 0.7 * prev + std::sqrt(lambda) * rng.normal();
    prev = data.Y(0, t);
  }
  const DesignMatrices design = build_design(data, 1);

  // exact conjugate posterior for beta = (intercept, slope)
  Eigen::VectorXd m0(2);
  m0 << 0.0, 1.0; // random-walk prior mean
  Eigen::MatrixXd V0 = Eigen::MatrixXd::Zero(2, 2);
  V0(0, 0) = gamma_mu;
  V0(1, 1) = gamma_beta;
  const Eigen::MatrixXd X = design.X; // 2 x T
  const Eigen::VectorXd y = data.Y.row(0).transpose();
  const Eigen::MatrixXd Vn_inv = V0.inverse() + X * X.transpose() / lambda;
  const Eigen::MatrixXd Vn = Vn_inv.inverse();
  const Eigen::VectorXd mn = Vn * (V0.inverse() * m0 + X * y / lambda);

  // analytic evidence: y ~ N(X' m0, lambda I + X' V0 X)
  const Eigen::MatrixXd cov =
      lambda * Eigen::MatrixXd::Identity(T, T) + X.transpose() * V0 * X;
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::VectorXd diff = y - X.transpose() * m0;
  const Eigen::VectorXd white = llt.matrixL().solve(diff);
  double log_det = 0.0;
  for (int i = 0; i < T; ++i)
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double analytic =
      -0.5 * T * kLog2Pi - 0.5 * log_det - 0.5 * white.squaredNorm();

  // posterior sample drawn directly from the exact conditional
  DrawStore store;
  store.N = 1;
  store.M = 1;
  store.p = 1;
  store.K = 2;
  store.r = 0;
  store.scheme = make_scheme(SchemePreset::unrestricted, 1);
  store.prior = PriorHyperparameters::defaults(1, 1);
  store.variable_names = {"y"};
  const Eigen::MatrixXd chol_vn = Eigen::LLT<Eigen::MatrixXd>(Vn).matrixL();
  ChainResult chain;
  RngStream post_rng(10);
  for (int s = 0; s < 3000; ++s) {
    PosteriorDraw d;
    d.alpha.resize(0);
    d.A = dist::mvn_sample(mn, chol_vn, post_rng).transpose();
    d.lambda1 = Eigen::VectorXd::Constant(1, lambda);
    d.omega.resize(0, 1);
    d.P = Eigen::MatrixXd::Ones(1, 1);
    d.gamma_alpha = 1.0;
    d.gamma_mu = gamma_mu;
    d.gamma_beta = gamma_beta;
    d.state_counts = Eigen::VectorXi::Constant(1, T);
    d.rb_shape.resize(0, 1);
    d.rb_scale.resize(0, 1);
    ModelParameters point;
    point.alpha = d.alpha;
    point.A0 = Eigen::MatrixXd::Identity(1, 1);
    point.A = d.A;
    point.lambda1 = d.lambda1;
    point.omega = d.omega;
    point.P = d.P;
    d.log_likelihood = marginal_log_likelihood(point, data, design);
    chain.draws.push_back(std::move(d));
  }
  store.chains.push_back(std::move(chain));

  MddOptions options;
  options.draws = 20000;
  options.seed = 11;
  options.fix_variances = true;
  options.fix_transition = true;
  options.fix_shrinkage = true;
  const MddResult res = estimate_mdd(store, data, build_design(data, store.p), options);

  CHECK(res.nse > 0.0);
  CHECK(std::abs(res.log_mdd - analytic) < 3.0 * res.nse);
  // the bound itself should be tight enough to mean something
  CHECK(res.nse < 0.2);
}

TEST_CASE("independent estimator runs agree within combined error") {
  TimeSeriesData data;
  const DrawStore store = small_posterior_store(12, 400, 1500, data);
  MddOptions options;
  options.draws = 6000;
  options.seed = 100;
  const MddResult a = estimate_mdd(store, data, build_design(data, store.p), options);
  options.seed = 200;
  const MddResult b = estimate_mdd(store, data, build_design(data, store.p), options);
  const double combined = std::sqrt(a.nse * a.nse + b.nse * b.nse);
  CHECK(std::abs(a.log_mdd - b.log_mdd) < 3.0 * combined);
  CHECK(a.inside_fraction > 0.0);
  CHECK(a.inside_fraction <= 1.0);
  CHECK(a.threshold_log_lik ==
        doctest::Approx([&] {
          double lo = 1e300;
          for (int s = 0; s < store.total_draws(); ++s)
            lo = std::min(lo, store.draw(s).log_likelihood);
          return lo;
        }()));
}

// ---------------------------------------------------------------------------
// numerical standard errors
// ---------------------------------------------------------------------------

TEST_CASE("batch means recover the independent-sampling error") {
  RngStream rng(13);
  std::vector<double> series(100000);
  for (auto& x : series) x = rng.normal();
  const double nse = nse_batch_means(series, 2000);
  const double expected = 1.0 / std::sqrt(100000.0);
  CHECK(nse == doctest::Approx(expected).epsilon(0.2));
}

TEST_CASE("batch means: constant series has zero error") {
  std::vector<double> series(5000, 3.25);
  CHECK(nse_batch_means(series, 100) == 0.0);
}

TEST_CASE("batch means widen under autocorrelation") {
  RngStream rng(14);
  const int n = 100000;
  std::vector<double> series(n);
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    x = 0.9 * x + rng.normal();
    series[static_cast<std::size_t>(i)] = x;
  }
  const double nse = nse_batch_means(series, 500);
  const double naive = std::sqrt(oracle::variance(series) / n);
  CHECK(nse > 2.0 * naive);
}

TEST_CASE("batch means shrink with the sample") {
  RngStream rng(15);
  std::vector<double> big(80000);
  for (auto& v : big) v = rng.normal() + 1.0;
  std::vector<double> small(big.begin(), big.begin() + 20000);
  const double nse_small = nse_batch_means(small, 500);
  const double nse_big = nse_batch_means(big, 500);
  // quadrupling the series should halve the error, within a factor two
  const double ratio = nse_small / nse_big;
  CHECK(ratio > 1.0);
  CHECK(ratio < 4.0);
}

TEST_CASE("log-scale batch means match a direct computation") {
  RngStream rng(16);
  const int n = 2000, B = 40;
  std::vector<double> logs(n);
  for (auto& v : logs) v = -1.0 + 0.3 * rng.normal();
  const double nse = nse_batch_means_log(logs, B);

  // delta method: the log estimate's error is the relative error of the
  // mean, read off the spread of relative batch means
  const int L = n / B;
  const double overall = log_mean_exp(logs);
  std::vector<double> batch_stats(B);
  for (int b = 0; b < B; ++b) {
    std::vector<double> chunk(logs.begin() + b * L, logs.begin() + (b + 1) * L);
    batch_stats[static_cast<std::size_t>(b)] =
        std::exp(log_mean_exp(chunk) - overall);
  }
  const double direct =
      std::sqrt(oracle::variance(batch_stats) / static_cast<double>(B));
  CHECK(nse == doctest::Approx(direct).epsilon(1e-10));

  // on a well-behaved series this agrees with the spread of batch logs
  std::vector<double> batch_logs(B);
  for (int b = 0; b < B; ++b) {
    std::vector<double> chunk(logs.begin() + b * L, logs.begin() + (b + 1) * L);
    batch_logs[static_cast<std::size_t>(b)] = log_mean_exp(chunk);
  }
  const double log_spread =
      std::sqrt(oracle::variance(batch_logs) / static_cast<double>(B));
  CHECK(nse == doctest::Approx(log_spread).epsilon(0.05));

  // a batch with no support (all draws outside an importance cut) must not
  // destroy the error estimate
  std::vector<double> cut = logs;
  for (int i = 0; i < L; ++i) cut[i] = -std::numeric_limits<double>::infinity();
  const double nse_cut = nse_batch_means_log(cut, B);
  CHECK(std::isfinite(nse_cut));
  CHECK(nse_cut > nse);
}

TEST_CASE("quantiles interpolate order statistics") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("posterior summary covers every block with exact statistics") {
  TimeSeriesData data;
  const DrawStore store = small_posterior_store(17, 100, 300, data);
  const auto summary = summarize_posterior(store);

  bool has_alpha = false, has_lambda = false, has_omega = false,
       has_p = false, has_gamma = false, has_slope = false, has_mu = false;
  for (const auto& row : summary) {
    if (row.name.rfind("a_", 0) == 0) has_alpha = true;
    if (row.name.rfind("lambda_", 0) == 0) has_lambda = true;
    if (row.name.rfind("omega_", 0) == 0) has_omega = true;
    if (row.name.rfind("p_", 0) == 0) has_p = true;
    if (row.name.rfind("gamma_", 0) == 0) has_gamma = true;
    if (row.name.rfind("A1_", 0) == 0) has_slope = true;
    if (row.name.rfind("mu_", 0) == 0) has_mu = true;
    CHECK(std::isfinite(row.mean));
    CHECK(row.sd >= 0.0);
    CHECK(row.q05 <= row.median);
    CHECK(row.median <= row.q95);
  }
  CHECK(has_alpha);
  CHECK(has_lambda);
  CHECK(has_omega);
  CHECK(has_p);
  CHECK(has_gamma);
  CHECK(has_slope);
  CHECK(has_mu);

  // the mean column reproduces a direct average
  std::vector<double> lam0;
  for (int s = 0; s < store.total_draws(); ++s)
    lam0.push_back(store.draw(s).lambda1(0));
  for (const auto& row : summary)
    if (row.name == "lambda_1")
      CHECK(row.mean == doctest::Approx(oracle::mean(lam0)).epsilon(1e-12));
}
