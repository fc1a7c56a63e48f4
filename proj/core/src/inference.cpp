#include "svarmsh/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/hmm.hpp"
#include "svarmsh/likelihood.hpp"
#include "svarmsh/util.hpp"

namespace svarmsh {

namespace {

void check_equation(const DrawStore& store, int i) {
  if (i < 1 || i > store.N)
    throw InputError("equation label out of range: " + std::to_string(i));
}

void check_heteroskedastic(const DrawStore& store) {
  if (store.M < 2)
    throw InputError("hypothesis tests on relative variances need at least "
                     "two regimes");
  if (store.total_draws() < 1) throw InputError("empty draw store");
}

SddrResult finish(const DrawStore& store, std::string hypothesis,
                  const std::vector<double>& log_f, double log_den,
                  int n_batches) {
  SddrResult res;
  res.hypothesis = std::move(hypothesis);
  res.draws_used = static_cast<int>(log_f.size());
  res.log_numerator = log_mean_exp(log_f);
  res.log_denominator = log_den;
  res.log_sddr = res.log_numerator - res.log_denominator;
  // small stores cannot honor the requested batch count; cap at two values
  // per batch so the error estimate stays defined
  const int usable = std::max(2, std::min(n_batches, static_cast<int>(log_f.size() / 2)));
  res.nse = nse_batch_means_log(log_f, usable);
  (void)store;
  return res;
}

} // namespace

SddrResult sddr_pair_identification(const DrawStore& store, int state, int i,
                                    int j, int n_batches) {
  check_heteroskedastic(store);
  check_equation(store, i);
  check_equation(store, j);
  if (i == j) throw InputError("need two distinct equations");
  if (state < 2 || state > store.M)
    throw InputError("regime label must be in [2, M]");
  const int m = state - 2, a = i - 1, b = j - 1;
  const int S = store.total_draws();
  std::vector<double> log_f(S);
  for (int s = 0; s < S; ++s) {
    const PosteriorDraw& d = store.draw(s);
    log_f[s] = dist::ig2r_log_pdf(1.0, d.rb_shape(m, a), d.rb_shape(m, b),
                                  d.rb_scale(m, a), d.rb_scale(m, b));
  }
  const double aw = store.prior.a_omega, bw = store.prior.b_omega;
  double log_den = dist::ig2r_log_pdf(1.0, aw, aw, bw, bw);
  return finish(store,
                "equal relative variance, regime " + std::to_string(state) +
                    ", equations " + std::to_string(i) + "," +
                    std::to_string(j),
                log_f, log_den, n_batches);
}

SddrResult sddr_joint_identification(const DrawStore& store, int i, int j,
                                     int n_batches) {
  check_heteroskedastic(store);
  check_equation(store, i);
  check_equation(store, j);
  if (i == j) throw InputError("need two distinct equations");
  const int a = i - 1, b = j - 1;
  const int S = store.total_draws();
  std::vector<double> log_f(S);
  for (int s = 0; s < S; ++s) {
    const PosteriorDraw& d = store.draw(s);
    double acc = 0.0;
    for (int m = 0; m < store.M - 1; ++m)
      acc += dist::ig2r_log_pdf(1.0, d.rb_shape(m, a), d.rb_shape(m, b),
                                d.rb_scale(m, a), d.rb_scale(m, b));
    log_f[s] = acc;
  }
  const double aw = store.prior.a_omega, bw = store.prior.b_omega;
  double log_den = (store.M - 1) * dist::ig2r_log_pdf(1.0, aw, aw, bw, bw);
  return finish(store,
                "equal relative variances in all regimes, equations " +
                    std::to_string(i) + "," + std::to_string(j),
                log_f, log_den, n_batches);
}

SddrResult sddr_homoskedasticity(const DrawStore& store, int i, int n_batches) {
  check_heteroskedastic(store);
  check_equation(store, i);
  const int a = i - 1;
  const int S = store.total_draws();
  std::vector<double> log_f(S);
  for (int s = 0; s < S; ++s) {
    const PosteriorDraw& d = store.draw(s);
    double acc = 0.0;
    for (int m = 0; m < store.M - 1; ++m)
      acc += dist::ig2_log_pdf(1.0, d.rb_shape(m, a), d.rb_scale(m, a));
    log_f[s] = acc;
  }
  double log_den =
      (store.M - 1) *
      dist::ig2_log_pdf(1.0, store.prior.a_omega, store.prior.b_omega);
  return finish(store, "homoskedastic shock, equation " + std::to_string(i),
                log_f, log_den, n_batches);
}

SddrResult sddr_joint_homoskedasticity(const DrawStore& store,
                                       std::vector<int> equations,
                                       int n_batches) {
  check_heteroskedastic(store);
  if (equations.empty())
    for (int i = 1; i <= store.N; ++i) equations.push_back(i);
  for (int i : equations) check_equation(store, i);
  std::sort(equations.begin(), equations.end());
  if (std::adjacent_find(equations.begin(), equations.end()) !=
      equations.end())
    throw InputError("duplicate equation label");

  const int S = store.total_draws();
  std::vector<double> log_f(S);
  for (int s = 0; s < S; ++s) {
    const PosteriorDraw& d = store.draw(s);
    double acc = 0.0;
    for (int i : equations)
      for (int m = 0; m < store.M - 1; ++m)
        acc += dist::ig2_log_pdf(1.0, d.rb_shape(m, i - 1),
                                 d.rb_scale(m, i - 1));
    log_f[s] = acc;
  }
  double log_den =
      static_cast<double>(equations.size()) * (store.M - 1) *
      dist::ig2_log_pdf(1.0, store.prior.a_omega, store.prior.b_omega);
  std::string label = "homoskedastic shocks, equations";
  for (int i : equations) label += " " + std::to_string(i);
  return finish(store, label, log_f, log_den, n_batches);
}

// ---------------------------------------------------------------------------
// Marginal data density
// ---------------------------------------------------------------------------

namespace {

// Maps draws to the unconstrained importance space and back.  Layout:
// [alpha, A row-major, log lambda1, log omega, additive log-ratios of the
// transition rows, log shrinkage].
struct ParameterCodec {
  int N, M, p, K, r;
  bool free_coef, free_var, free_trans, free_shr;
  int dim = 0;

  ParameterCodec(const DrawStore& store, const MddOptions& opt)
      : N(store.N), M(store.M), p(store.p), K(store.K), r(store.r),
        free_coef(!opt.fix_coefficients), free_var(!opt.fix_variances),
        free_trans(!opt.fix_transition && store.M > 1),
        free_shr(!opt.fix_shrinkage) {
    if (free_coef) dim += r + N * K;
    if (free_var) dim += N + (M - 1) * N;
    if (free_trans) dim += M * (M - 1);
    if (free_shr) dim += 3;
  }

  Eigen::VectorXd pack(const PosteriorDraw& d) const {
    Eigen::VectorXd v(dim);
    int o = 0;
    if (free_coef) {
      v.segment(o, r) = d.alpha;
      o += r;
      for (int n = 0; n < N; ++n, o += K) v.segment(o, K) = d.A.row(n);
    }
    if (free_var) {
      v.segment(o, N) = d.lambda1.array().log();
      o += N;
      for (int m = 0; m < M - 1; ++m, o += N)
        v.segment(o, N) = d.omega.row(m).array().log();
    }
    if (free_trans) {
      for (int m = 0; m < M; ++m, o += M - 1) {
        double ref = std::log(d.P(m, M - 1));
        for (int k = 0; k < M - 1; ++k)
          v[o + k] = std::log(d.P(m, k)) - ref;
      }
    }
    if (free_shr) {
      v[o++] = std::log(d.gamma_alpha);
      v[o++] = std::log(d.gamma_mu);
      v[o++] = std::log(d.gamma_beta);
    }
    return v;
  }

  static double clamp_positive(double x) {
    return std::min(std::max(x, 1e-300), 1e300);
  }

  ModelParameters unpack(const Eigen::VectorXd& v, const PosteriorDraw& base,
                         const RestrictionScheme& scheme) const {
    ModelParameters par;
    int o = 0;
    if (free_coef) {
      par.alpha = v.segment(o, r);
      o += r;
      par.A.resize(N, K);
      for (int n = 0; n < N; ++n, o += K)
        par.A.row(n) = v.segment(o, K).transpose();
    } else {
      par.alpha = base.alpha;
      par.A = base.A;
    }
    par.A0 = reconstruct_A0(scheme, par.alpha);
    if (free_var) {
      par.lambda1.resize(N);
      for (int n = 0; n < N; ++n)
        par.lambda1[n] = clamp_positive(std::exp(v[o + n]));
      o += N;
      par.omega.resize(M - 1, N);
      for (int m = 0; m < M - 1; ++m, o += N)
        for (int n = 0; n < N; ++n)
          par.omega(m, n) = clamp_positive(std::exp(v[o + n]));
    } else {
      par.lambda1 = base.lambda1;
      par.omega = base.omega;
    }
    if (free_trans) {
      par.P.resize(M, M);
      for (int m = 0; m < M; ++m, o += M - 1) {
        double mx = 0.0;
        for (int k = 0; k < M - 1; ++k) mx = std::max(mx, v[o + k]);
        double denom = std::exp(-mx);
        for (int k = 0; k < M - 1; ++k) denom += std::exp(v[o + k] - mx);
        for (int k = 0; k < M - 1; ++k)
          par.P(m, k) = std::exp(v[o + k] - mx) / denom;
        par.P(m, M - 1) = std::exp(-mx) / denom;
      }
    } else {
      par.P = base.P;
    }
    if (free_shr) {
      par.gamma_alpha = clamp_positive(std::exp(v[o++]));
      par.gamma_mu = clamp_positive(std::exp(v[o++]));
      par.gamma_beta = clamp_positive(std::exp(v[o++]));
    } else {
      par.gamma_alpha = base.gamma_alpha;
      par.gamma_mu = base.gamma_mu;
      par.gamma_beta = base.gamma_beta;
    }
    return par;
  }

  // Prior density in the transformed space (free blocks only, change of
  // variables included).
  double log_prior(const ModelParameters& par, const RestrictionScheme& scheme,
                   const PriorHyperparameters& prior) const {
    double lp = 0.0;
    if (free_shr) {
      for (double g : {par.gamma_alpha, par.gamma_mu, par.gamma_beta})
        lp += dist::ig2_log_pdf(g, prior.a_shrink, prior.b_shrink) +
              std::log(g);
      if (!std::isfinite(lp)) return neg_inf();
    }
    if (free_coef) {
      for (int k = 0; k < r; ++k)
        lp += dist::normal_log_pdf(par.alpha[k], 0.0, par.gamma_alpha);
      Eigen::MatrixXd pbar = prior_slope_mean(prior, N, p);
      Eigen::VectorXd hbar = lag_decay_diagonal(N, p);
      for (int n = 0; n < N; ++n) {
        lp += dist::normal_log_pdf(par.A(n, 0), 0.0, par.gamma_mu);
        Eigen::RowVectorXd mean = par.A0.row(n) * pbar;
        for (int l = 0; l < p * N; ++l)
          lp += dist::normal_log_pdf(par.A(n, 1 + l), mean[l],
                                     par.gamma_beta * hbar[l]);
      }
    }
    if (free_var) {
      for (int n = 0; n < N; ++n)
        lp += dist::ig2_log_pdf(par.lambda1[n], prior.a_lambda,
                                prior.b_lambda) +
              std::log(par.lambda1[n]);
      for (int m = 0; m < M - 1; ++m)
        for (int n = 0; n < N; ++n)
          lp += dist::ig2_log_pdf(par.omega(m, n), prior.a_omega,
                                  prior.b_omega) +
                std::log(par.omega(m, n));
    }
    if (free_trans) {
      for (int m = 0; m < M; ++m) {
        Eigen::VectorXd row = par.P.row(m).transpose();
        if ((row.array() <= 0.0).any()) return neg_inf();
        lp += dist::dirichlet_log_pdf(row, prior.e.row(m).transpose());
        lp += row.array().log().sum();
      }
    }
    (void)scheme;
    return std::isfinite(lp) ? lp : neg_inf();
  }
};

} // namespace

MddResult estimate_mdd(const DrawStore& store, const TimeSeriesData& data,
                       const DesignMatrices& design,
                       const MddOptions& options) {
  const int S = store.total_draws();
  if (S < 2) throw InputError("need at least two posterior draws");
  if (options.draws < 1) throw InputError("need at least one importance draw");

  ParameterCodec codec(store, options);
  const PosteriorDraw& base = store.draw(0);

  double threshold = store.draw(0).log_likelihood;
  for (int s = 1; s < S; ++s)
    threshold = std::min(threshold, store.draw(s).log_likelihood);

  MddResult res;
  res.threshold_log_lik = threshold;
  res.draws = options.draws;

  if (codec.dim == 0) {
    // point mass: the integral collapses to the data density at the point
    ModelParameters par = codec.unpack(Eigen::VectorXd(0), base, store.scheme);
    res.log_mdd = marginal_log_likelihood(par, data, design);
    res.nse = 0.0;
    res.inside_fraction = 1.0;
    return res;
  }

  // Gaussian importance density fitted to the transformed posterior sample
  Eigen::MatrixXd pts(S, codec.dim);
  for (int s = 0; s < S; ++s) pts.row(s) = codec.pack(store.draw(s)).transpose();
  Eigen::VectorXd mean = pts.colwise().mean();
  Eigen::MatrixXd centered = pts.rowwise() - mean.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(S - 1);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double ridge = 1e-8 * (cov.trace() / codec.dim + 1e-12);
  for (int attempt = 0; llt.info() != Eigen::Success && attempt < 12;
       ++attempt) {
    cov.diagonal().array() += ridge;
    ridge *= 10.0;
    llt.compute(cov);
  }
  if (llt.info() != Eigen::Success)
    throw ModelError("posterior covariance could not be factorized");
  Eigen::MatrixXd L = llt.matrixL();

  const int J = options.draws;
  RngStream rng(options.seed);
  Eigen::MatrixXd zs(codec.dim, J);
  for (int j = 0; j < J; ++j)
    for (int d = 0; d < codec.dim; ++d) zs(d, j) = rng.normal();

  std::vector<double> terms(J, neg_inf());
  int inside = 0;
  auto evaluate = [&](int begin, int end, int* inside_count) {
    for (int j = begin; j < end; ++j) {
      Eigen::VectorXd theta = mean + L * zs.col(j);
      ModelParameters par = codec.unpack(theta, base, store.scheme);
      double lp = codec.log_prior(par, store.scheme, store.prior);
      if (!std::isfinite(lp)) continue;
      double ll = marginal_log_likelihood(par, data, design);
      if (!(ll >= threshold)) continue; // outside the cut region
      double lq = dist::mvn_log_pdf(theta, mean, L);
      terms[j] = ll + lp - lq;
      ++*inside_count;
    }
  };

  int workers = thread_budget(std::max(1, J / 512));
  if (workers <= 1) {
    evaluate(0, J, &inside);
  } else {
    std::vector<std::thread> pool;
    std::vector<int> counts(workers, 0);
    int chunk = (J + workers - 1) / workers;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(evaluate, w * chunk, std::min(J, (w + 1) * chunk),
                        &counts[w]);
    for (auto& th : pool) th.join();
    for (int c : counts) inside += c;
  }

  res.log_mdd = log_mean_exp(terms);
  res.nse = nse_batch_means_log(terms, std::min(options.batches, J / 2));
  res.inside_fraction = static_cast<double>(inside) / J;
  return res;
}

// ---------------------------------------------------------------------------
// Numerical standard errors and summaries
// ---------------------------------------------------------------------------

namespace {

double sd_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(n - 1));
}

void check_batches(std::size_t size, int n_batches) {
  if (n_batches < 2) throw InputError("need at least two batches");
  if (size < 2 * static_cast<std::size_t>(n_batches))
    throw InputError("series too short for " + std::to_string(n_batches) +
                     " batches: " + std::to_string(size) + " values");
}

} // namespace

double nse_batch_means(const std::vector<double>& series, int n_batches) {
  check_batches(series.size(), n_batches);
  const std::size_t L = series.size() / n_batches;
  std::vector<double> means(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < L; ++i) acc += series[b * L + i];
    means[b] = acc / static_cast<double>(L);
  }
  return sd_of(means) / std::sqrt(static_cast<double>(n_batches));
}

double nse_batch_means_log(const std::vector<double>& log_series,
                           int n_batches) {
  check_batches(log_series.size(), n_batches);
  const std::size_t L = log_series.size() / n_batches;
  const double overall =
      log_mean_exp(log_series.data(), L * static_cast<std::size_t>(n_batches));
  if (!std::isfinite(overall))
    return std::numeric_limits<double>::quiet_NaN();
  // Delta method on the log scale: the error of log(mean) is the relative
  // error of the mean, estimated from relative batch means.  A batch whose
  // terms are all -inf (importance draws outside the support cut) simply
  // contributes a relative mean of zero instead of poisoning the spread.
  std::vector<double> rel(n_batches);
  for (int b = 0; b < n_batches; ++b)
    rel[b] = std::exp(log_mean_exp(log_series.data() + b * L, L) - overall);
  return sd_of(rel) / std::sqrt(static_cast<double>(n_batches));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw InputError("quantile level must be in [0,1]");
  std::sort(values.begin(), values.end());
  double pos = q * (values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  double w = pos - lo;
  return (1.0 - w) * values[lo] + w * values[lo + 1];
}

std::vector<ParameterSummary> summarize_posterior(const DrawStore& store) {
  const int S = store.total_draws();
  if (S < 1) throw InputError("empty draw store");

  std::vector<std::pair<std::string, std::function<double(const PosteriorDraw&)>>>
      fields;
  for (int k = 0; k < store.r; ++k)
    fields.emplace_back(store.scheme.coefficient_label(k),
                        [k](const PosteriorDraw& d) { return d.alpha[k]; });
  for (int n = 0; n < store.N; ++n)
    fields.emplace_back("mu_" + std::to_string(n + 1),
                        [n](const PosteriorDraw& d) { return d.A(n, 0); });
  for (int l = 1; l <= store.p; ++l)
    for (int n = 0; n < store.N; ++n)
      for (int c = 0; c < store.N; ++c)
        fields.emplace_back(
            "A" + std::to_string(l) + "_" + std::to_string(n + 1) + "_" +
                std::to_string(c + 1),
            [l, n, c, N = store.N](const PosteriorDraw& d) {
              return d.A(n, 1 + (l - 1) * N + c);
            });
  for (int n = 0; n < store.N; ++n)
    fields.emplace_back("lambda_" + std::to_string(n + 1),
                        [n](const PosteriorDraw& d) { return d.lambda1[n]; });
  for (int m = 2; m <= store.M; ++m)
    for (int n = 0; n < store.N; ++n)
      fields.emplace_back(
          "omega_" + std::to_string(m) + "_" + std::to_string(n + 1),
          [m, n](const PosteriorDraw& d) { return d.omega(m - 2, n); });
  for (int i = 0; i < store.M; ++i)
    for (int j = 0; j < store.M; ++j)
      fields.emplace_back(
          "p_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
          [i, j](const PosteriorDraw& d) { return d.P(i, j); });
  fields.emplace_back("gamma_alpha", [](const PosteriorDraw& d) {
    return d.gamma_alpha;
  });
  fields.emplace_back("gamma_mu",
                      [](const PosteriorDraw& d) { return d.gamma_mu; });
  fields.emplace_back("gamma_beta",
                      [](const PosteriorDraw& d) { return d.gamma_beta; });

  std::vector<ParameterSummary> out;
  out.reserve(fields.size());
  std::vector<double> series(S);
  for (const auto& [name, get] : fields) {
    for (int s = 0; s < S; ++s) series[s] = get(store.draw(s));
    ParameterSummary ps;
    ps.name = name;
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= S;
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    ps.mean = mean;
    ps.sd = S > 1 ? std::sqrt(var / (S - 1)) : 0.0;
    ps.q05 = quantile(series, 0.05);
    ps.median = quantile(series, 0.5);
    ps.q95 = quantile(series, 0.95);
    out.push_back(ps);
  }
  return out;
}

} // namespace svarmsh
