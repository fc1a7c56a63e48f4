#include "svarmsh/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/hmm.hpp"
#include "svarmsh/likelihood.hpp"
#include "svarmsh/util.hpp"

namespace svarmsh {

int DrawStore::total_draws() const {
  int n = 0;
  for (const auto& c : chains) n += static_cast<int>(c.draws.size());
  return n;
}

const PosteriorDraw& DrawStore::draw(int i) const {
  for (const auto& c : chains) {
    if (i < static_cast<int>(c.draws.size())) return c.draws[i];
    i -= static_cast<int>(c.draws.size());
  }
  throw InputError("draw index out of range");
}

Eigen::MatrixXd DrawStore::state_probability_mean() const {
  if (chains.empty()) throw InputError("empty draw store");
  Eigen::MatrixXd acc = chains[0].state_probability;
  for (std::size_t c = 1; c < chains.size(); ++c)
    acc += chains[c].state_probability;
  return acc / static_cast<double>(chains.size());
}

GibbsSampler::GibbsSampler(TimeSeriesData data, DesignMatrices design,
                           RestrictionScheme scheme, PriorHyperparameters prior,
                           int M, SamplerConfig config)
    : data_(std::move(data)), design_(std::move(design)),
      scheme_(std::move(scheme)), prior_(std::move(prior)), M_(M),
      config_(config) {
  if (M_ < 1) throw InputError("need at least one regime");
  if (data_.T() != design_.T()) throw ModelError("data/design length mismatch");
  if (prior_.e.rows() != M_ || prior_.e.cols() != M_)
    throw ModelError("Dirichlet weight matrix must be M x M");
  const int N = data_.N();
  if (scheme_.N != N) throw ModelError("scheme dimension mismatch");
  if (data_.T() <= N * (design_.p + 1))
    throw InputError("sample too short: need more than N(p+1) = " +
                     std::to_string(N * (design_.p + 1)) + " observations");
  Qcol_Y_.reserve(scheme_.r);
  for (int k = 0; k < scheme_.r; ++k) {
    Eigen::Map<const Eigen::MatrixXd> Qk(scheme_.Q.col(k).data(), N, N);
    Qcol_Y_.emplace_back(Qk * data_.Y);
  }
}

void GibbsSampler::initialize(RngStream& rng) {
  const int N = data_.N();
  const int p = design_.p;

  params.alpha = Eigen::VectorXd::Zero(scheme_.r);
  params.A0 = reconstruct_A0(scheme_, params.alpha);
  params.A = params.A0 * prior_A_mean(prior_, N, p);
  params.gamma_alpha = params.gamma_mu = params.gamma_beta = 1.0;
  params.omega = Eigen::MatrixXd::Ones(M_ - 1, N);

  Eigen::MatrixXd U = params.A0 * data_.Y - params.A * design_.X;
  params.lambda1.resize(N);
  for (int n = 0; n < N; ++n) {
    double v = U.row(n).squaredNorm() / std::max(1, data_.T());
    params.lambda1[n] = std::max(v, 1e-8);
  }

  params.P.resize(M_, M_);
  for (int m = 0; m < M_; ++m)
    params.P.row(m) = prior_.e.row(m) / prior_.e.row(m).sum();

  sample_states(rng);
}

void GibbsSampler::sample_states(RngStream& rng) {
  Eigen::MatrixXd le = state_log_emissions(params, data_, design_);
  states = ffbs_sample(le, params.P, rng);
}

void GibbsSampler::sample_transition(RngStream& rng) {
  if (M_ == 1) {
    params.P = Eigen::MatrixXd::Ones(1, 1);
    return;
  }
  Eigen::MatrixXd counts = states.transition_counts(M_);
  Eigen::MatrixXd proposal(M_, M_);
  for (int m = 0; m < M_; ++m) {
    Eigen::VectorXd e =
        prior_.e.row(m).transpose() + counts.row(m).transpose();
    proposal.row(m) = dist::dirichlet_sample(e, rng).transpose();
  }
  // The Dirichlet proposal is the full conditional except for the ergodic
  // distribution of the first state, which enters as an importance ratio.
  double log_ratio;
  try {
    Eigen::VectorXd pi_prop = ergodic_distribution(proposal);
    Eigen::VectorXd pi_curr = ergodic_distribution(params.P);
    log_ratio = std::log(pi_prop[states.s[0]]) - std::log(pi_curr[states.s[0]]);
  } catch (const ModelError&) {
    return; // degenerate proposal, keep the current matrix
  }
  if (std::log(rng.uniform()) < log_ratio) params.P = proposal;
}

void GibbsSampler::sample_lambda1(RngStream& rng) {
  const int N = data_.N();
  const int T = data_.T();
  Eigen::MatrixXd U = structural_residuals(params, data_, design_);
  Eigen::MatrixXd ssr = residual_state_sums(U, states, M_);
  for (int n = 0; n < N; ++n) {
    double b = prior_.b_lambda + ssr(0, n);
    for (int m = 1; m < M_; ++m) b += ssr(m, n) / params.omega(m - 1, n);
    params.lambda1[n] = dist::ig2_sample(prior_.a_lambda + T, b, rng);
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
GibbsSampler::omega_conditional() const {
  const int N = data_.N();
  Eigen::MatrixXd U = structural_residuals(params, data_, design_);
  Eigen::MatrixXd ssr = residual_state_sums(U, states, M_);
  Eigen::VectorXi counts = states.counts(M_);
  Eigen::MatrixXd shape(std::max(M_ - 1, 0), N), scale(std::max(M_ - 1, 0), N);
  for (int m = 1; m < M_; ++m)
    for (int n = 0; n < N; ++n) {
      shape(m - 1, n) = prior_.a_omega + counts[m];
      scale(m - 1, n) = prior_.b_omega + ssr(m, n) / params.lambda1[n];
    }
  return {shape, scale};
}

void GibbsSampler::sample_omega(RngStream& rng) {
  if (M_ == 1) return;
  auto [shape, scale] = omega_conditional();
  for (int m = 1; m < M_; ++m)
    for (int n = 0; n < data_.N(); ++n)
      params.omega(m - 1, n) =
          dist::ig2_sample(shape(m - 1, n), scale(m - 1, n), rng);
}

void GibbsSampler::sample_A_rows(RngStream& rng) {
  const int N = data_.N();
  const int K = design_.K();
  const int p = design_.p;

  // per-regime cross moments
  std::vector<Eigen::MatrixXd> W(M_, Eigen::MatrixXd::Zero(K, K));
  std::vector<Eigen::MatrixXd> V(M_, Eigen::MatrixXd::Zero(N, K));
  for (int t = 0; t < data_.T(); ++t) {
    int m = states.s[t];
    W[m].selfadjointView<Eigen::Lower>().rankUpdate(design_.X.col(t));
    V[m] += data_.Y.col(t) * design_.X.col(t).transpose();
  }
  for (int m = 0; m < M_; ++m)
    W[m].triangularView<Eigen::StrictlyUpper>() = W[m].transpose();

  Eigen::MatrixXd ptilde = prior_A_mean(prior_, N, p);
  Eigen::VectorXd h_inv =
      prior_A_cov_diagonal(params.gamma_mu, params.gamma_beta, N, p)
          .cwiseInverse();
  for (int n = 0; n < N; ++n) {
    double inv_l = 1.0 / params.lambda1[n];

    Eigen::MatrixXd prec = h_inv.asDiagonal();
    prec += inv_l * W[0];
    Eigen::VectorXd rhs =
        inv_l * (params.A0.row(n) * V[0]).transpose();
    for (int m = 1; m < M_; ++m) {
      double w = inv_l / params.omega(m - 1, n);
      prec += w * W[m];
      rhs += w * (params.A0.row(n) * V[m]).transpose();
    }
    rhs += h_inv.asDiagonal() * (params.A0.row(n) * ptilde).transpose();

    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
      throw ModelError("autoregressive row precision not positive definite");
    Eigen::VectorXd mean = llt.solve(rhs);
    Eigen::VectorXd z(K);
    for (int i = 0; i < K; ++i) z[i] = rng.normal();
    Eigen::VectorXd draw =
        mean + llt.matrixU().solve(z); // cov = prec^{-1} = U^{-1} U^{-T}
    params.A.row(n) = draw.transpose();
  }
}

bool GibbsSampler::sample_alpha(RngStream& rng) {
  const int r = scheme_.r;
  if (r == 0) {
    last_mh_accepted = true;
    return true;
  }
  const int N = data_.N();

  // proposal scale from the conditional Gaussian curvature of the
  // coefficient regression
  Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(r, r);
  Eigen::MatrixXd scaled(N, data_.T());
  for (int k = 0; k < r; ++k) {
    scaled = Qcol_Y_[k];
    for (int t = 0; t < data_.T(); ++t) {
      int m = states.s[t];
      for (int n = 0; n < N; ++n) scaled(n, t) /= params.variance(m, n);
    }
    for (int l = k; l < r; ++l)
      prec(l, k) = (scaled.array() * Qcol_Y_[l].array()).sum();
  }
  prec = prec.selfadjointView<Eigen::Lower>();
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) {
    prec.diagonal().array() += 1e-10 * (prec.trace() / r + 1.0);
    llt.compute(prec);
    if (llt.info() != Eigen::Success)
      throw ModelError("coefficient proposal scale not positive definite");
  }
  // square root of c * prec^{-1}
  Eigen::MatrixXd root =
      llt.matrixU().solve(Eigen::MatrixXd::Identity(r, r)) *
      std::sqrt(config_.mh_scale);

  Eigen::VectorXd proposal =
      dist::mvt_sample(params.alpha, root, config_.mh_dof, rng);

  LogDensity ll_prop = log_likelihood_alpha(proposal, params, scheme_, states,
                                            data_, design_);
  last_mh_accepted = false;
  if (ll_prop.valid) {
    LogDensity ll_curr = log_likelihood_alpha(params.alpha, params, scheme_,
                                              states, data_, design_);
    double lp_prop = -0.5 * proposal.squaredNorm() / params.gamma_alpha;
    double lp_curr = -0.5 * params.alpha.squaredNorm() / params.gamma_alpha;
    double log_delta = ll_prop.value + lp_prop - ll_curr.value - lp_curr;
    if (std::log(rng.uniform()) < log_delta) {
      params.alpha = proposal;
      params.A0 = reconstruct_A0(scheme_, params.alpha);
      last_mh_accepted = true;
    }
  }
  return last_mh_accepted;
}

void GibbsSampler::sample_shrinkage(RngStream& rng) {
  const int N = data_.N();
  const int p = design_.p;
  const double a = prior_.a_shrink, b = prior_.b_shrink;

  params.gamma_alpha =
      dist::ig2_sample(a + scheme_.r, b + params.alpha.squaredNorm(), rng);
  params.gamma_mu =
      dist::ig2_sample(a + N, b + params.A.col(0).squaredNorm(), rng);

  Eigen::MatrixXd pbar = prior_slope_mean(prior_, N, p);
  Eigen::VectorXd hbar = lag_decay_diagonal(N, p);
  double quad = 0.0;
  for (int n = 0; n < N; ++n) {
    Eigen::RowVectorXd dev =
        params.A.row(n).tail(p * N) - params.A0.row(n) * pbar;
    quad += (dev.transpose().array().square() / hbar.array()).sum();
  }
  params.gamma_beta = dist::ig2_sample(a + p * N * N, b + quad, rng);
}

void GibbsSampler::relabel() {
  relabel_states();
  relabel_equations();
}

void GibbsSampler::relabel_states() {
  if (M_ == 1) return;
  const int N = data_.N();
  Eigen::VectorXd level(M_);
  for (int m = 0; m < M_; ++m) {
    double g = 0.0;
    for (int n = 0; n < N; ++n) g += std::log(params.variance(m, n));
    level[m] = g;
  }
  std::vector<int> perm(M_);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return level[a] < level[b]; });
  bool identity = true;
  for (int m = 0; m < M_; ++m) identity = identity && perm[m] == m;
  if (identity) return;

  Eigen::MatrixXd vars = params.variance_matrix();
  Eigen::MatrixXd P_old = params.P;
  std::vector<int> inverse(M_);
  for (int m = 0; m < M_; ++m) inverse[perm[m]] = m;

  for (int n = 0; n < N; ++n) params.lambda1[n] = vars(perm[0], n);
  for (int m = 1; m < M_; ++m)
    for (int n = 0; n < N; ++n)
      params.omega(m - 1, n) = vars(perm[m], n) / vars(perm[0], n);
  for (int i = 0; i < M_; ++i)
    for (int j = 0; j < M_; ++j) params.P(i, j) = P_old(perm[i], perm[j]);
  for (int t = 0; t < states.T(); ++t) states.s[t] = inverse[states.s[t]];
}

// The unit-diagonal normalization fixes the scale of each equation but not
// the pairing of equations with shocks: permuting the rows of A0 and
// rescaling the new diagonal back to one reproduces the likelihood with
// relabeled shocks.  Fold every sweep onto the representative with the
// dominant diagonal (largest sum of log |diagonal| before rescaling, the
// same canonical choice the identification search makes) whenever the
// restriction scheme admits it, so chains cannot smear mass across
// relabeled replicas of one mode.
void GibbsSampler::relabel_equations() {
  const int N = data_.N();
  if (N == 1) return;
  std::vector<int> identity(N);
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<int> best = identity;
  double best_score = 0.0; // identity permutation: log of the unit diagonal
  std::vector<int> sigma = identity;
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    double score = 0.0;
    bool usable = true;
    for (int n = 0; n < N && usable; ++n) {
      const double d = std::abs(params.A0(sigma[n], n));
      if (d < 1e-12)
        usable = false;
      else
        score += std::log(d);
    }
    if (usable && score > best_score + 1e-12) {
      best_score = score;
      best = sigma;
    }
  }
  if (best == identity) return;

  Eigen::MatrixXd A0_new(N, N);
  for (int n = 0; n < N; ++n)
    A0_new.row(n) = params.A0.row(best[n]) / params.A0(best[n], n);
  const Eigen::VectorXd alpha_new = extract_alpha(scheme_, A0_new);
  const Eigen::MatrixXd rebuilt = reconstruct_A0(scheme_, alpha_new);
  if ((rebuilt - A0_new).cwiseAbs().maxCoeff() > 1e-9) return; // scheme forbids

  Eigen::MatrixXd A_new(N, params.A.cols());
  Eigen::VectorXd lambda_new(N);
  Eigen::MatrixXd omega_new(params.omega.rows(), N);
  for (int n = 0; n < N; ++n) {
    const double d = params.A0(best[n], n);
    A_new.row(n) = params.A.row(best[n]) / d;
    lambda_new[n] = params.lambda1[best[n]] / (d * d);
    omega_new.col(n) = params.omega.col(best[n]); // scale free
  }
  params.alpha = alpha_new;
  params.A0 = rebuilt;
  params.A = A_new;
  params.lambda1 = lambda_new;
  params.omega = omega_new;
}

void GibbsSampler::sweep(RngStream& rng) {
  sample_states(rng);
  sample_transition(rng);
  sample_lambda1(rng);
  sample_omega(rng);
  sample_A_rows(rng);
  sample_alpha(rng);
  sample_shrinkage(rng);
  if (config_.relabel) relabel();
}

PosteriorDraw GibbsSampler::snapshot() const {
  PosteriorDraw d;
  d.alpha = params.alpha;
  d.A = params.A;
  d.lambda1 = params.lambda1;
  d.omega = params.omega;
  d.P = params.P;
  d.gamma_alpha = params.gamma_alpha;
  d.gamma_mu = params.gamma_mu;
  d.gamma_beta = params.gamma_beta;
  d.state_counts = states.counts(M_);
  auto [shape, scale] = omega_conditional();
  d.rb_shape = shape;
  d.rb_scale = scale;
  d.log_likelihood = marginal_log_likelihood(params, data_, design_);
  d.mh_accepted = last_mh_accepted;
  return d;
}

ChainResult GibbsSampler::run_chain(int chain_id, RngStream& rng) {
  if (config_.draws < 1) throw InputError("need at least one retained draw");
  if (config_.thin < 1) throw InputError("thinning interval must be >= 1");
  if (config_.burn < 0) throw InputError("burn-in must be nonnegative");

  ChainResult result;
  result.chain_id = chain_id;
  result.draws.reserve(config_.draws);
  result.state_probability = Eigen::MatrixXd::Zero(M_, data_.T());

  initialize(rng);
  for (int i = 0; i < config_.burn; ++i) sweep(rng);

  int accepted = 0, total = 0;
  for (int d = 0; d < config_.draws; ++d) {
    for (int i = 0; i < config_.thin; ++i) {
      sweep(rng);
      accepted += last_mh_accepted ? 1 : 0;
      ++total;
    }
    result.draws.push_back(snapshot());
    for (int t = 0; t < data_.T(); ++t)
      result.state_probability(states.s[t], t) += 1.0;
  }
  result.state_probability /= static_cast<double>(config_.draws);
  result.mh_acceptance_rate =
      total > 0 ? static_cast<double>(accepted) / total : 0.0;
  return result;
}

int thread_budget(int units) {
  int budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  if (const char* env = std::getenv("SVARMSH_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) budget = static_cast<int>(v);
  }
  return std::max(1, std::min(budget, units));
}

DrawStore run_sampler(const TimeSeriesData& data, const DesignMatrices& design,
                      const RestrictionScheme& scheme,
                      const PriorHyperparameters& prior, int M,
                      const SamplerConfig& config) {
  if (config.chains < 1) throw InputError("need at least one chain");
  DrawStore store;
  store.N = data.N();
  store.M = M;
  store.p = design.p;
  store.K = design.K();
  store.r = scheme.r;
  store.config = config;
  store.scheme = scheme;
  store.prior = prior;
  store.variable_names = data.names;
  store.chains.resize(config.chains);

  RngStream base(config.seed);
  auto run_one = [&](int c) {
    GibbsSampler sampler(data, design, scheme, prior, M, config);
    RngStream rng = base.derive(static_cast<std::uint64_t>(c));
    store.chains[c] = sampler.run_chain(c, rng);
  };

  int workers = thread_budget(config.chains);
  if (workers <= 1) {
    for (int c = 0; c < config.chains; ++c) run_one(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int c = next.fetch_add(1); c < config.chains;
             c = next.fetch_add(1))
          run_one(c);
      });
    for (auto& th : pool) th.join();
  }
  return store;
}

double potential_scale_reduction(const std::vector<std::vector<double>>& chains) {
  // split each chain in half so a single chain can be diagnosed too
  std::vector<std::vector<double>> halves;
  for (const auto& c : chains) {
    std::size_t n = c.size() / 2;
    if (n < 2) throw InputError("chains too short for scale reduction");
    halves.emplace_back(c.begin(), c.begin() + n);
    halves.emplace_back(c.begin() + n, c.begin() + 2 * n);
  }
  const std::size_t m = halves.size();
  const std::size_t n = halves[0].size();
  for (const auto& h : halves)
    if (h.size() != n) throw InputError("chains must have equal lengths");

  std::vector<double> means(m);
  double grand = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    means[j] = std::accumulate(halves[j].begin(), halves[j].end(), 0.0) / n;
    grand += means[j];
  }
  grand /= m;
  double B = 0.0, W = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    B += (means[j] - grand) * (means[j] - grand);
    double s = 0.0;
    for (double v : halves[j]) s += (v - means[j]) * (v - means[j]);
    W += s / (n - 1);
  }
  B *= static_cast<double>(n) / (m - 1);
  W /= m;
  if (W <= 0.0) return 1.0;
  double var_plus = (static_cast<double>(n - 1) / n) * W + B / n;
  return std::sqrt(var_plus / W);
}

} // namespace svarmsh
