#include "svarmsh/likelihood.hpp"

#include <cmath>

#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/util.hpp"

namespace svarmsh {

double log_abs_det(const Eigen::MatrixXd& B) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  double acc = 0.0;
  for (int i = 0; i < B.rows(); ++i) {
    double d = std::abs(lu.matrixLU()(i, i));
    if (d <= 0.0 || !std::isfinite(d)) return neg_inf();
    acc += std::log(d);
  }
  return acc;
}

Eigen::MatrixXd structural_residuals(const ModelParameters& params,
                                     const TimeSeriesData& data,
                                     const DesignMatrices& design) {
  if (data.T() != design.T())
    throw ModelError("sample and design lengths differ");
  return params.A0 * data.Y - params.A * design.X;
}

Eigen::MatrixXd residual_state_sums(const Eigen::MatrixXd& U,
                                    const StateSequence& states, int M) {
  const int N = static_cast<int>(U.rows());
  const int T = static_cast<int>(U.cols());
  if (states.T() != T) throw ModelError("state path length mismatch");
  Eigen::MatrixXd ssr = Eigen::MatrixXd::Zero(M, N);
  for (int t = 0; t < T; ++t) {
    int m = states.s[t];
    if (m < 0 || m >= M) throw ModelError("state label out of range");
    ssr.row(m) += U.col(t).array().square().matrix().transpose();
  }
  return ssr;
}

LogDensity log_likelihood(const ModelParameters& params,
                          const StateSequence& states,
                          const TimeSeriesData& data,
                          const DesignMatrices& design) {
  const int N = params.N();
  const int M = params.M();
  const int T = data.T();

  double ldet = log_abs_det(params.A0);
  if (!std::isfinite(ldet)) return {neg_inf(), false};
  if ((params.lambda1.array() <= 0.0).any() ||
      (M > 1 && (params.omega.array() <= 0.0).any()))
    return {neg_inf(), false};

  Eigen::MatrixXd U = structural_residuals(params, data, design);
  Eigen::MatrixXd ssr = residual_state_sums(U, states, M);
  Eigen::VectorXi counts = states.counts(M);

  double ll = -0.5 * T * N * std::log(2.0 * M_PI) + T * ldet;
  ll -= 0.5 * T * params.lambda1.array().log().sum();
  for (int m = 1; m < M; ++m)
    ll -= 0.5 * counts[m] * params.omega.row(m - 1).array().log().sum();
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n)
      ll -= 0.5 * ssr(m, n) / params.variance(m, n);
  return {ll, true};
}

namespace {

// Pieces of the regression-in-alpha form: for each observation,
//   u_t = ybar_t - xbar_t alpha,
// with ybar_t = unvec-row application of the fixed part q minus A x_t and
// xbar_t = -(y_t' (x) I_N) Q.  Rather than materializing the Kronecker
// products we use (y' (x) I) v = unvec(v) y.
struct AlphaForm {
  Eigen::MatrixXd Ybar; // N x T
  // Applies xbar_t to a coefficient vector: columns of (Qmat_k y_t).
  // Qcols[k] is unvec(Q col k), N x N.
  std::vector<Eigen::MatrixXd> Qcols;
};

AlphaForm build_alpha_form(const ModelParameters& params,
                           const RestrictionScheme& scheme,
                           const TimeSeriesData& data,
                           const DesignMatrices& design) {
  const int N = scheme.N;
  AlphaForm f;
  Eigen::Map<const Eigen::MatrixXd> Qfix(scheme.q.data(), N, N);
  f.Ybar = Qfix * data.Y - params.A * design.X;
  f.Qcols.reserve(scheme.r);
  for (int k = 0; k < scheme.r; ++k) {
    Eigen::Map<const Eigen::MatrixXd> Qk(scheme.Q.col(k).data(), N, N);
    f.Qcols.emplace_back(Qk);
  }
  return f;
}

} // namespace

LogDensity log_likelihood_alpha(const Eigen::VectorXd& alpha,
                                const ModelParameters& params,
                                const RestrictionScheme& scheme,
                                const StateSequence& states,
                                const TimeSeriesData& data,
                                const DesignMatrices& design) {
  const int N = scheme.N;
  const int M = params.M();
  const int T = data.T();
  if (alpha.size() != scheme.r) throw ModelError("alpha length mismatch");

  Eigen::MatrixXd A0 = reconstruct_A0(scheme, alpha);
  double ldet = log_abs_det(A0);
  if (!std::isfinite(ldet)) return {neg_inf(), false};

  AlphaForm f = build_alpha_form(params, scheme, data, design);
  // residuals: Ybar + sum_k alpha_k (Qcol_k Y)
  Eigen::MatrixXd U = f.Ybar;
  for (int k = 0; k < scheme.r; ++k) U += alpha[k] * (f.Qcols[k] * data.Y);

  Eigen::MatrixXd ssr = residual_state_sums(U, states, M);
  Eigen::VectorXi counts = states.counts(M);

  double ll = -0.5 * T * N * std::log(2.0 * M_PI) + T * ldet;
  ll -= 0.5 * T * params.lambda1.array().log().sum();
  for (int m = 1; m < M; ++m)
    ll -= 0.5 * counts[m] * params.omega.row(m - 1).array().log().sum();
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n)
      ll -= 0.5 * ssr(m, n) / params.variance(m, n);
  return {ll, true};
}

Eigen::VectorXd log_likelihood_alpha_grad(const Eigen::VectorXd& alpha,
                                          const ModelParameters& params,
                                          const RestrictionScheme& scheme,
                                          const StateSequence& states,
                                          const TimeSeriesData& data,
                                          const DesignMatrices& design) {
  const int N = scheme.N;
  const int T = data.T();
  Eigen::MatrixXd A0 = reconstruct_A0(scheme, alpha);

  AlphaForm f = build_alpha_form(params, scheme, data, design);
  Eigen::MatrixXd U = f.Ybar;
  for (int k = 0; k < scheme.r; ++k) U += alpha[k] * (f.Qcols[k] * data.Y);

  // scale residuals by the inverse regime variance of their observation
  Eigen::MatrixXd W = U;
  for (int t = 0; t < T; ++t) {
    int m = states.s[t];
    for (int n = 0; n < N; ++n) W(n, t) /= params.variance(m, n);
  }

  Eigen::MatrixXd A0_inv_T = A0.inverse().transpose();
  Eigen::MatrixXd WYt = W * data.Y.transpose(); // N x N
  Eigen::VectorXd grad(scheme.r);
  for (int k = 0; k < scheme.r; ++k) {
    double det_term = (f.Qcols[k].array() * A0_inv_T.array()).sum();
    double quad_term = (f.Qcols[k].array() * WYt.array()).sum();
    grad[k] = T * det_term - quad_term;
  }
  return grad;
}

LogDensity log_prior(const ModelParameters& params,
                     const RestrictionScheme& scheme,
                     const PriorHyperparameters& prior) {
  const int N = params.N();
  const int M = params.M();
  const int p = params.p();

  if (params.gamma_alpha <= 0.0 || params.gamma_mu <= 0.0 ||
      params.gamma_beta <= 0.0)
    return {neg_inf(), false};
  if ((params.lambda1.array() <= 0.0).any()) return {neg_inf(), false};
  if (M > 1 && (params.omega.array() <= 0.0).any()) return {neg_inf(), false};
  for (int m = 0; m < M; ++m) {
    if ((params.P.row(m).array() < 0.0).any() ||
        std::abs(params.P.row(m).sum() - 1.0) > 1e-8)
      return {neg_inf(), false};
  }

  double lp = 0.0;
  // shrinkage variances
  for (double g : {params.gamma_alpha, params.gamma_mu, params.gamma_beta})
    lp += dist::ig2_log_pdf(g, prior.a_shrink, prior.b_shrink);
  // free coefficients of A0
  for (int k = 0; k < scheme.r; ++k)
    lp += dist::normal_log_pdf(params.alpha[k], 0.0, params.gamma_alpha);
  // transition matrix rows
  for (int m = 0; m < M; ++m)
    lp += dist::dirichlet_log_pdf(params.P.row(m).transpose(),
                                  prior.e.row(m).transpose());
  // regime-1 variances and relative variances
  for (int n = 0; n < N; ++n)
    lp += dist::ig2_log_pdf(params.lambda1[n], prior.a_lambda, prior.b_lambda);
  for (int m = 1; m < M; ++m)
    for (int n = 0; n < N; ++n)
      lp += dist::ig2_log_pdf(params.omega(m - 1, n), prior.a_omega,
                              prior.b_omega);
  // autoregressive rows: intercept and lag coefficients
  Eigen::MatrixXd pbar = prior_slope_mean(prior, N, p);
  Eigen::VectorXd hbar = lag_decay_diagonal(N, p);
  for (int n = 0; n < N; ++n) {
    lp += dist::normal_log_pdf(params.A(n, 0), 0.0, params.gamma_mu);
    Eigen::RowVectorXd mean = params.A0.row(n) * pbar;
    for (int l = 0; l < p * N; ++l)
      lp += dist::normal_log_pdf(params.A(n, 1 + l), mean[l],
                                 params.gamma_beta * hbar[l]);
  }
  return {lp, true};
}

std::vector<Eigen::MatrixXd> implied_covariances(const ModelParameters& params) {
  const int M = params.M();
  Eigen::MatrixXd A0_inv = params.A0.inverse();
  if (!A0_inv.allFinite()) throw ModelError("A0 is singular");
  std::vector<Eigen::MatrixXd> sigmas;
  sigmas.reserve(M);
  for (int m = 0; m < M; ++m) {
    Eigen::VectorXd v(params.N());
    for (int n = 0; n < params.N(); ++n) v[n] = params.variance(m, n);
    Eigen::MatrixXd s = A0_inv * v.asDiagonal() * A0_inv.transpose();
    sigmas.push_back(0.5 * (s + s.transpose()));
  }
  return sigmas;
}

} // namespace svarmsh
