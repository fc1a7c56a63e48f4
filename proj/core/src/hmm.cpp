#include "svarmsh/hmm.hpp"

#include <cmath>

#include "svarmsh/errors.hpp"
#include "svarmsh/util.hpp"

namespace svarmsh {

Eigen::VectorXd ergodic_distribution(const Eigen::MatrixXd& P) {
  const int M = static_cast<int>(P.rows());
  if (P.cols() != M || M < 1) throw ModelError("transition matrix not square");
  if (!P.allFinite() || (P.array() < 0.0).any())
    throw ModelError("transition matrix has invalid entries");
  for (int m = 0; m < M; ++m)
    if (std::abs(P.row(m).sum() - 1.0) > 1e-8)
      throw ModelError("transition matrix rows must sum to one");
  if (M == 1) return Eigen::VectorXd::Ones(1);

  // Solve pi' (P - I) = 0 with the normalization sum(pi) = 1 by replacing
  // the last equation.
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(M, M);
  A.row(M - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(M);
  b[M - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  // Reducible or periodic chains have no unique stationary law; start
  // uniform so degenerate inputs (absorbing states, identity matrix)
  // remain usable for filtering.
  if (!lu.isInvertible()) return Eigen::VectorXd::Constant(M, 1.0 / M);
  Eigen::VectorXd pi = lu.solve(b);
  if ((pi.array() < -1e-10).any())
    return Eigen::VectorXd::Constant(M, 1.0 / M);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

Eigen::MatrixXd state_log_emissions(const ModelParameters& params,
                                    const TimeSeriesData& data,
                                    const DesignMatrices& design) {
  const int N = params.N();
  const int M = params.M();
  const int T = data.T();
  double ldet = log_abs_det(params.A0);
  if (!std::isfinite(ldet)) {
    return Eigen::MatrixXd::Constant(M, T, neg_inf());
  }
  Eigen::MatrixXd U = structural_residuals(params, data, design);
  Eigen::MatrixXd le(M, T);
  for (int m = 0; m < M; ++m) {
    double base = ldet - 0.5 * N * std::log(2.0 * M_PI);
    Eigen::VectorXd inv_var(N);
    for (int n = 0; n < N; ++n) {
      double v = params.variance(m, n);
      base -= 0.5 * std::log(v);
      inv_var[n] = 1.0 / v;
    }
    for (int t = 0; t < T; ++t)
      le(m, t) =
          base - 0.5 * (U.col(t).array().square() * inv_var.array()).sum();
  }
  return le;
}

FilterResult forward_filter(const Eigen::MatrixXd& log_emissions,
                            const Eigen::MatrixXd& P) {
  const int M = static_cast<int>(log_emissions.rows());
  const int T = static_cast<int>(log_emissions.cols());
  FilterResult out;
  out.filtered.resize(M, T);
  out.predicted.resize(M, T);
  Eigen::VectorXd prior = ergodic_distribution(P);

  Eigen::VectorXd pred = prior;
  double log_marginal = 0.0;
  for (int t = 0; t < T; ++t) {
    out.predicted.col(t) = pred;
    double mx = log_emissions.col(t).maxCoeff();
    if (!std::isfinite(mx)) {
      // all regimes assign zero density: the whole path has density zero
      out.log_marginal = neg_inf();
      out.filtered.rightCols(T - t).setConstant(1.0 / M);
      out.predicted.rightCols(T - t).setConstant(1.0 / M);
      return out;
    }
    Eigen::VectorXd w =
        pred.array() * (log_emissions.col(t).array() - mx).exp();
    double norm = w.sum();
    if (!(norm > 0.0)) {
      out.log_marginal = neg_inf();
      out.filtered.rightCols(T - t).setConstant(1.0 / M);
      out.predicted.rightCols(T - t).setConstant(1.0 / M);
      return out;
    }
    log_marginal += mx + std::log(norm);
    out.filtered.col(t) = w / norm;
    pred = P.transpose() * out.filtered.col(t);
  }
  out.log_marginal = log_marginal;
  return out;
}

StateSequence ffbs_sample(const Eigen::MatrixXd& log_emissions,
                          const Eigen::MatrixXd& P, RngStream& rng) {
  const int M = static_cast<int>(log_emissions.rows());
  const int T = static_cast<int>(log_emissions.cols());
  StateSequence states;
  states.s.resize(T);
  if (M == 1) {
    states.s.setZero();
    return states;
  }
  FilterResult filt = forward_filter(log_emissions, P);

  Eigen::VectorXd w = filt.filtered.col(T - 1);
  states.s[T - 1] = rng.categorical(w.data(), M);
  for (int t = T - 2; t >= 0; --t) {
    int next = states.s[t + 1];
    w = filt.filtered.col(t).array() * P.col(next).array();
    if (!(w.sum() > 0.0)) w = filt.filtered.col(t);
    states.s[t] = rng.categorical(w.data(), M);
  }
  return states;
}

double marginal_log_likelihood(const ModelParameters& params,
                               const TimeSeriesData& data,
                               const DesignMatrices& design) {
  Eigen::MatrixXd le = state_log_emissions(params, data, design);
  return forward_filter(le, params.P).log_marginal;
}

} // namespace svarmsh
