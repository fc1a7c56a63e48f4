#include "svarmsh/parameters.hpp"

#include "svarmsh/errors.hpp"

namespace svarmsh {

Eigen::VectorXi StateSequence::counts(int M) const {
  Eigen::VectorXi c = Eigen::VectorXi::Zero(M);
  for (int t = 0; t < T(); ++t) {
    if (s[t] < 0 || s[t] >= M) throw ModelError("state label out of range");
    ++c[s[t]];
  }
  return c;
}

Eigen::MatrixXd StateSequence::transition_counts(int M) const {
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(M, M);
  for (int t = 0; t + 1 < T(); ++t) n(s[t], s[t + 1]) += 1.0;
  return n;
}

Eigen::MatrixXd ModelParameters::variance_matrix() const {
  Eigen::MatrixXd v(M(), N());
  for (int m = 0; m < M(); ++m)
    for (int n = 0; n < N(); ++n) v(m, n) = variance(m, n);
  return v;
}

PriorHyperparameters PriorHyperparameters::defaults(int N, int M) {
  PriorHyperparameters prior;
  prior.e = Eigen::MatrixXd::Ones(M, M);
  prior.e.diagonal().setConstant(10.0);
  prior.persistence = Eigen::VectorXd::Ones(N);
  return prior;
}

Eigen::VectorXd lag_decay_diagonal(int N, int p) {
  Eigen::VectorXd h(p * N);
  for (int l = 1; l <= p; ++l)
    h.segment((l - 1) * N, N).setConstant(1.0 / (double(l) * double(l)));
  return h;
}

Eigen::MatrixXd prior_slope_mean(const PriorHyperparameters& prior, int N,
                                 int p) {
  if (prior.persistence.size() != N)
    throw ModelError("persistence vector has wrong length");
  Eigen::MatrixXd pbar = Eigen::MatrixXd::Zero(N, p * N);
  pbar.leftCols(N) = prior.persistence.asDiagonal();
  return pbar;
}

Eigen::MatrixXd prior_A_mean(const PriorHyperparameters& prior, int N, int p) {
  Eigen::MatrixXd ptilde = Eigen::MatrixXd::Zero(N, 1 + p * N);
  ptilde.rightCols(p * N) = prior_slope_mean(prior, N, p);
  return ptilde;
}

Eigen::VectorXd prior_A_cov_diagonal(double gamma_mu, double gamma_beta,
                                     int N, int p) {
  Eigen::VectorXd d(1 + p * N);
  d[0] = gamma_mu;
  d.tail(p * N) = gamma_beta * lag_decay_diagonal(N, p);
  return d;
}

} // namespace svarmsh
