#pragma once

#include <Eigen/Dense>

#include "svarmsh/restrictions.hpp"

namespace svarmsh {

// Hidden state path, one 0-based regime index per effective observation.
struct StateSequence {
  Eigen::VectorXi s;

  int T() const { return static_cast<int>(s.size()); }
  // Occupation counts per regime.
  Eigen::VectorXi counts(int M) const;
  // Transition counts N_ij over consecutive pairs (s_t, s_{t+1}).
  Eigen::MatrixXd transition_counts(int M) const;
};

// Full parameter point of the switching structural model.
//   A0 y_t = mu + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t,
//   u_t | s_t ~ N(0, diag(variances of regime s_t))
// Row n of `A` stacks (mu_n, A_1 row n, ..., A_p row n).  Regime-1 shock
// variances are `lambda1`; regimes 2..M scale them by the rows of `omega`
// (relative variances, regime m in row m-2).
struct ModelParameters {
  Eigen::VectorXd alpha;   // free coefficients of A0 (length r)
  Eigen::MatrixXd A0;      // N x N, cached reconstruct_A0(scheme, alpha)
  Eigen::MatrixXd A;       // N x K with K = 1 + p N
  Eigen::VectorXd lambda1; // N
  Eigen::MatrixXd omega;   // (M-1) x N
  Eigen::MatrixXd P;       // M x M transition matrix, rows sum to one
  double gamma_alpha = 1.0;
  double gamma_mu = 1.0;
  double gamma_beta = 1.0;

  int N() const { return static_cast<int>(A0.rows()); }
  int M() const { return static_cast<int>(P.rows()); }
  int K() const { return static_cast<int>(A.cols()); }
  int p() const { return (K() - 1) / N(); }

  // Shock variance of equation n in 0-based regime m.
  double variance(int m, int n) const {
    return m == 0 ? lambda1[n] : lambda1[n] * omega(m - 1, n);
  }
  // M x N matrix of regime variances (row m = regime m+1).
  Eigen::MatrixXd variance_matrix() const;
};

// Hyperparameters of the hierarchical prior.
struct PriorHyperparameters {
  double a_lambda = 1.0, b_lambda = 1.0; // regime-1 variances
  double a_omega = 1.0, b_omega = 3.0;   // relative variances (mode at 1)
  double a_shrink = 1.0, b_shrink = 1.0; // shrinkage variances gamma_*
  Eigen::MatrixXd e;                     // M x M Dirichlet weights
  Eigen::VectorXd persistence;           // prior own-persistence per variable

  static PriorHyperparameters defaults(int N, int M);
};

// Diagonal of the fixed lag-decay matrix: every coefficient on lag l gets
// prior variance proportional to l^{-2}.  Length p N.
Eigen::VectorXd lag_decay_diagonal(int N, int p);

// Prior mean of the lag-coefficient block: [diag(persistence) 0 ... 0],
// N x p N; row n's slope prior mean is A0 row n times this.
Eigen::MatrixXd prior_slope_mean(const PriorHyperparameters& prior, int N,
                                 int p);

// Prior mean for a full row of A (intercept prepended): [0 prior_slope_mean],
// N x K.
Eigen::MatrixXd prior_A_mean(const PriorHyperparameters& prior, int N, int p);

// Diagonal of the prior covariance of a row of A given the shrinkage
// variances: (gamma_mu, gamma_beta * lag decay).  Length K.
Eigen::VectorXd prior_A_cov_diagonal(double gamma_mu, double gamma_beta,
                                     int N, int p);

} // namespace svarmsh
