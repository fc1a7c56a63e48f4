#pragma once

#include <Eigen/Dense>

#include "svarmsh/rng.hpp"

namespace svarmsh::dist {

// ---------------------------------------------------------------------------
// Inverse gamma, type 2: density proportional to x^{-(a+2)/2} exp(-b/(2x)).
// Parametrized by degrees of freedom a > 0 and scale b > 0.
// ---------------------------------------------------------------------------
double ig2_log_pdf(double x, double a, double b);
double ig2_mode(double a, double b);           // b / (a + 2)
double ig2_mean(double a, double b);           // b / (a - 2), needs a > 2
double ig2_sample(double a, double b, RngStream& rng);

// ---------------------------------------------------------------------------
// Ratio of two independent ig2 variables: z = x1 / x2 with x1 ~ ig2(a1, b1),
// x2 ~ ig2(a2, b2).  Nests the F distribution: a1 = b1, a2 = b2 gives
// F(a2, a1).
// ---------------------------------------------------------------------------
double ig2r_log_pdf(double z, double a1, double a2, double b1, double b2);
double ig2r_pdf(double z, double a1, double a2, double b1, double b2);
// k-th raw moment; exists for a1 > 2k, throws MomentExistenceError otherwise.
double ig2r_moment(int k, double a1, double a2, double b1, double b2);
double ig2r_sample(double a1, double a2, double b1, double b2, RngStream& rng);

// ---------------------------------------------------------------------------
// Inverse gamma, type 1: distribution of sqrt(x) for x ~ ig2(a, b).
// ---------------------------------------------------------------------------
double ig1_log_pdf(double x, double a, double b);
double ig1_sample(double a, double b, RngStream& rng);

// ---------------------------------------------------------------------------
// Ratio of two independent ig1 variables; also the distribution of sqrt(z)
// for z ~ ig2r with the same parameters.
// ---------------------------------------------------------------------------
double ig1r_log_pdf(double z, double a1, double a2, double b1, double b2);
double ig1r_pdf(double z, double a1, double a2, double b1, double b2);
// k-th raw moment; the existence condition a1 > 2k is enforced.
double ig1r_moment(int k, double a1, double a2, double b1, double b2);
double ig1r_sample(double a1, double a2, double b1, double b2, RngStream& rng);

// ---------------------------------------------------------------------------
// Dirichlet on the probability simplex.
// ---------------------------------------------------------------------------
double dirichlet_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& e);
Eigen::VectorXd dirichlet_sample(const Eigen::VectorXd& e, RngStream& rng);

// ---------------------------------------------------------------------------
// Gaussian and Student-t vectors.  Scale matrices are passed as lower
// Cholesky factors so repeated draws share one factorization.
// ---------------------------------------------------------------------------
double normal_log_pdf(double x, double mean, double variance);
Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& chol_lower, RngStream& rng);
double mvn_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                   const Eigen::MatrixXd& chol_lower);
// Multivariate Student t with location `center`, scale matrix L L' and
// `dof` degrees of freedom (covariance = scale * dof/(dof-2) for dof > 2).
Eigen::VectorXd mvt_sample(const Eigen::VectorXd& center,
                           const Eigen::MatrixXd& chol_lower, double dof,
                           RngStream& rng);

} // namespace svarmsh::dist
