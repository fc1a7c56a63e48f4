#pragma once

#include <vector>

#include <Eigen/Dense>

#include "svarmsh/data.hpp"
#include "svarmsh/parameters.hpp"
#include "svarmsh/restrictions.hpp"

namespace svarmsh {

// Log density with a validity flag; `valid == false` means a structural
// failure (singular A0, parameter outside its support) and value -inf.
struct LogDensity {
  double value = 0.0;
  bool valid = true;
};

// log |det(B)| or -inf when numerically singular.
double log_abs_det(const Eigen::MatrixXd& B);

// Structural shocks U = A0 Y - A X (N x T).
Eigen::MatrixXd structural_residuals(const ModelParameters& params,
                                     const TimeSeriesData& data,
                                     const DesignMatrices& design);

// Per-regime, per-equation residual sums of squares: entry (m, n) is the
// squared norm of equation n's residuals over observations in regime m.
Eigen::MatrixXd residual_state_sums(const Eigen::MatrixXd& U,
                                    const StateSequence& states, int M);

// Conditional data density given the state path, written on the structural
// residuals.
LogDensity log_likelihood(const ModelParameters& params,
                          const StateSequence& states,
                          const TimeSeriesData& data,
                          const DesignMatrices& design);

// Same density rewritten as a regression in the free coefficients alpha of
// A0 (A, variances and states held at `params`); equals log_likelihood at
// alpha up to floating point noise.
LogDensity log_likelihood_alpha(const Eigen::VectorXd& alpha,
                                const ModelParameters& params,
                                const RestrictionScheme& scheme,
                                const StateSequence& states,
                                const TimeSeriesData& data,
                                const DesignMatrices& design);

// Analytic gradient of log_likelihood_alpha in alpha (for validation).
Eigen::VectorXd log_likelihood_alpha_grad(const Eigen::VectorXd& alpha,
                                          const ModelParameters& params,
                                          const RestrictionScheme& scheme,
                                          const StateSequence& states,
                                          const TimeSeriesData& data,
                                          const DesignMatrices& design);

// Joint prior density of all parameters (states excluded).
LogDensity log_prior(const ModelParameters& params,
                     const RestrictionScheme& scheme,
                     const PriorHyperparameters& prior);

// Reduced-form covariance of each regime: inv(A0) diag(variances) inv(A0)'.
std::vector<Eigen::MatrixXd> implied_covariances(const ModelParameters& params);

} // namespace svarmsh
