#pragma once

#include <Eigen/Dense>

#include "svarmsh/data.hpp"
#include "svarmsh/likelihood.hpp"
#include "svarmsh/parameters.hpp"
#include "svarmsh/rng.hpp"

namespace svarmsh {

// Stationary distribution of an irreducible transition matrix (rows sum to
// one).  Throws ModelError when the matrix is invalid or the stationary
// system is numerically singular.
Eigen::VectorXd ergodic_distribution(const Eigen::MatrixXd& P);

// Log observation densities per regime: entry (m, t) is
// log p(y_t | s_t = m, params).
Eigen::MatrixXd state_log_emissions(const ModelParameters& params,
                                    const TimeSeriesData& data,
                                    const DesignMatrices& design);

struct FilterResult {
  Eigen::MatrixXd filtered;  // M x T, p(s_t = m | y_{1:t})
  Eigen::MatrixXd predicted; // M x T, p(s_t = m | y_{1:t-1})
  double log_marginal = 0.0; // log p(Y | params), states integrated out
};

// Forward filter with the ergodic distribution as the time-zero prior.
FilterResult forward_filter(const Eigen::MatrixXd& log_emissions,
                            const Eigen::MatrixXd& P);

// Forward filtering, backward sampling of the state path.
StateSequence ffbs_sample(const Eigen::MatrixXd& log_emissions,
                          const Eigen::MatrixXd& P, RngStream& rng);

// log p(Y | params) with the state path integrated out.
double marginal_log_likelihood(const ModelParameters& params,
                               const TimeSeriesData& data,
                               const DesignMatrices& design);

} // namespace svarmsh
