#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace svarmsh {

// Multivariate time series, one variable per row.  `Y` holds the effective
// estimation sample; `initial_conditions` holds the presample columns that
// seed the lags (chronological order, last column is the observation
// immediately before Y's first column).
struct TimeSeriesData {
  Eigen::MatrixXd Y;
  Eigen::MatrixXd initial_conditions;
  std::vector<std::string> names;

  int N() const { return static_cast<int>(Y.rows()); }
  int T() const { return static_cast<int>(Y.cols()); }
};

// Moves the first `p` columns of Y into the presample block.
TimeSeriesData with_presample(const TimeSeriesData& data, int p);

// Stacked regressors: column t of X is (1, y_{t-1}', ..., y_{t-p}')'.
struct DesignMatrices {
  Eigen::MatrixXd X; // K x T with K = 1 + p N
  int p = 0;

  int K() const { return static_cast<int>(X.rows()); }
  int T() const { return static_cast<int>(X.cols()); }
};

// Builds the regressor matrix for `p` lags; requires at least `p` presample
// columns in `data.initial_conditions`.
DesignMatrices build_design(const TimeSeriesData& data, int p);

} // namespace svarmsh
