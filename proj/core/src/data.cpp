#include "svarmsh/data.hpp"

#include "svarmsh/errors.hpp"

namespace svarmsh {

TimeSeriesData with_presample(const TimeSeriesData& data, int p) {
  if (p < 1) throw InputError("at least one lag required (p >= 1)");
  if (data.T() <= p)
    throw InputError("sample too short: need more than " + std::to_string(p) +
                     " observations to set aside " + std::to_string(p) +
                     " presample rows");
  TimeSeriesData out;
  out.names = data.names;
  const int N = data.N();
  const int p0 = static_cast<int>(data.initial_conditions.cols());
  out.initial_conditions.resize(N, p0 + p);
  if (p0 > 0) out.initial_conditions.leftCols(p0) = data.initial_conditions;
  out.initial_conditions.rightCols(p) = data.Y.leftCols(p);
  out.Y = data.Y.rightCols(data.T() - p);
  return out;
}

DesignMatrices build_design(const TimeSeriesData& data, int p) {
  if (p < 1) throw InputError("at least one lag required (p >= 1)");
  const int N = data.N();
  const int T = data.T();
  const int p0 = static_cast<int>(data.initial_conditions.cols());
  if (p0 < p)
    throw InputError("need " + std::to_string(p) + " presample columns, have " +
                     std::to_string(p0));
  if (N < 1 || T < 1) throw InputError("empty sample");

  DesignMatrices design;
  design.p = p;
  design.X.resize(1 + p * N, T);
  for (int t = 0; t < T; ++t) {
    design.X(0, t) = 1.0;
    for (int l = 1; l <= p; ++l) {
      int src = t - l;
      Eigen::VectorXd lagged =
          src >= 0 ? data.Y.col(src) : data.initial_conditions.col(p0 + src);
      design.X.block(1 + (l - 1) * N, t, N, 1) = lagged;
    }
  }
  return design;
}

} // namespace svarmsh
