#include "svarmsh/simulate.hpp"

#include <cmath>

#include "svarmsh/errors.hpp"
#include "svarmsh/hmm.hpp"

namespace svarmsh {

double companion_spectral_radius(const ModelParameters& params) {
  const int N = params.N();
  const int p = params.p();
  Eigen::MatrixXd A0_inv = params.A0.inverse();
  if (!A0_inv.allFinite()) throw ModelError("A0 is singular");
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(N * p, N * p);
  for (int l = 0; l < p; ++l)
    F.block(0, l * N, N, N) = A0_inv * params.A.block(0, 1 + l * N, N, N);
  if (p > 1)
    F.block(N, 0, N * (p - 1), N * (p - 1))
        .setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(F, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<TimeSeriesData, StateSequence>
simulate_data(const ModelParameters& params, int T, RngStream& rng, int burn) {
  const int N = params.N();
  const int p = params.p();
  const int M = params.M();
  if (T < 1) throw InputError("requested sample length must be positive");
  if (burn < 0) throw InputError("burn-in must be nonnegative");

  double radius = companion_spectral_radius(params);
  if (!(radius < 1.0 - 1e-9))
    throw ModelError("unstable autoregression: companion spectral radius " +
                     std::to_string(radius) + " >= 1");

  Eigen::MatrixXd A0_inv = params.A0.inverse();
  Eigen::VectorXd pi = ergodic_distribution(params.P);

  const int total = burn + p + T;
  Eigen::MatrixXd ys = Eigen::MatrixXd::Zero(N, total);
  Eigen::VectorXi ss(total);

  int s = rng.categorical(pi.data(), M);
  for (int t = 0; t < total; ++t) {
    if (t > 0) {
      Eigen::VectorXd row = params.P.row(s);
      s = rng.categorical(row.data(), M);
    }
    ss[t] = s;
    Eigen::VectorXd rhs = params.A.col(0); // intercept
    for (int l = 1; l <= p; ++l) {
      int src = t - l;
      if (src >= 0)
        rhs += params.A.block(0, 1 + (l - 1) * N, N, N) * ys.col(src);
    }
    for (int n = 0; n < N; ++n)
      rhs[n] += std::sqrt(params.variance(s, n)) * rng.normal();
    ys.col(t) = A0_inv * rhs;
  }

  TimeSeriesData data;
  data.initial_conditions = ys.middleCols(burn, p);
  data.Y = ys.rightCols(T);
  data.names.reserve(N);
  for (int n = 0; n < N; ++n) data.names.push_back("y" + std::to_string(n + 1));

  StateSequence states;
  states.s = ss.tail(T);
  return {std::move(data), std::move(states)};
}

} // namespace svarmsh
