#include "svarmsh/identification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "svarmsh/errors.hpp"

namespace svarmsh {

IdentificationReport check_identification(const Eigen::MatrixXd& variances,
                                          double tol) {
  const int M = static_cast<int>(variances.rows());
  const int N = static_cast<int>(variances.cols());
  if (M < 1 || N < 1) throw InputError("empty variance matrix");
  if ((variances.array() <= 0.0).any())
    throw InputError("variances must be positive");

  IdentificationReport report;
  report.row_unique.assign(N, false);
  if (M == 1) {
    report.note = "single regime: relative variances carry no identifying "
                  "information";
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) report.colliding_pairs.emplace_back(i, j);
    return report;
  }

  // profiles(m-1, n) = variance ratio of regime m+1 to regime 1, equation n
  Eigen::MatrixXd profiles(M - 1, N);
  for (int m = 1; m < M; ++m)
    for (int n = 0; n < N; ++n)
      profiles(m - 1, n) = variances(m, n) / variances(0, n);

  auto same_profile = [&](int i, int j) {
    for (int m = 0; m < M - 1; ++m) {
      double a = profiles(m, i), b = profiles(m, j);
      if (std::abs(a - b) > tol * std::max(std::abs(a), std::abs(b)))
        return false;
    }
    return true;
  };

  std::vector<bool> collides(N, false);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (same_profile(i, j)) {
        report.colliding_pairs.emplace_back(i, j);
        collides[i] = collides[j] = true;
      }
  for (int n = 0; n < N; ++n) report.row_unique[n] = !collides[n];
  report.globally_unique =
      std::all_of(report.row_unique.begin(), report.row_unique.end(),
                  [](bool b) { return b; });
  return report;
}

DecompositionCheck verify_decomposition(const Eigen::MatrixXd& A0,
                                        const Eigen::MatrixXd& variances,
                                        const std::vector<Eigen::MatrixXd>& sigmas,
                                        double tol) {
  const int N = static_cast<int>(A0.rows());
  const int M = static_cast<int>(variances.rows());
  if (static_cast<int>(sigmas.size()) != M)
    throw InputError("number of covariance matrices must match regimes");
  for (const auto& s : sigmas) {
    if (s.rows() != N || s.cols() != N)
      throw InputError("covariance matrix has wrong shape");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, s.cwiseAbs().maxCoeff()))
      throw InputError("covariance matrix is not symmetric");
  }
  Eigen::MatrixXd A0_inv = A0.inverse();
  if (!A0_inv.allFinite()) throw ModelError("A0 is singular");

  DecompositionCheck check;
  for (int m = 0; m < M; ++m) {
    Eigen::MatrixXd implied =
        A0_inv * variances.row(m).asDiagonal() * A0_inv.transpose();
    double scale = std::max(sigmas[m].cwiseAbs().maxCoeff(), 1e-12);
    double err = (implied - sigmas[m]).cwiseAbs().maxCoeff() / scale;
    check.max_rel_error = std::max(check.max_rel_error, err);
  }
  check.ok = check.max_rel_error <= tol;
  return check;
}

namespace {

// Rotation from the vector of plane angles, planes ordered (0,1), (0,2),
// ..., (N-2,N-1).
Eigen::MatrixXd rotation_from_angles(const Eigen::VectorXd& angles, int N) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(N, N);
  int k = 0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j, ++k) {
      double c = std::cos(angles[k]), s = std::sin(angles[k]);
      Eigen::MatrixXd G = Eigen::MatrixXd::Identity(N, N);
      G(i, i) = c;
      G(j, j) = c;
      G(i, j) = -s;
      G(j, i) = s;
      Q = Q * G;
    }
  return Q;
}

// Derivative-free simplex minimizer (Nelder-Mead), good enough for the
// <= 6 dimensional angle spaces handled here.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            Eigen::VectorXd x0, double step, int max_iter,
                            double ftol) {
  const int d = static_cast<int>(x0.size());
  if (d == 0) return x0;
  std::vector<Eigen::VectorXd> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 0; i < d; ++i) xs[i + 1][i] += step;
  for (int i = 0; i <= d; ++i) fs[i] = f(xs[i]);

  std::vector<int> order(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    if (fs[order[d]] - fs[order[0]] < ftol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += xs[order[i]];
    centroid /= d;
    int worst = order[d];

    Eigen::VectorXd xr = centroid + (centroid - xs[worst]);
    double fr = f(xr);
    if (fr < fs[order[0]]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      double fe = f(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[order[d - 1]]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (xs[worst] - centroid);
      double fc = f(xc);
      if (fc < fs[worst]) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          xs[order[i]] = xs[order[0]] + 0.5 * (xs[order[i]] - xs[order[0]]);
          fs[order[i]] = f(xs[order[i]]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= d; ++i)
    if (fs[i] < fs[best]) best = i;
  return xs[best];
}

// Unit-diagonal normalization of B's rows after the best row-to-equation
// assignment (the one maximizing the product of |diagonal| entries), so
// solutions are compared modulo relabeling of equations.  Returns an empty
// matrix when no assignment yields nonzero diagonal entries.
Eigen::MatrixXd canonical_unit_diagonal(const Eigen::MatrixXd& B) {
  const int N = static_cast<int>(B.rows());
  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double score = 0.0;
    bool ok = true;
    for (int k = 0; k < N && ok; ++k) {
      double d = std::abs(B(perm[k], k));
      if (d < 1e-10) ok = false;
      else score += std::log(d);
    }
    if (ok && score > best_score) {
      best_score = score;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best_perm.empty()) return {};

  Eigen::MatrixXd A0(N, N);
  for (int k = 0; k < N; ++k) A0.row(k) = B.row(best_perm[k]) / B(best_perm[k], k);
  return A0;
}

} // namespace

std::vector<Eigen::MatrixXd>
brute_force_alternatives(const std::vector<Eigen::MatrixXd>& sigmas,
                         int n_starts, double tol, RngStream& rng) {
  if (sigmas.empty()) throw InputError("need at least one covariance matrix");
  const int N = static_cast<int>(sigmas[0].rows());
  if (N < 2 || N > 4)
    throw InputError("exhaustive search supports 2 to 4 variables");
  if (n_starts < 1) throw InputError("need at least one start");
  for (const auto& s : sigmas)
    if (s.rows() != N || s.cols() != N ||
        (s - s.transpose()).cwiseAbs().maxCoeff() >
            1e-10 * std::max(1.0, s.cwiseAbs().maxCoeff()))
      throw InputError("covariance matrices must be symmetric, same size");

  Eigen::LLT<Eigen::MatrixXd> llt(sigmas[0]);
  if (llt.info() != Eigen::Success)
    throw ModelError("regime-1 covariance is not positive definite");
  Eigen::MatrixXd C = llt.matrixL();

  // whitened later-regime covariances; rotations must diagonalize them all
  std::vector<Eigen::MatrixXd> deltas;
  double scale = 0.0;
  for (std::size_t m = 1; m < sigmas.size(); ++m) {
    Eigen::MatrixXd w = C.triangularView<Eigen::Lower>().solve(sigmas[m]);
    Eigen::MatrixXd delta =
        C.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
    delta = 0.5 * (delta + delta.transpose());
    deltas.push_back(delta);
    scale += delta.squaredNorm();
  }
  if (scale <= 0.0) scale = 1.0;

  const int d = N * (N - 1) / 2;
  auto objective = [&](const Eigen::VectorXd& angles) {
    Eigen::MatrixXd Q = rotation_from_angles(angles, N);
    double off = 0.0;
    for (const auto& delta : deltas) {
      Eigen::MatrixXd R = Q.transpose() * delta * Q;
      off += R.squaredNorm() - R.diagonal().squaredNorm();
    }
    return off / scale;
  };

  std::vector<Eigen::MatrixXd> solutions;
  auto try_candidate = [&](const Eigen::MatrixXd& Q) {
    // candidate factor CQ; its inverse's rows are candidate equations
    Eigen::MatrixXd B = Q.transpose() *
                        C.triangularView<Eigen::Lower>()
                            .solve(Eigen::MatrixXd::Identity(N, N));
    Eigen::MatrixXd A0 = canonical_unit_diagonal(B);
    if (A0.size() == 0) return;
    // implied regime variances must be positive and the decomposition exact
    Eigen::MatrixXd variances(sigmas.size(), N);
    for (std::size_t m = 0; m < sigmas.size(); ++m) {
      Eigen::MatrixXd D = A0 * sigmas[m] * A0.transpose();
      for (int n = 0; n < N; ++n) variances(static_cast<int>(m), n) = D(n, n);
    }
    if ((variances.array() <= 0.0).any()) return;
    if (!verify_decomposition(A0, variances, sigmas, std::sqrt(tol)).ok) return;
    for (const auto& existing : solutions)
      if ((existing - A0).norm() < 100.0 * tol) return;
    solutions.push_back(A0);
  };

  const double f_accept = tol * tol;
  for (int start = 0; start < n_starts; ++start) {
    Eigen::VectorXd angles(d);
    for (int k = 0; k < d; ++k) angles[k] = 2.0 * M_PI * rng.uniform();
    if (!deltas.empty()) {
      angles = nelder_mead(objective, angles, 0.4, 4000, 1e-18);
      angles = nelder_mead(objective, angles, 0.02, 2000, 1e-18);
      if (objective(angles) > f_accept) continue;
    }
    Eigen::MatrixXd Q = rotation_from_angles(angles, N);
    try_candidate(Q);
    // reflections reach the other orthogonal component; sign flips of
    // whole columns wash out in the unit-diagonal normalization but are
    // cheap to sweep for completeness
    for (unsigned mask = 1; mask < (1u << N); ++mask) {
      Eigen::MatrixXd S = Eigen::MatrixXd::Identity(N, N);
      for (int n = 0; n < N; ++n)
        if (mask & (1u << n)) S(n, n) = -1.0;
      try_candidate(Q * S);
    }
  }
  return solutions;
}

} // namespace svarmsh
