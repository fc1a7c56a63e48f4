#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "svarmsh/rng.hpp"

namespace svarmsh {

// Uniqueness verdicts from the relative-variance criterion: row k of the
// contemporaneous matrix is pinned down when equation k's vector of
// relative variances across regimes differs from every other equation's.
struct IdentificationReport {
  std::vector<bool> row_unique;
  bool globally_unique = false;
  std::vector<std::pair<int, int>> colliding_pairs; // 0-based equation pairs
  std::string note;
};

// `variances`: M x N matrix of regime shock variances (row m = regime m+1).
// Two equations collide when their relative-variance profiles agree within
// `tol` (relative) in every coordinate.
IdentificationReport check_identification(const Eigen::MatrixXd& variances,
                                          double tol);

struct DecompositionCheck {
  double max_rel_error = 0.0;
  bool ok = false;
};

// Checks Sigma_m = inv(A0) diag(variances row m) inv(A0)' for every regime;
// the error is scaled by each matrix's largest entry.
DecompositionCheck verify_decomposition(const Eigen::MatrixXd& A0,
                                        const Eigen::MatrixXd& variances,
                                        const std::vector<Eigen::MatrixXd>& sigmas,
                                        double tol);

// Exhaustive small-system search for every unit-diagonal matrix B such that
// all sigmas are simultaneously diagonalized as inv(B) D_m inv(B)'.
// Parametrizes candidates as rotations of the regime-1 Cholesky factor and
// polishes random starts with a derivative-free minimizer of the joint
// off-diagonality.  Solutions are reported modulo equation relabeling and
// deduplicated at Frobenius distance 100 * tol.  Practical for N <= 4.
std::vector<Eigen::MatrixXd>
brute_force_alternatives(const std::vector<Eigen::MatrixXd>& sigmas,
                         int n_starts, double tol, RngStream& rng);

} // namespace svarmsh
