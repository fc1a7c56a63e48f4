#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace svarmsh {

// Built-in exclusion/tie patterns for the contemporaneous matrix.  The
// unit diagonal is always fixed.  The three monetary-policy schemes are
// defined for six-variable systems ordered (output, prices, commodity
// prices, money, interest rate, exchange rate).
enum class SchemePreset {
  unrestricted,   // all off-diagonal entries free
  recursive,      // zeros above the diagonal
  taylor_money,   // interest rate reacts to output, prices and money
  taylor_no_money,// interest rate reacts to output and prices only
  money_interest, // interest rate reacts to money only
};

const char* scheme_preset_name(SchemePreset preset);
std::optional<SchemePreset> scheme_preset_from_name(const std::string& name);

// Linear restrictions on the contemporaneous matrix: vec(A0) = Q alpha + q
// with alpha the r free coefficients.  Ties (one coefficient appearing in
// several cells, possibly with flipped sign) are encoded as multiple
// nonzero entries in a column of Q.
struct RestrictionScheme {
  int N = 0;
  int r = 0;
  Eigen::MatrixXd Q; // N^2 x r
  Eigen::VectorXd q; // N^2
  std::string label;
  // Primary cell (row, col), 0-based, of each free coefficient; used for
  // report labels like "a_32".
  std::vector<std::pair<int, int>> primary_cells;

  std::string coefficient_label(int k) const;
};

// Builds a preset scheme for an N-variable system.  The monetary schemes
// require N = 6.
RestrictionScheme make_scheme(SchemePreset preset, int N);

// Applies the preset pattern only to the listed rows (0-based); all other
// rows keep every off-diagonal entry free.
RestrictionScheme make_scheme(SchemePreset preset, int N,
                              const std::vector<int>& restricted_rows);

// Wraps an explicit (Q, q) pair, validating shape, rank and the fixed unit
// diagonal.
RestrictionScheme scheme_from_matrices(const Eigen::MatrixXd& Q,
                                       const Eigen::VectorXd& q,
                                       std::string label = "custom");

// A0 = unvec(Q alpha + q); always carries the unit diagonal.
Eigen::MatrixXd reconstruct_A0(const RestrictionScheme& scheme,
                               const Eigen::VectorXd& alpha);

// Least-squares recovery of the free coefficients from a matrix; exact
// when A0 satisfies the scheme.
Eigen::VectorXd extract_alpha(const RestrictionScheme& scheme,
                              const Eigen::MatrixXd& A0);

} // namespace svarmsh
