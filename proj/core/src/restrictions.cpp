#include "svarmsh/restrictions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "svarmsh/errors.hpp"

namespace svarmsh {

namespace {

// Per-cell specification while assembling a scheme.
struct Cell {
  enum Kind { Fixed, Free } kind = Fixed;
  double value = 0.0; // for Fixed
  int param_key = -1; // identifies tied coefficients (any stable integer)
  double sign = 1.0;  // coefficient multiplier for Free
};

using CellTable = std::vector<std::vector<Cell>>; // [row][col]

Cell fixed(double v) {
  Cell c;
  c.kind = Cell::Fixed;
  c.value = v;
  return c;
}

Cell free_cell(int key, double sign = 1.0) {
  Cell c;
  c.kind = Cell::Free;
  c.param_key = key;
  c.sign = sign;
  return c;
}

int cell_key(int i, int j, int N) { return i + N * j; }

void fill_row_unrestricted(CellTable& cells, int i, int N) {
  for (int j = 0; j < N; ++j)
    if (j != i) cells[i][j] = free_cell(cell_key(i, j, N));
}

void fill_row_recursive(CellTable& cells, int i, int N) {
  for (int j = 0; j < N; ++j) {
    if (j == i) continue;
    cells[i][j] = j < i ? free_cell(cell_key(i, j, N)) : fixed(0.0);
  }
}

// Shared rows of the three monetary schemes (N = 6); they differ only in
// the interest-rate row (index 3).
void fill_row_monetary(CellTable& cells, int i, SchemePreset preset) {
  const int N = 6;
  auto zero_row = [&](std::initializer_list<int> free_js) {
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      bool is_free = std::find(free_js.begin(), free_js.end(), j) != free_js.end();
      cells[i][j] = is_free ? free_cell(cell_key(i, j, N)) : fixed(0.0);
    }
  };
  switch (i) {
    case 0: zero_row({}); break;
    case 1: zero_row({0}); break;
    case 2: zero_row({0, 1, 3, 4, 5}); break;
    case 3:
      switch (preset) {
        case SchemePreset::taylor_money: zero_row({0, 1, 4}); break;
        case SchemePreset::taylor_no_money: zero_row({0, 1}); break;
        case SchemePreset::money_interest: zero_row({4}); break;
        default: throw ModelError("not a monetary scheme");
      }
      break;
    case 4:
      zero_row({1, 5});
      cells[i][0] = fixed(-1.0);
      break;
    case 5:
      zero_row({3, 4});
      // exchange-rate row: coefficient on output is minus the one on the
      // interest rate
      cells[i][0] = free_cell(cell_key(5, 4, N), -1.0);
      break;
    default: throw ModelError("monetary schemes are six-variable");
  }
}

void fill_row(CellTable& cells, int i, int N, SchemePreset preset) {
  switch (preset) {
    case SchemePreset::unrestricted: fill_row_unrestricted(cells, i, N); break;
    case SchemePreset::recursive: fill_row_recursive(cells, i, N); break;
    default: fill_row_monetary(cells, i, preset); break;
  }
}

RestrictionScheme assemble(const CellTable& cells, int N, std::string label) {
  // Assign coefficient ids by column-major first appearance.
  std::map<int, int> key_to_id;
  std::vector<std::pair<int, int>> primary;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Cell& c = cells[i][j];
      if (c.kind == Cell::Free && !key_to_id.count(c.param_key)) {
        key_to_id[c.param_key] = static_cast<int>(primary.size());
        // label the coefficient by its defining cell
        int pi = c.param_key % N, pj = c.param_key / N;
        primary.emplace_back(pi, pj);
      }
    }

  RestrictionScheme scheme;
  scheme.N = N;
  scheme.r = static_cast<int>(primary.size());
  scheme.label = std::move(label);
  scheme.primary_cells = std::move(primary);
  scheme.Q = Eigen::MatrixXd::Zero(N * N, scheme.r);
  scheme.q = Eigen::VectorXd::Zero(N * N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Cell& c = cells[i][j];
      int vec_idx = i + N * j;
      if (i == j) {
        scheme.q[vec_idx] = 1.0;
      } else if (c.kind == Cell::Fixed) {
        scheme.q[vec_idx] = c.value;
      } else {
        scheme.Q(vec_idx, key_to_id.at(c.param_key)) = c.sign;
      }
    }
  return scheme;
}

bool is_monetary(SchemePreset preset) {
  return preset == SchemePreset::taylor_money ||
         preset == SchemePreset::taylor_no_money ||
         preset == SchemePreset::money_interest;
}

} // namespace

const char* scheme_preset_name(SchemePreset preset) {
  switch (preset) {
    case SchemePreset::unrestricted: return "unrestricted";
    case SchemePreset::recursive: return "recursive";
    case SchemePreset::taylor_money: return "taylor-money";
    case SchemePreset::taylor_no_money: return "taylor-no-money";
    case SchemePreset::money_interest: return "money-interest";
  }
  return "?";
}

std::optional<SchemePreset> scheme_preset_from_name(const std::string& name) {
  for (SchemePreset p :
       {SchemePreset::unrestricted, SchemePreset::recursive,
        SchemePreset::taylor_money, SchemePreset::taylor_no_money,
        SchemePreset::money_interest})
    if (name == scheme_preset_name(p)) return p;
  return std::nullopt;
}

std::string RestrictionScheme::coefficient_label(int k) const {
  auto [i, j] = primary_cells.at(static_cast<std::size_t>(k));
  return "a_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

RestrictionScheme make_scheme(SchemePreset preset, int N) {
  std::vector<int> all(N);
  for (int i = 0; i < N; ++i) all[i] = i;
  return make_scheme(preset, N, all);
}

RestrictionScheme make_scheme(SchemePreset preset, int N,
                              const std::vector<int>& restricted_rows) {
  if (N < 1) throw InputError("scheme requires N >= 1");
  if (is_monetary(preset) && N != 6)
    throw InputError(std::string(scheme_preset_name(preset)) +
                     " is a six-variable scheme, got N = " + std::to_string(N));
  std::vector<bool> restricted(N, false);
  for (int row : restricted_rows) {
    if (row < 0 || row >= N)
      throw InputError("restricted row index out of range: " +
                       std::to_string(row + 1));
    restricted[row] = true;
  }
  CellTable cells(N, std::vector<Cell>(N));
  for (int i = 0; i < N; ++i) {
    if (restricted[i])
      fill_row(cells, i, N, preset);
    else
      fill_row_unrestricted(cells, i, N);
  }
  std::string label = scheme_preset_name(preset);
  if (static_cast<int>(restricted_rows.size()) != N) {
    label += "(rows";
    for (int row : restricted_rows) label += " " + std::to_string(row + 1);
    label += ")";
  }
  return assemble(cells, N, label);
}

RestrictionScheme scheme_from_matrices(const Eigen::MatrixXd& Q,
                                       const Eigen::VectorXd& q,
                                       std::string label) {
  const int NN = static_cast<int>(q.size());
  const int N = static_cast<int>(std::lround(std::sqrt(double(NN))));
  if (N * N != NN || Q.rows() != NN)
    throw InputError("restriction matrices must have N^2 rows");
  if (!Q.allFinite() || !q.allFinite())
    throw InputError("restriction matrices must be finite");
  const int r = static_cast<int>(Q.cols());
  for (int d = 0; d < N; ++d) {
    int idx = d + N * d;
    if (q[idx] != 1.0 || (r > 0 && Q.row(idx).cwiseAbs().maxCoeff() != 0.0))
      throw InputError("diagonal of A0 must be fixed at one");
  }
  if (r > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Q);
    if (qr.rank() < r)
      throw InputError("restriction matrix Q is rank deficient");
  }
  RestrictionScheme scheme;
  scheme.N = N;
  scheme.r = r;
  scheme.Q = Q;
  scheme.q = q;
  scheme.label = std::move(label);
  // label each coefficient by its strongest loading, preferring a positive one
  for (int k = 0; k < r; ++k) {
    double best = Q.col(k).cwiseAbs().maxCoeff();
    int idx = -1;
    for (int row = 0; row < NN && idx < 0; ++row)
      if (Q(row, k) == best) idx = row;
    for (int row = 0; row < NN && idx < 0; ++row)
      if (std::abs(Q(row, k)) == best) idx = row;
    scheme.primary_cells.emplace_back(idx % N, idx / N);
  }
  return scheme;
}

Eigen::MatrixXd reconstruct_A0(const RestrictionScheme& scheme,
                               const Eigen::VectorXd& alpha) {
  if (alpha.size() != scheme.r)
    throw InputError("alpha has wrong length for scheme");
  Eigen::VectorXd v = scheme.q;
  if (scheme.r > 0) v += scheme.Q * alpha;
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), scheme.N, scheme.N);
}

Eigen::VectorXd extract_alpha(const RestrictionScheme& scheme,
                              const Eigen::MatrixXd& A0) {
  if (A0.rows() != scheme.N || A0.cols() != scheme.N)
    throw InputError("A0 has wrong shape for scheme");
  if (scheme.r == 0) return Eigen::VectorXd(0);
  Eigen::Map<const Eigen::VectorXd> v(A0.data(), scheme.N * scheme.N);
  Eigen::VectorXd rhs = v - scheme.q;
  return (scheme.Q.transpose() * scheme.Q)
      .ldlt()
      .solve(scheme.Q.transpose() * rhs);
}

} // namespace svarmsh
