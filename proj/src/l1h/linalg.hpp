#pragma once

#include <Eigen/Dense>

#include <vector>

namespace l1h {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// Gathers v(idx[0]), v(idx[1]), ...
Vector gather(const Vector& v, const IndexList& idx);
// Scatters values into a zero vector of length n at positions idx.
Vector scatter(const Vector& values, const IndexList& idx, Index n);
Matrix select_columns(const Matrix& a, const IndexList& idx);
Matrix select_rows(const Matrix& a, const IndexList& idx);

double sign_of(double v);
bool all_finite(const Matrix& m);

// Lower Cholesky factor L of a Gram submatrix, L*L^T = G, updatable one
// index at a time in O(dim^2).
class SpdFactor {
 public:
  SpdFactor() = default;

  static SpdFactor factor(const Matrix& gram, IndexList source = {});

  Index dim() const { return dim_; }
  const IndexList& source() const { return source_; }
  Index updates_since_factor() const { return updates_; }

  // Appends one index; column holds the Gram entries against the current
  // source indices, diagonal the new diagonal entry.
  void add_index(Index source_index, const Vector& column, double diagonal);
  void remove_index(Index position);
  // L*L^T + sign * v*v^T, sign = +1 (update) or -1 (downdate).
  void rank_one_update(const Vector& v, double sign);

  Vector solve(const Vector& rhs) const;
  Matrix lower() const;
  Matrix reconstruct() const;
  // Position of source index j, or -1.
  Index position_of(Index j) const;

 private:
  void reserve(Index capacity);
  double pivot_tolerance(double extra_diagonal) const;
  double max_diagonal() const;

  Matrix l_;  // capacity x capacity, leading dim_ x dim_ block is live
  Vector diag_;  // Gram diagonal for the pivot tolerance
  Index dim_ = 0;
  Index updates_ = 0;
  IndexList source_;
};

// Explicit inverse of a square, generally nonsymmetric matrix M, maintained
// under row/column appends, deletions and rank-one changes. Row positions of
// M are the columns of the stored inverse and vice versa.
class CrossGramInverse {
 public:
  void reset(const Matrix& m);

  Index size() const { return n_.rows(); }
  const Matrix& inverse() const { return n_; }
  bool needs_refresh() const { return updates_ >= refresh_interval_ || alarm_; }
  void set_refresh_interval(Index k) { refresh_interval_ = k; }

  Vector solve(const Vector& rhs) const { return n_ * rhs; }
  Vector solve_transpose(const Vector& rhs) const { return n_.transpose() * rhs; }

  // M <- [[M, col], [row^T, corner]]
  void append(const Vector& row, const Vector& col, double corner);
  // Deletes row row_pos and column col_pos of M; later rows and columns
  // shift down by one, as with std::vector::erase on the callers' lists.
  void remove(Index row_pos, Index col_pos);
  // M <- M + u v^T
  void rank_one_update(const Vector& u, const Vector& v);
  // Row row_pos of M increases by delta.
  void add_to_row(Index row_pos, const Vector& delta);
  // Column col_pos of M increases by delta.
  void add_to_column(Index col_pos, const Vector& delta);

 private:
  void check_denominator(double denom, double scale);

  Matrix n_;
  Index updates_ = 0;
  Index refresh_interval_ = 100;
  bool alarm_ = false;
};

// Least-squares estimate with explicit inverse Gram matrix, grown one row at
// a time.
struct LsState {
  Vector estimate;
  Matrix p;  // (A^T A)^{-1}
  Index m = 0;
};

LsState ls_solve(const Matrix& a, const Vector& y);
LsState rls_append(const LsState& s, const RowVector& b, double w);

}  // namespace l1h
