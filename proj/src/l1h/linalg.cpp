#include "l1h/linalg.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace l1h {

Vector gather(const Vector& v, const IndexList& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = v(idx[i]);
  return out;
}

Vector scatter(const Vector& values, const IndexList& idx, Index n) {
  Vector out = Vector::Zero(n);
  for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i]) = values(static_cast<Index>(i));
  return out;
}

Matrix select_columns(const Matrix& a, const IndexList& idx) {
  Matrix out(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Index>(i)) = a.col(idx[i]);
  return out;
}

Matrix select_rows(const Matrix& a, const IndexList& idx) {
  Matrix out(static_cast<Index>(idx.size()), a.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = a.row(idx[i]);
  return out;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// In-place rank-one update/downdate of a lower Cholesky block.
template <typename Block>
bool chol_rank_one(Block l, Vector v, double sign) {
  const Index n = l.rows();
  for (Index k = 0; k < n; ++k) {
    const double lkk = l(k, k);
    const double r2 = lkk * lkk + sign * v(k) * v(k);
    if (!(r2 > 0.0)) return false;
    const double r = std::sqrt(r2);
    const double c = r / lkk;
    const double s = v(k) / lkk;
    l(k, k) = r;
    if (k + 1 < n) {
      const Index rest = n - k - 1;
      l.col(k).tail(rest) = (l.col(k).tail(rest) + sign * s * v.tail(rest)) / c;
      v.tail(rest) = c * v.tail(rest) - s * l.col(k).tail(rest);
    }
  }
  return true;
}

}  // namespace

SpdFactor SpdFactor::factor(const Matrix& gram, IndexList source) {
  const Index n = gram.rows();
  if (gram.cols() != n) raise(ErrorCode::InvalidArgument, "gram matrix must be square");
  if (!source.empty() && static_cast<Index>(source.size()) != n) {
    raise(ErrorCode::InvalidArgument, "source index count does not match gram dimension");
  }
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if (n > 0 && (gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    raise(ErrorCode::InvalidArgument, "gram matrix is not symmetric");
  }
  SpdFactor f;
  if (source.empty()) {
    for (Index i = 0; i < n; ++i) source.push_back(i);
  }
  f.reserve(std::max<Index>(n, 8));
  for (Index i = 0; i < n; ++i) {
    f.add_index(source[static_cast<std::size_t>(i)], gram.col(i).head(i), gram(i, i));
  }
  f.updates_ = 0;
  return f;
}

void SpdFactor::reserve(Index capacity) {
  if (capacity <= l_.rows()) return;
  Matrix grown = Matrix::Zero(capacity, capacity);
  grown.topLeftCorner(dim_, dim_) = l_.topLeftCorner(dim_, dim_);
  l_.swap(grown);
  Vector d = Vector::Zero(capacity);
  d.head(dim_) = diag_.head(dim_);
  diag_.swap(d);
}

double SpdFactor::max_diagonal() const {
  return dim_ == 0 ? 0.0 : diag_.head(dim_).maxCoeff();
}

double SpdFactor::pivot_tolerance(double extra_diagonal) const {
  const double maxd = std::max(max_diagonal(), extra_diagonal);
  return static_cast<double>(dim_ + 1) * kEps * maxd;
}

void SpdFactor::add_index(Index source_index, const Vector& column, double diagonal) {
  if (column.size() != dim_) raise(ErrorCode::InvalidArgument, "gram column has wrong length");
  Vector l = column;
  if (dim_ > 0) {
    l_.topLeftCorner(dim_, dim_).triangularView<Eigen::Lower>().solveInPlace(l);
  }
  const double d2 = diagonal - l.squaredNorm();
  if (!(d2 > pivot_tolerance(diagonal)) || !std::isfinite(d2)) {
    raise(ErrorCode::NotPositiveDefinite,
          "pivot " + std::to_string(d2) + " at dimension " + std::to_string(dim_ + 1));
  }
  if (dim_ + 1 > l_.rows()) reserve(std::max<Index>(2 * l_.rows(), 8));
  l_.row(dim_).head(dim_) = l.transpose();
  l_(dim_, dim_) = std::sqrt(d2);
  diag_(dim_) = diagonal;
  source_.push_back(source_index);
  ++dim_;
  ++updates_;
}

void SpdFactor::remove_index(Index position) {
  if (position < 0 || position >= dim_) raise(ErrorCode::InvalidArgument, "remove position out of range");
  const Index tail = dim_ - position - 1;
  Vector v = l_.col(position).segment(position + 1, tail);
  // Shift trailing rows up and trailing columns left.
  for (Index r = position; r < dim_ - 1; ++r) {
    l_.row(r).head(position) = l_.row(r + 1).head(position);
    for (Index c = position; c <= r; ++c) l_(r, c) = l_(r + 1, c + 1);
  }
  l_.row(dim_ - 1).setZero();
  l_.col(dim_ - 1).setZero();
  for (Index r = position; r < dim_ - 1; ++r) diag_(r) = diag_(r + 1);
  source_.erase(source_.begin() + position);
  --dim_;
  if (tail > 0) {
    auto block = l_.block(position, position, tail, tail);
    if (!chol_rank_one(block, v, 1.0)) {
      raise(ErrorCode::NotPositiveDefinite, "column removal update failed");
    }
  }
  ++updates_;
}

void SpdFactor::rank_one_update(const Vector& v, double sign) {
  if (v.size() != dim_) raise(ErrorCode::InvalidArgument, "rank-one vector has wrong length");
  if (dim_ == 0) return;
  Matrix backup = l_.topLeftCorner(dim_, dim_);
  if (!chol_rank_one(l_.topLeftCorner(dim_, dim_), v, sign)) {
    l_.topLeftCorner(dim_, dim_) = backup;
    raise(ErrorCode::NotPositiveDefinite, "rank-one downdate lost definiteness");
  }
  diag_.head(dim_) += sign * v.cwiseAbs2();
  ++updates_;
}

Vector SpdFactor::solve(const Vector& rhs) const {
  if (rhs.size() != dim_) raise(ErrorCode::InvalidArgument, "rhs has wrong length");
  Vector x = rhs;
  if (dim_ == 0) return x;
  auto l = l_.topLeftCorner(dim_, dim_);
  l.triangularView<Eigen::Lower>().solveInPlace(x);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Matrix SpdFactor::lower() const {
  return l_.topLeftCorner(dim_, dim_).triangularView<Eigen::Lower>();
}

Matrix SpdFactor::reconstruct() const {
  const Matrix l = lower();
  return l * l.transpose();
}

Index SpdFactor::position_of(Index j) const {
  auto it = std::find(source_.begin(), source_.end(), j);
  return it == source_.end() ? -1 : static_cast<Index>(it - source_.begin());
}

void CrossGramInverse::reset(const Matrix& m) {
  if (m.rows() != m.cols()) raise(ErrorCode::InvalidArgument, "cross-gram must be square");
  updates_ = 0;
  alarm_ = false;
  if (m.rows() == 0) {
    n_.resize(0, 0);
    return;
  }
  Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() > 1e-13)) {
    raise(ErrorCode::SingularCrossGram, "reciprocal condition " + std::to_string(lu.rcond()));
  }
  n_ = lu.inverse();
}

void CrossGramInverse::check_denominator(double denom, double scale) {
  if (!(std::abs(denom) > 1e-14 * scale) || !std::isfinite(denom)) {
    raise(ErrorCode::SingularCrossGram, "update denominator " + std::to_string(denom));
  }
  if (std::abs(denom) < 1e-8 * scale) alarm_ = true;
}

void CrossGramInverse::append(const Vector& row, const Vector& col, double corner) {
  const Index k = size();
  const Vector nc = n_ * col;
  const Vector rn = n_.transpose() * row;
  const double s = corner - row.dot(nc);
  check_denominator(s, std::abs(corner) + row.norm() * nc.norm());
  Matrix grown(k + 1, k + 1);
  grown.topLeftCorner(k, k) = n_ + nc * rn.transpose() / s;
  grown.topRightCorner(k, 1) = -nc / s;
  grown.bottomLeftCorner(1, k) = -rn.transpose() / s;
  grown(k, k) = 1.0 / s;
  n_.swap(grown);
  ++updates_;
}

void CrossGramInverse::remove(Index row_pos, Index col_pos) {
  const Index k = size();
  if (row_pos < 0 || row_pos >= k || col_pos < 0 || col_pos >= k) {
    raise(ErrorCode::InvalidArgument, "cross-gram remove position out of range");
  }
  // Inverse rows follow M's columns, inverse columns follow M's rows.
  const double pivot = n_(col_pos, row_pos);
  const double scale = n_.col(row_pos).norm() * n_.row(col_pos).norm();
  check_denominator(pivot, scale);
  Matrix reduced = n_ - n_.col(row_pos) * n_.row(col_pos) / pivot;
  Matrix out(k - 1, k - 1);
  for (Index i = 0, oi = 0; i < k; ++i) {
    if (i == col_pos) continue;
    for (Index j = 0, oj = 0; j < k; ++j) {
      if (j == row_pos) continue;
      out(oi, oj++) = reduced(i, j);
    }
    ++oi;
  }
  n_.swap(out);
  ++updates_;
}

void CrossGramInverse::rank_one_update(const Vector& u, const Vector& v) {
  const Vector nu = n_ * u;
  const Vector vn = n_.transpose() * v;
  const double denom = 1.0 + v.dot(nu);
  check_denominator(denom, 1.0 + std::abs(v.dot(nu)));
  n_ -= nu * vn.transpose() / denom;
  ++updates_;
}

void CrossGramInverse::add_to_row(Index row_pos, const Vector& delta) {
  rank_one_update(Vector::Unit(size(), row_pos), delta);
}

void CrossGramInverse::add_to_column(Index col_pos, const Vector& delta) {
  rank_one_update(delta, Vector::Unit(size(), col_pos));
}

LsState ls_solve(const Matrix& a, const Vector& y) {
  if (a.rows() != y.size()) raise(ErrorCode::InvalidArgument, "rhs length does not match rows");
  const Index n = a.cols();
  if (a.rows() < n) raise(ErrorCode::RankDeficient, "fewer rows than columns");
  const Matrix g = a.transpose() * a;
  Eigen::LLT<Matrix> llt(g);
  const double maxd = n > 0 ? g.diagonal().maxCoeff() : 0.0;
  if (llt.info() != Eigen::Success ||
      (n > 0 && llt.matrixL().toDenseMatrix().diagonal().cwiseAbs2().minCoeff() <=
                    static_cast<double>(n) * kEps * maxd)) {
    raise(ErrorCode::RankDeficient, "A^T A is not positive definite");
  }
  LsState s;
  s.p = llt.solve(Matrix::Identity(n, n));
  s.estimate = s.p * (a.transpose() * y);
  s.m = a.rows();
  return s;
}

LsState rls_append(const LsState& s, const RowVector& b, double w) {
  if (b.size() != s.estimate.size()) raise(ErrorCode::InvalidArgument, "row has wrong length");
  LsState out = s;
  const Vector pb = s.p * b.transpose();
  const double denom = 1.0 + b.dot(pb);
  const Vector k = pb / denom;
  out.p -= k * pb.transpose();
  out.estimate += k * (w - b.dot(s.estimate));
  out.m = s.m + 1;
  return out;
}

}  // namespace l1h
