#include "l1h/operators.hpp"

namespace l1h {

Vector MatrixOperator::apply_sparse(const Vector& x, const IndexList& support) const {
  Vector out = Vector::Zero(a_->rows());
  for (Index j : support) {
    if (x(j) != 0.0) out += x(j) * a_->col(j);
  }
  return out;
}

Matrix GramOperator::submatrix(const IndexList& idx) const {
  const Index k = static_cast<Index>(idx.size());
  Matrix g(k, k);
  for (Index c = 0; c < k; ++c) g.col(c) = column(idx[c], idx);
  return 0.5 * (g + g.transpose());
}

Vector DenseGram::times(const Vector& v, const IndexList& support) const {
  return a_.apply_transpose(a_.apply_sparse(v, support));
}

Vector DenseGram::column(Index j, const IndexList& rows) const {
  const Matrix& a = a_.matrix();
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = a.col(rows[i]).dot(a.col(j));
  return out;
}

double DenseGram::diagonal(Index j) const { return a_.matrix().col(j).squaredNorm(); }

Vector SeqGram::times(const Vector& v, const IndexList& support) const {
  Vector out = DenseGram::times(v, support);
  double bv = 0.0;
  for (Index j : support) bv += b_(j) * v(j);
  out += (eps_ * bv) * b_.transpose();
  return out;
}

Vector SeqGram::column(Index j, const IndexList& rows) const {
  Vector out = DenseGram::column(j, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) += eps_ * b_(rows[i]) * b_(j);
  return out;
}

double SeqGram::diagonal(Index j) const { return DenseGram::diagonal(j) + eps_ * b_(j) * b_(j); }

Vector ProjectorGram::times(const Vector& v, const IndexList& support) const {
  Vector out = Vector::Zero(p_.rows());
  for (Index j : support) {
    if (v(j) != 0.0) out += v(j) * p_.col(j);
  }
  return out;
}

Vector ProjectorGram::column(Index j, const IndexList& rows) const {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = p_(rows[i], j);
  return out;
}

}  // namespace l1h
