#pragma once

#include "l1h/linalg.hpp"

namespace l1h {

// Full applications of A and A^T go through this interface so that a
// counting wrapper can observe them. Partial products used by the rank-one
// machinery read matrix() directly and are never observed.
class MatrixOperator {
 public:
  explicit MatrixOperator(const Matrix& a) : a_(&a) {}
  virtual ~MatrixOperator() = default;

  const Matrix& matrix() const { return *a_; }
  Index rows() const { return a_->rows(); }
  Index cols() const { return a_->cols(); }

  virtual Vector apply(const Vector& x) const { return *a_ * x; }
  // A*x for x supported on support.
  virtual Vector apply_sparse(const Vector& x, const IndexList& support) const;
  virtual Vector apply_transpose(const Vector& r) const { return a_->transpose() * r; }

 private:
  const Matrix* a_;
};

// Symmetric positive semidefinite system matrix G seen by the BPDN engine.
class GramOperator {
 public:
  virtual ~GramOperator() = default;
  virtual Index size() const = 0;
  // G*v with v supported on support; one full product.
  virtual Vector times(const Vector& v, const IndexList& support) const = 0;
  // G(rows, j), cheap partial product.
  virtual Vector column(Index j, const IndexList& rows) const = 0;
  virtual double diagonal(Index j) const = 0;
  Matrix submatrix(const IndexList& idx) const;
};

// G = A^T A
class DenseGram : public GramOperator {
 public:
  explicit DenseGram(const MatrixOperator& a) : a_(a) {}
  Index size() const override { return a_.cols(); }
  Vector times(const Vector& v, const IndexList& support) const override;
  Vector column(Index j, const IndexList& rows) const override;
  double diagonal(Index j) const override;

 protected:
  const MatrixOperator& a_;
};

// G = A^T A + eps * b^T b
class SeqGram : public DenseGram {
 public:
  SeqGram(const MatrixOperator& a, const RowVector& b, double eps) : DenseGram(a), b_(b), eps_(eps) {}
  void set_epsilon(double eps) { eps_ = eps; }
  double epsilon() const { return eps_; }
  const RowVector& row() const { return b_; }
  Vector times(const Vector& v, const IndexList& support) const override;
  Vector column(Index j, const IndexList& rows) const override;
  double diagonal(Index j) const override;

 private:
  RowVector b_;
  double eps_;
};

// G = P for a symmetric idempotent P (P^T P = P).
class ProjectorGram : public GramOperator {
 public:
  explicit ProjectorGram(const Matrix& p) : p_(p) {}
  Index size() const override { return p_.rows(); }
  Vector times(const Vector& v, const IndexList& support) const override;
  Vector column(Index j, const IndexList& rows) const override;
  double diagonal(Index j) const override { return p_(j, j); }

 private:
  const Matrix& p_;
};

}  // namespace l1h
