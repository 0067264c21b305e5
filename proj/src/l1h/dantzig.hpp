#pragma once

#include "l1h/bpdn.hpp"
#include "l1h/homotopy_core.hpp"
#include "l1h/linalg.hpp"
#include "l1h/operators.hpp"

#include <vector>

namespace l1h {

// Primal-dual Dantzig selector state. Row positions of the cross-Gram
// G(gl, gx) follow gl, column positions follow gx.
struct DsState {
  Vector x;
  Vector lambda;
  double tau = 0.0;
  IndexList gx, gl;
  std::vector<double> zx, zl;
  std::vector<char> in_x, in_l;
  CrossGramInverse minv;
  Vector p;  // G x - q
  Vector a;  // G lambda

  Index n() const { return x.size(); }
};

DsState solve_ds(const MatrixOperator& a, const Vector& y, double tau, HomotopyTrace* trace = nullptr,
                 const PathOptions& opts = {});
DsState solve_ds(const Matrix& a, const Vector& y, double tau);
DsState ds_path(const GramOperator& g, const Vector& q, double tau, HomotopyTrace* trace = nullptr,
                const PathOptions& opts = {});

KktReport ds_kkt(const Matrix& a, const Vector& y, double tau, const Vector& x, const Vector& lambda);
KktReport ds_kkt_from_correlations(const Vector& p, const Vector& a, double tau, const Vector& x,
                                   const Vector& lambda);

// Building blocks shared by the cold path and the warm updates.
namespace ds_engine {

DsState empty_state(Index n, double tau, const Vector& q);
Matrix cross_gram(const GramOperator& g, const IndexList& rows, const IndexList& cols);
void rebuild_inverse(DsState& st, const GramOperator& g);
void maintain(DsState& st, const GramOperator& g);

// Dual completions after a primal event; lambda and a move, x stays.
// Gamma entered the lambda support with sign z.
void after_lambda_gain(DsState& st, const GramOperator& g, Index gamma, double z, HomotopyTrace& tr);
// gx[col_pos] shrank to zero.
void after_x_loss(DsState& st, const GramOperator& g, Index col_pos, HomotopyTrace& tr);

// Primal completions after a dual event; x and p move, lambda stays.
// j entered the x support with sign z.
void after_x_gain(DsState& st, const GramOperator& g, Index j, double z, HomotopyTrace& tr);
// gl[row_pos] shrank to zero.
void after_lambda_loss(DsState& st, const GramOperator& g, Index row_pos, HomotopyTrace& tr);

// Closed-form x and lambda on the current supports; q_rows is q on gl.
void polish(DsState& st, const Vector& q_rows);

}  // namespace ds_engine

}  // namespace l1h
