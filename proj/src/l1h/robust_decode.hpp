#pragma once

#include "l1h/bpdn.hpp"
#include "l1h/homotopy_core.hpp"
#include "l1h/linalg.hpp"

#include <vector>

namespace l1h {

// P = I - F (F^T F)^-1 F^T together with (F^T F)^-1.
struct NullProjector {
  Matrix p;
  Matrix m;
};

NullProjector null_projector(const Matrix& f);
// Extends the projector by one row of F without recomputing it.
NullProjector projector_append(const NullProjector& np, const Matrix& f, const RowVector& b);

// Error estimate c = s - F x for min tau*||c||_1 + 1/2 ||P (s - c)||^2,
// grown by rows. Rows still in the new set carry weight epsilon.
struct RobustState {
  Matrix f;
  Vector s;
  Vector c;
  double tau = 0.0;
  double epsilon = 1.0;
  NullProjector proj;
  ActiveSet active;           // support of c with signs
  std::vector<char> in_new;   // new rows that have not yet shrunk to zero
  Vector p;                   // P (c - s)

  Index rows() const { return f.rows(); }
  Index n() const { return f.cols(); }
};

RobustState robust_init(const Matrix& a, const Vector& y, double tau, HomotopyTrace* trace = nullptr);

RobustState robust_add_measurements(const RobustState& state, const Matrix& b, const Vector& w,
                                    HomotopyTrace* trace = nullptr, Index max_steps = 0);

// (F^T F)^-1 F^T (s - c); meaningful at the end of a path only.
Vector decode_message(const RobustState& state);

// Certificate at the state's epsilon against a freshly computed P (c - s).
KktReport robust_kkt(const RobustState& state);

}  // namespace l1h
