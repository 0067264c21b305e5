#pragma once

#include "l1h/bpdn.hpp"
#include "l1h/linalg.hpp"

#include <vector>

namespace l1h {

// Row roles in the l1 decoder. Basis rows (exactly n of them) carry c = 0
// and |xi| <= 1; support rows carry |xi| = 1 with xi = sign(c) (a support
// row may sit at c = 0 after a degenerate step); frozen rows arrived with a
// zero residual and keep c = 0 and xi = 0 until they enter the basis.
enum class RowRole : char { Support, Basis, Frozen };

struct DecodeState {
  Matrix f;  // stacked coding matrix
  Vector s;  // stacked received codeword
  Vector x;
  Vector c;   // F x - s
  Vector xi;  // dual variable, one per row
  std::vector<RowRole> role;
  std::vector<char> in_new;  // rows whose error entry has never reached zero
  IndexList basis;
  CrossGramInverse minv;  // inverse of F(basis, :)
  IndexList origin;       // caller row index of each stored row
  double epsilon = 1.0;

  Index rows() const { return f.rows(); }
  Index n() const { return f.cols(); }
  // Rows with role Support, in caller numbering.
  IndexList error_support() const;
  // c in caller row order.
  Vector errors() const;
};

DecodeState decode_init(const Matrix& a, const Vector& y, HomotopyTrace* trace = nullptr);

DecodeState decode_add_measurements(const DecodeState& state, const Matrix& b, const Vector& w,
                                    HomotopyTrace* trace = nullptr, Index max_steps = 0);

bool recovery_check(const DecodeState& state);

struct DecodeKkt {
  double residual_mismatch = 0.0;  // |c - (F x - s)|
  double dual_max = 0.0;           // max |xi|
  double sign_mismatch = 0.0;      // support rows: |xi - sign(c)| where c != 0
  double balance = 0.0;            // |sum of weighted F_j^T xi_j|
  bool pass = false;
};

// Certificate at the state's epsilon; rows still in the new set are
// weighted by epsilon.
DecodeKkt decode_kkt(const DecodeState& state);

}  // namespace l1h
