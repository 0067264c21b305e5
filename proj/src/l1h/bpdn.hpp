#pragma once

#include "l1h/homotopy_core.hpp"
#include "l1h/linalg.hpp"
#include "l1h/operators.hpp"

#include <vector>

namespace l1h {

// Record of one homotopy run. params holds the homotopy parameter after
// each step (tau for cold paths, epsilon for updates).
struct HomotopyTrace {
  std::vector<StepEvent> steps;
  std::vector<double> params;
  std::vector<double> u;  // sequential updates only
  double products = 0.0;  // full applications of A^T A; A or A^T alone count 1/2
  double final_epsilon = 0.0;
  bool lucky_breakdown = false;

  Index iterations() const { return static_cast<Index>(steps.size()); }
  Index support_changes() const;
};

struct BpdnState {
  Vector x;
  double tau = 0.0;
  ActiveSet active;
  Vector p;  // G x - q, i.e. A^T (A x - y) for plain BPDN
};

struct KktReport {
  double support_violation = 0.0;      // L1 / DS1 / dual equality
  double off_support_max = 0.0;        // L2 / DS3
  double dual_support_violation = 0.0;  // DS2
  double dual_off_support_max = 0.0;   // DS4
  bool pass = false;
};

struct PathOptions {
  Index max_steps = 0;  // 0 selects the per-algorithm default
  Index refresh_every = 50;
};

// Cold homotopy for min tau*||x||_1 + 1/2 x^T G x - q^T x, tau decreasing
// from ||q||_inf.
BpdnState bpdn_path(const GramOperator& g, const Vector& q, double tau, HomotopyTrace* trace = nullptr,
                    const PathOptions& opts = {});

BpdnState solve_bpdn(const MatrixOperator& a, const Vector& y, double tau, HomotopyTrace* trace = nullptr,
                     const PathOptions& opts = {});
BpdnState solve_bpdn(const Matrix& a, const Vector& y, double tau);

KktReport bpdn_kkt(const Matrix& a, const Vector& y, double tau, const Vector& x);
// Same certificate from precomputed correlations p = G x - q.
KktReport bpdn_kkt_from_correlations(const Vector& p, double tau, const Vector& x);

// Support entries whose magnitude exceeds zero.
IndexList support_of(const Vector& x);

void require_no_zero_columns(const Matrix& a);

}  // namespace l1h
