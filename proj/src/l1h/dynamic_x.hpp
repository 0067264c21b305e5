#pragma once

#include "l1h/bpdn.hpp"
#include "l1h/dantzig.hpp"

namespace l1h {

struct UpdateOptions {
  // Recompute A^T(Ax - y) from scratch instead of trusting the cached
  // correlations in the state (costs one counted product).
  bool verify_residual = false;
  Index max_steps = 0;  // 0 selects 10*n
  Index refresh_every = 50;
};

// Moves a BPDN solution for (A, y_old, tau) to the solution for
// (A, y_new, tau) along epsilon in [0, 1].
BpdnState update_bpdn_signal(const BpdnState& state, const MatrixOperator& a, const Vector& y_old,
                             const Vector& y_new, HomotopyTrace* trace = nullptr, const UpdateOptions& opts = {});

DsState update_ds_signal(const DsState& state, const MatrixOperator& a, const Vector& y_old, const Vector& y_new,
                         HomotopyTrace* trace = nullptr, const UpdateOptions& opts = {});

// Throws StaleWarmStart unless the cached correlations certify the state.
void check_warm_bpdn(const BpdnState& state);
void check_warm_ds(const DsState& state);

}  // namespace l1h
