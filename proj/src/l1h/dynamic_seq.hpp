#pragma once

#include "l1h/bpdn.hpp"
#include "l1h/dantzig.hpp"
#include "l1h/dynamic_x.hpp"

namespace l1h {

// Folds the row (b, w) into a BPDN solution for (A, y, tau). The result
// solves the problem on [A; b], [y; w]. trace->params holds epsilon after
// each step and trace->u the scalar b U^-1 b^T used by that step.
BpdnState bpdn_add_measurement(const BpdnState& state, const MatrixOperator& a, const Vector& y, const RowVector& b,
                               double w, HomotopyTrace* trace = nullptr, const UpdateOptions& opts = {});

// Drops row `row` of the stacked system, epsilon running from 1 down to 0.
BpdnState bpdn_remove_measurement(const BpdnState& state, const Matrix& a_stacked, const Vector& y_stacked,
                                  Index row, HomotopyTrace* trace = nullptr, const UpdateOptions& opts = {});

// Row-by-row loop over a block.
BpdnState bpdn_add_measurements(const BpdnState& state, const Matrix& a, const Vector& y, const Matrix& b,
                                const Vector& w, HomotopyTrace* trace = nullptr, const UpdateOptions& opts = {});

DsState ds_add_measurement(const DsState& state, const MatrixOperator& a, const Vector& y, const RowVector& b,
                           double w, HomotopyTrace* trace = nullptr, const UpdateOptions& opts = {});

// Epsilon after a step of size theta with scalar u; s = +1 adding, -1 removing.
double advance_epsilon(double eps, double theta, double u, double s = 1.0);

}  // namespace l1h
