#pragma once

// Brute-force reference solvers for tiny instances. They enumerate supports
// and sign patterns directly and check optimality with their own residual
// computations; nothing here calls into the homotopy solvers.

#include "l1h/linalg.hpp"

namespace l1h::oracle {

// n <= 12.
Vector bpdn_brute(const Matrix& a, const Vector& y, double tau);

struct DsSolution {
  Vector x;
  Vector lambda;
};

// n <= 6.
DsSolution ds_brute(const Matrix& a, const Vector& y, double tau);

// Minimizer of ||A x - y||_1 over interpolating vertices; n <= 6, m <= 14.
Vector l1_regression_brute(const Matrix& a, const Vector& y);

}  // namespace l1h::oracle
