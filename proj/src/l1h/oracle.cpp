#include "l1h/oracle.hpp"

#include "l1h/error.hpp"

#include <cmath>
#include <limits>

namespace l1h::oracle {

namespace {

IndexList bits_to_indices(unsigned mask, Index n) {
  IndexList out;
  for (Index j = 0; j < n; ++j) {
    if (mask & (1u << j)) out.push_back(j);
  }
  return out;
}

Vector signs_from_bits(unsigned mask, Index k) {
  Vector z(k);
  for (Index i = 0; i < k; ++i) z(i) = (mask & (1u << i)) ? -1.0 : 1.0;
  return z;
}

bool signs_match(const Vector& v, const Vector& z) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v(i) * z(i) > 0.0)) return false;
  }
  return true;
}

}  // namespace

Vector bpdn_brute(const Matrix& a, const Vector& y, double tau) {
  const Index n = a.cols();
  if (n > 12) raise(ErrorCode::InvalidArgument, "bpdn_brute supports n <= 12");
  const Vector q = a.transpose() * y;
  const Matrix g = a.transpose() * a;
  const double slack = tau * (1.0 + 1e-9);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const IndexList s = bits_to_indices(mask, n);
    const Index k = static_cast<Index>(s.size());
    if (k > a.rows()) continue;
    Eigen::LDLT<Matrix> ldlt;
    if (k > 0) {
      Matrix gs(k, k);
      for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) gs(i, j) = g(s[i], s[j]);
      ldlt.compute(gs);
      if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-12 * gs.diagonal().maxCoeff())) continue;
    }
    for (unsigned smask = 0; smask < (1u << k); ++smask) {
      const Vector z = signs_from_bits(smask, k);
      Vector xs;
      if (k > 0) {
        Vector rhs(k);
        for (Index i = 0; i < k; ++i) rhs(i) = q(s[i]) - tau * z(i);
        xs = ldlt.solve(rhs);
        if (!signs_match(xs, z)) continue;
      }
      Vector x = Vector::Zero(n);
      for (Index i = 0; i < k; ++i) x(s[i]) = xs(i);
      const Vector corr = a.transpose() * (a * x - y);
      bool ok = true;
      for (Index j = 0; j < n && ok; ++j) {
        if (!(mask & (1u << j))) ok = std::abs(corr(j)) <= slack;
      }
      if (ok) return x;
    }
  }
  raise(ErrorCode::NoCertifiedSolution, "no support/sign pattern certifies optimality");
}

DsSolution ds_brute(const Matrix& a, const Vector& y, double tau) {
  const Index n = a.cols();
  if (n > 6) raise(ErrorCode::InvalidArgument, "ds_brute supports n <= 6");
  const Matrix g = a.transpose() * a;
  const Vector q = a.transpose() * y;
  if (q.cwiseAbs().maxCoeff() <= tau) return {Vector::Zero(n), Vector::Zero(n)};
  for (unsigned xmask = 1; xmask < (1u << n); ++xmask) {
    const IndexList gx = bits_to_indices(xmask, n);
    const Index k = static_cast<Index>(gx.size());
    for (unsigned lmask = 1; lmask < (1u << n); ++lmask) {
      const IndexList gl = bits_to_indices(lmask, n);
      if (static_cast<Index>(gl.size()) != k) continue;
      Matrix m(k, k);
      for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) m(i, j) = g(gl[i], gx[j]);
      Eigen::FullPivLU<Matrix> lu(m);
      if (!lu.isInvertible()) continue;
      for (unsigned smask = 0; smask < (1u << k); ++smask) {
        const Vector zl = signs_from_bits(smask, k);
        Vector rhs(k);
        for (Index i = 0; i < k; ++i) rhs(i) = q(gl[i]) + tau * zl(i);
        const Vector xs = lu.solve(rhs);
        Vector zx(k);
        bool nonzero = true;
        for (Index i = 0; i < k; ++i) {
          if (xs(i) == 0.0) nonzero = false;
          zx(i) = xs(i) > 0.0 ? 1.0 : -1.0;
        }
        if (!nonzero) continue;
        const Vector ls = lu.transpose().solve(Vector(-zx));
        if (!signs_match(ls, zl)) continue;
        Vector x = Vector::Zero(n), lambda = Vector::Zero(n);
        for (Index i = 0; i < k; ++i) {
          x(gx[i]) = xs(i);
          lambda(gl[i]) = ls(i);
        }
        const Vector p = g * x - q;
        const Vector al = g * lambda;
        bool ok = true;
        for (Index j = 0; j < n && ok; ++j) {
          if (!(lmask & (1u << j)) && std::abs(p(j)) > tau * (1.0 + 1e-9)) ok = false;
          if (!(xmask & (1u << j)) && std::abs(al(j)) > 1.0 + 1e-9) ok = false;
        }
        if (ok) return {x, lambda};
      }
    }
  }
  raise(ErrorCode::NoCertifiedSolution, "no support pair certifies optimality");
}

Vector l1_regression_brute(const Matrix& a, const Vector& y) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (n > 6 || m > 14 || m < n) raise(ErrorCode::InvalidArgument, "l1_regression_brute supports n <= 6, n <= m <= 14");
  Vector best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  while (true) {
    Matrix sub(n, n);
    Vector rhs(n);
    for (Index i = 0; i < n; ++i) {
      sub.row(i) = a.row(rows[static_cast<std::size_t>(i)]);
      rhs(i) = y(rows[static_cast<std::size_t>(i)]);
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(rhs);
      const double cost = (a * x - y).lpNorm<1>();
      if (best.size() == 0 || cost < best_cost - 1e-12 * std::max(1.0, best_cost)) {
        best_cost = cost;
        best = x;
      }
    }
    // Next combination in lexicographic order.
    Index i = n - 1;
    while (i >= 0 && rows[static_cast<std::size_t>(i)] == m - n + i) --i;
    if (i < 0) break;
    ++rows[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < n; ++j) rows[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (best.size() == 0) raise(ErrorCode::NoCertifiedSolution, "every n-row subset is singular");
  return best;
}

}  // namespace l1h::oracle
