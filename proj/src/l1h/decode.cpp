#include "l1h/decode.hpp"

#include "l1h/error.hpp"
#include "l1h/homotopy_core.hpp"

#include <algorithm>
#include <cmath>

namespace l1h {

IndexList DecodeState::error_support() const {
  IndexList out;
  for (Index i = 0; i < rows(); ++i) {
    if (role[static_cast<std::size_t>(i)] == RowRole::Support) out.push_back(origin[static_cast<std::size_t>(i)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector DecodeState::errors() const {
  Vector out = Vector::Zero(rows());
  for (Index i = 0; i < rows(); ++i) out(origin[static_cast<std::size_t>(i)]) = c(i);
  return out;
}

namespace {

constexpr double kZeroRel = 1e-10;

void reset_inverse(DecodeState& st) {
  try {
    st.minv.reset(select_rows(st.f, st.basis));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularCrossGram) raise(ErrorCode::SingularSubmatrix, e.what());
    throw;
  }
}

// Sum of F_j^T xi_j over rows still in the new set.
Vector new_row_balance(const DecodeState& st) {
  Vector r = Vector::Zero(st.n());
  for (Index j = 0; j < st.rows(); ++j) {
    if (st.in_new[static_cast<std::size_t>(j)]) r += st.xi(j) * st.f.row(j).transpose();
  }
  return r;
}

bool any_new(const DecodeState& st) {
  return std::any_of(st.in_new.begin(), st.in_new.end(), [](char v) { return v != 0; });
}

// Earliest basis entry of xi to reach magnitude one. An entry already at
// the bound and moving outward fires immediately.
StepEvent dual_scan(const IndexList& basis, const Vector& xib, const Vector& dxi) {
  StepEvent best;
  for (Index k = 0; k < xib.size(); ++k) {
    if (dxi(k) == 0.0) continue;
    const double sg = dxi(k) > 0.0 ? 1.0 : -1.0;
    const double slack = 1.0 - sg * xib(k);
    const double theta = slack <= kRatioTolerance ? 0.0 : slack / std::abs(dxi(k));
    best = earlier(best, StepEvent{theta, StepKind::Activate, basis[static_cast<std::size_t>(k)], sg});
  }
  return best;
}

// Closed-form x from the basis rows, then c and the basis duals.
void polish(DecodeState& st, HomotopyTrace& tr) {
  st.x = st.minv.solve(gather(st.s, st.basis));
  st.c = st.f * st.x - st.s;
  tr.products += 0.5;
  Vector rest = Vector::Zero(st.n());
  for (Index j = 0; j < st.rows(); ++j) {
    const RowRole r = st.role[static_cast<std::size_t>(j)];
    if (r == RowRole::Basis) {
      st.c(j) = 0.0;
    } else {
      if (r == RowRole::Frozen) st.c(j) = 0.0;
      rest += st.xi(j) * st.f.row(j).transpose();
    }
  }
  const Vector xib = -st.minv.solve_transpose(rest);
  for (std::size_t k = 0; k < st.basis.size(); ++k) st.xi(st.basis[k]) = xib(static_cast<Index>(k));
}

void run_homotopy(DecodeState& st, HomotopyTrace& tr, Index max_steps) {
  const Index n = st.n();
  if (max_steps <= 0) max_steps = 10 * st.rows() + 10;
  double eps = 0.0;
  Vector r = new_row_balance(st);
  Index since_refresh = 0;
  for (Index iter = 0;; ++iter) {
    if (!any_new(st)) {
      tr.lucky_breakdown = eps < 1.0;
      break;
    }
    if (iter >= max_steps) raise(ErrorCode::IterationLimit, "decoding exceeded " + std::to_string(max_steps) + " steps");

    // Dual update: epsilon advances, the basis duals absorb the new rows.
    const Vector xib = gather(st.xi, st.basis);
    const Vector dxi = -st.minv.solve_transpose(r);
    const StepEvent hit = dual_scan(st.basis, xib, dxi);
    const double remaining = 1.0 - eps;
    if (hit.terminal() || hit.theta >= remaining) {
      const Vector moved = xib + remaining * dxi;
      for (std::size_t k = 0; k < st.basis.size(); ++k) st.xi(st.basis[k]) = moved(static_cast<Index>(k));
      eps = 1.0;
      tr.steps.push_back(StepEvent{remaining, StepKind::Terminal, -1, 0.0});
      tr.params.push_back(eps);
      break;
    }
    const Vector moved = xib + hit.theta * dxi;
    for (std::size_t k = 0; k < st.basis.size(); ++k) st.xi(st.basis[k]) = moved(static_cast<Index>(k));
    eps += hit.theta;
    const Index gp = hit.gamma;
    const Index pos = static_cast<Index>(std::find(st.basis.begin(), st.basis.end(), gp) - st.basis.begin());
    const double z = hit.sign;
    st.xi(gp) = z;
    tr.steps.push_back(hit);
    tr.params.push_back(eps);

    // Primal update: gp leaves the basis, its residual grows with sign z.
    const Vector dx = z * st.minv.solve(Vector::Unit(n, pos));
    Vector dc = st.f * dx;
    tr.products += 0.5;
    for (Index j : st.basis) dc(j) = 0.0;
    dc(gp) = z;
    st.role[static_cast<std::size_t>(gp)] = RowRole::Support;

    IndexList support;
    std::vector<double> signs;
    StepEvent blocked;
    const double dc_scale = std::max(1.0, dc.cwiseAbs().maxCoeff());
    for (Index j = 0; j < st.rows(); ++j) {
      const RowRole role = st.role[static_cast<std::size_t>(j)];
      if (role == RowRole::Support) {
        support.push_back(j);
        signs.push_back(st.xi(j) >= 0.0 ? 1.0 : -1.0);
      } else if (role == RowRole::Frozen && std::abs(dc(j)) > 1e-12 * dc_scale) {
        blocked = earlier(blocked, StepEvent{0.0, StepKind::Shrink, j, 0.0});
      }
    }
    const StepEvent ev = earlier(min_shrink_step_signed(st.c, dc, signs, support), blocked);
    if (ev.terminal()) raise(ErrorCode::DegenerateSupport, "primal update found no row to enter the basis");
    st.x += ev.theta * dx;
    st.c += ev.theta * dc;
    const Index out = ev.gamma;
    st.c(out) = 0.0;

    try {
      st.minv.add_to_row(pos, (st.f.row(out) - st.f.row(gp)).transpose());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularCrossGram) raise(ErrorCode::SingularSubmatrix, e.what());
      throw;
    }
    st.basis[static_cast<std::size_t>(pos)] = out;
    st.role[static_cast<std::size_t>(out)] = RowRole::Basis;
    if (st.in_new[static_cast<std::size_t>(out)]) {
      st.in_new[static_cast<std::size_t>(out)] = 0;
      r -= st.xi(out) * st.f.row(out).transpose();
      st.xi(out) *= eps;
    }
    tr.steps.push_back(ev);
    tr.params.push_back(eps);

    if (st.minv.needs_refresh()) reset_inverse(st);
    if (++since_refresh >= 50) {
      since_refresh = 0;
      st.c = st.f * st.x - st.s;
      for (Index j = 0; j < st.rows(); ++j) {
        if (st.role[static_cast<std::size_t>(j)] != RowRole::Support) st.c(j) = 0.0;
      }
      tr.products += 0.5;
      r = new_row_balance(st);
    }
  }
  tr.final_epsilon = eps;
  st.epsilon = 1.0;
  std::fill(st.in_new.begin(), st.in_new.end(), 0);
  polish(st, tr);
}

void append_rows(DecodeState& st, const Matrix& b, const Vector& w, const IndexList& origin) {
  const Index old_rows = st.rows();
  const Index p = b.rows();
  const Vector d0 = b * st.x - w;
  const double scale = std::max({1.0, st.c.size() ? st.c.cwiseAbs().maxCoeff() : 0.0, d0.cwiseAbs().maxCoeff()});
  st.f.conservativeResize(old_rows + p, Eigen::NoChange);
  st.f.bottomRows(p) = b;
  st.s.conservativeResize(old_rows + p);
  st.s.tail(p) = w;
  st.c.conservativeResize(old_rows + p);
  st.xi.conservativeResize(old_rows + p);
  for (Index i = 0; i < p; ++i) {
    const Index j = old_rows + i;
    if (std::abs(d0(i)) <= kZeroRel * scale) {
      st.c(j) = 0.0;
      st.xi(j) = 0.0;
      st.role.push_back(RowRole::Frozen);
      st.in_new.push_back(0);
    } else {
      st.c(j) = d0(i);
      st.xi(j) = sign_of(d0(i));
      st.role.push_back(RowRole::Support);
      st.in_new.push_back(1);
    }
    st.origin.push_back(origin[static_cast<std::size_t>(i)]);
  }
}

}  // namespace

DecodeState decode_init(const Matrix& a, const Vector& y, HomotopyTrace* trace) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (n < 1 || m < n) raise(ErrorCode::InvalidArgument, "decoding needs at least as many rows as columns");
  if (y.size() != m) raise(ErrorCode::InvalidArgument, "codeword length does not match rows");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;

  DecodeState st;
  IndexList chosen;
  for (Index attempt = 0; attempt < std::min(n, m); ++attempt) {
    IndexList subset;
    for (Index i = 0; i < n; ++i) subset.push_back((attempt + i) % m);
    try {
      st.minv.reset(select_rows(a, subset));
      chosen = subset;
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularCrossGram) throw;
    }
  }
  if (chosen.empty()) raise(ErrorCode::SingularBootstrap, "no square row subset tried was invertible");

  st.f = select_rows(a, chosen);
  st.s = gather(y, chosen);
  st.x = st.minv.solve(st.s);
  st.c = Vector::Zero(n);
  st.xi = Vector::Zero(n);
  st.role.assign(static_cast<std::size_t>(n), RowRole::Basis);
  st.in_new.assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) st.basis.push_back(i);
  st.origin = chosen;
  st.epsilon = 1.0;
  tr.final_epsilon = 1.0;
  if (m == n) return st;

  std::vector<char> used(static_cast<std::size_t>(m), 0);
  for (Index j : chosen) used[static_cast<std::size_t>(j)] = 1;
  IndexList rest;
  for (Index j = 0; j < m; ++j) {
    if (!used[static_cast<std::size_t>(j)]) rest.push_back(j);
  }
  append_rows(st, select_rows(a, rest), gather(y, rest), rest);
  run_homotopy(st, tr, 0);
  return st;
}

DecodeState decode_add_measurements(const DecodeState& state, const Matrix& b, const Vector& w, HomotopyTrace* trace,
                                    Index max_steps) {
  if (b.cols() != state.n()) raise(ErrorCode::InvalidArgument, "new rows have the wrong width");
  if (b.rows() != w.size()) raise(ErrorCode::InvalidArgument, "new rows and values differ in length");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  DecodeState st = state;
  tr.final_epsilon = 1.0;
  if (b.rows() == 0) return st;
  IndexList origin;
  for (Index i = 0; i < b.rows(); ++i) origin.push_back(state.rows() + i);
  append_rows(st, b, w, origin);
  run_homotopy(st, tr, max_steps);
  return st;
}

bool recovery_check(const DecodeState& state) {
  const double cmax = state.c.size() ? state.c.cwiseAbs().maxCoeff() : 0.0;
  const double thresh = cmax > 0.0 ? 1e-8 * cmax : 1e-12;
  Index count = 0;
  for (Index i = 0; i < state.c.size(); ++i) count += std::abs(state.c(i)) > thresh;
  return count < state.rows() - state.n();
}

DecodeKkt decode_kkt(const DecodeState& st) {
  DecodeKkt k;
  const Vector fresh = st.f * st.x - st.s;
  k.residual_mismatch = (fresh - st.c).cwiseAbs().maxCoeff();
  k.dual_max = st.xi.cwiseAbs().maxCoeff();
  const double cmax = st.c.cwiseAbs().maxCoeff();
  Vector bal = Vector::Zero(st.n());
  for (Index j = 0; j < st.rows(); ++j) {
    const std::size_t u = static_cast<std::size_t>(j);
    const double weight = st.in_new[u] ? st.epsilon : 1.0;
    bal += weight * st.xi(j) * st.f.row(j).transpose();
    if (st.role[u] == RowRole::Support) {
      k.sign_mismatch = std::max(k.sign_mismatch, std::abs(std::abs(st.xi(j)) - 1.0));
      if (std::abs(st.c(j)) > kZeroRel * std::max(1.0, cmax)) {
        k.sign_mismatch = std::max(k.sign_mismatch, std::abs(st.xi(j) - sign_of(st.c(j))));
      }
    } else {
      k.residual_mismatch = std::max(k.residual_mismatch, std::abs(fresh(j)));
    }
  }
  k.balance = bal.cwiseAbs().maxCoeff();
  const double fscale = std::max(1.0, st.f.cwiseAbs().maxCoeff());
  k.pass = k.residual_mismatch <= 1e-8 * std::max(1.0, st.s.cwiseAbs().maxCoeff()) && k.dual_max <= 1.0 + 1e-9 &&
           k.sign_mismatch <= 1e-8 && k.balance <= 1e-8 * fscale;
  return k;
}

}  // namespace l1h
