#include "l1h/dynamic_x.hpp"

#include "l1h/error.hpp"

#include <algorithm>
#include <cmath>

namespace l1h {

void check_warm_bpdn(const BpdnState& state) {
  const Index n = state.x.size();
  if (state.p.size() != n || state.active.membership().size() != static_cast<std::size_t>(n)) {
    raise(ErrorCode::StaleWarmStart, "state dimensions are inconsistent");
  }
  const KktReport r = bpdn_kkt_from_correlations(state.p, state.tau, state.x);
  if (!r.pass) {
    raise(ErrorCode::StaleWarmStart, "warm state fails its optimality check (support " +
                                         std::to_string(r.support_violation) + ", off-support " +
                                         std::to_string(r.off_support_max) + ")");
  }
  for (Index j : state.active.indices()) {
    if (state.x(j) == 0.0) raise(ErrorCode::StaleWarmStart, "active index carries a zero value");
  }
}

void check_warm_ds(const DsState& st) {
  const Index n = st.x.size();
  if (st.p.size() != n || st.a.size() != n || st.gx.size() != st.gl.size()) {
    raise(ErrorCode::StaleWarmStart, "DS state dimensions are inconsistent");
  }
  const KktReport r = ds_kkt_from_correlations(st.p, st.a, st.tau, st.x, st.lambda);
  if (!r.pass) raise(ErrorCode::StaleWarmStart, "warm DS state fails its optimality check");
}

namespace {

Vector correlations(const MatrixOperator& a, const Vector& x, const IndexList& support, const Vector& y) {
  return a.apply_transpose(a.apply_sparse(x, support) - y);
}

}  // namespace

BpdnState update_bpdn_signal(const BpdnState& state, const MatrixOperator& a, const Vector& y_old,
                             const Vector& y_new, HomotopyTrace* trace, const UpdateOptions& opts) {
  const Index n = a.cols();
  if (y_old.size() != a.rows() || y_new.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length mismatch");
  if (state.x.size() != n) raise(ErrorCode::InvalidArgument, "state does not match the matrix");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 10 * n;
  DenseGram g(a);

  BpdnState st = state;
  if (opts.verify_residual) {
    st.p = correlations(a, st.x, st.active.indices(), y_old);
    tr.products += 1.0;
  }
  check_warm_bpdn(st);

  const Vector dy = y_new - y_old;
  tr.final_epsilon = 1.0;
  if (dy.cwiseAbs().maxCoeff() == 0.0) return st;
  const Vector dq = a.apply_transpose(dy);
  tr.products += 0.5;

  const double tau = st.tau;
  double eps = 0.0;
  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "signal update exceeded " + std::to_string(max_steps) + " steps");
    const IndexList& gamma = st.active.indices();
    const Vector dx = scatter(st.active.factor().solve(gather(dq, gamma)), gamma, n);
    const Vector d = g.times(dx, gamma) - dq;
    tr.products += 1.0;

    const StepEvent shrink = min_shrink_step(st.x, dx, gamma);
    const StepEvent activate = min_activation_step(st.p, d, tau, complement(st.active.membership()));
    StepEvent ev = earlier(shrink, activate);
    const bool last = ev.terminal() || ev.theta >= 1.0 - eps;
    if (last) ev = StepEvent{1.0 - eps, StepKind::Terminal, -1, 0.0};
    st.x += ev.theta * dx;
    st.p += ev.theta * d;
    eps = last ? 1.0 : eps + ev.theta;
    tr.steps.push_back(ev);
    tr.params.push_back(eps);
    if (last) break;

    if (ev.kind == StepKind::Shrink) {
      st.x(ev.gamma) = 0.0;
      st.active.remove_at(st.active.position_of(ev.gamma));
    } else {
      st.active.add(ev.gamma, -ev.sign, g);
    }
    st.active.maintain(g);
    if (++since_refresh >= opts.refresh_every) {
      since_refresh = 0;
      st.p = correlations(a, st.x, st.active.indices(), (1.0 - eps) * y_old + eps * y_new);
      tr.products += 1.0;
    }
  }

  const IndexList& gamma = st.active.indices();
  const Matrix& am = a.matrix();
  Vector qg(static_cast<Index>(gamma.size()));
  for (std::size_t i = 0; i < gamma.size(); ++i) qg(static_cast<Index>(i)) = am.col(gamma[i]).dot(y_new);
  const Vector z = st.active.sign_vector();
  st.x = scatter(st.active.factor().solve(qg - tau * z), gamma, n);
  for (std::size_t i = 0; i < gamma.size(); ++i) st.p(gamma[i]) = -tau * z(static_cast<Index>(i));
  return st;
}

DsState update_ds_signal(const DsState& state, const MatrixOperator& a, const Vector& y_old, const Vector& y_new,
                         HomotopyTrace* trace, const UpdateOptions& opts) {
  const Index n = a.cols();
  if (y_old.size() != a.rows() || y_new.size() != a.rows()) raise(ErrorCode::InvalidArgument, "rhs length mismatch");
  if (state.x.size() != n) raise(ErrorCode::InvalidArgument, "state does not match the matrix");
  HomotopyTrace local;
  HomotopyTrace& tr = trace ? *trace : local;
  const Index max_steps = opts.max_steps > 0 ? opts.max_steps : 10 * n;
  DenseGram g(a);

  DsState st = state;
  if (opts.verify_residual) {
    st.p = correlations(a, st.x, st.gx, y_old);
    st.a = g.times(st.lambda, st.gl);
    tr.products += 2.0;
  }
  check_warm_ds(st);

  const Vector dy = y_new - y_old;
  tr.final_epsilon = 1.0;
  if (dy.cwiseAbs().maxCoeff() == 0.0) return st;
  const Vector dq = a.apply_transpose(dy);
  tr.products += 0.5;

  double eps = 0.0;
  Index since_refresh = 0;
  for (Index k = 0;; ++k) {
    if (k >= max_steps) raise(ErrorCode::IterationLimit, "DS signal update exceeded " + std::to_string(max_steps) + " steps");
    const Vector dx = scatter(st.minv.solve(gather(dq, st.gl)), st.gx, n);
    const Vector dp = g.times(dx, st.gx) - dq;
    tr.products += 1.0;

    const StepEvent shrink = min_shrink_step(st.x, dx, st.gx);
    const StepEvent act = min_activation_step(st.p, dp, st.tau, complement(st.in_l));
    StepEvent ev = earlier(shrink, act);
    const bool last = ev.terminal() || ev.theta >= 1.0 - eps;
    if (last) ev = StepEvent{1.0 - eps, StepKind::Terminal, -1, 0.0};
    st.x += ev.theta * dx;
    st.p += ev.theta * dp;
    eps = last ? 1.0 : eps + ev.theta;
    tr.steps.push_back(ev);
    tr.params.push_back(eps);
    if (last) break;

    if (ev.kind == StepKind::Activate) {
      ds_engine::after_lambda_gain(st, g, ev.gamma, ev.sign, tr);
    } else {
      const Index pos = std::find(st.gx.begin(), st.gx.end(), ev.gamma) - st.gx.begin();
      ds_engine::after_x_loss(st, g, pos, tr);
    }
    ds_engine::maintain(st, g);
    if (++since_refresh >= opts.refresh_every) {
      since_refresh = 0;
      st.p = correlations(a, st.x, st.gx, (1.0 - eps) * y_old + eps * y_new);
      st.a = g.times(st.lambda, st.gl);
      tr.products += 2.0;
    }
  }

  const Matrix& am = a.matrix();
  Vector qrows(static_cast<Index>(st.gl.size()));
  for (std::size_t i = 0; i < st.gl.size(); ++i) qrows(static_cast<Index>(i)) = am.col(st.gl[i]).dot(y_new);
  ds_engine::polish(st, qrows);
  return st;
}

}  // namespace l1h
